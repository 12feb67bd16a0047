// SPDX-License-Identifier: Apache-2.0
#include "stresseq/verification.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace stresseq {

double principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.cols() == 0 || b.cols() == 0) return 0.0;
    Eigen::HouseholderQR<Eigen::MatrixXd> qa(a), qb(b);
    Eigen::MatrixXd Qa = qa.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd Qb = qb.householderQ() * Eigen::MatrixXd::Identity(b.rows(), b.cols());
    // Sine-based formula: accurate for small angles where acos of the
    // cosine saturates at sqrt(machine epsilon).
    Eigen::MatrixXd residual = Qb - Qa * (Qa.transpose() * Qb);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
    double s = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    return std::asin(std::clamp(s, 0.0, 1.0));
}

NullSpaceReport adjoint_null_space(const PipelineInputs& in, const LocalSystem& system) {
    NullSpaceReport report;
    report.center = system.patch->center;
    report.kind = system.patch->kind;
    report.dim_predicted = (report.kind == PatchKind::Interior) ? 3 : 0;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.C, Eigen::ComputeFullU);
    double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()[i] > 1e-10 * smax) ++rank;
    }
    report.dim_computed = system.rows() - rank;

    if (report.dim_computed == report.dim_predicted && report.dim_predicted > 0) {
        Eigen::MatrixXd computed = svd.matrixU().rightCols(report.dim_computed);
        Eigen::MatrixXd predicted = predicted_adjoint_null(in, system);
        report.principal_angle = principal_angle(computed, predicted);
    }
    return report;
}

std::vector<NullSpaceReport> verify_patches(const PipelineInputs& in, const SurfaceLoad& g,
                                            const VolumeLoad& f, TestSpaceVariant variant) {
    ProjectedStressField naive = project_stress(in, ProjectionMode::Naive, g);
    ProjectedStressField compatible = project_stress(in, ProjectionMode::Compatible, g);
    ProjectedLoadField naive_load = project_load(in, ProjectionMode::Naive, f);
    ProjectedLoadField compatible_load = project_load(in, ProjectionMode::Compatible, f);

    std::vector<NullSpaceReport> out;
    out.reserve(in.patches->patches.size());
    for (size_t pi = 0; pi < in.patches->patches.size(); ++pi) {
        const VertexPatch& patch = in.patches->patches[pi];
        LocalSystem sys_naive = build_local_system(in, patch, naive, naive_load, g, variant);
        LocalSystem sys_comp =
            build_local_system(in, patch, compatible, compatible_load, g, variant);

        NullSpaceReport report = adjoint_null_space(in, sys_comp);
        report.patch_index = static_cast<int>(pi);
        report.incompat_naive = check_compatibility(in, sys_naive);
        report.incompat_compatible = check_compatibility(in, sys_comp);
        out.push_back(report);
    }
    return out;
}

} // namespace stresseq
