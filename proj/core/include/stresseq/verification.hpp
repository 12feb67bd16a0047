// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/equilibrate.hpp"

namespace stresseq {

/// Brute-force oracle for the rigid-mode characterization of the adjoint
/// null spaces of the patch operators.
struct NullSpaceReport {
    int patch_index = -1;
    int center = -1;
    PatchKind kind = PatchKind::Interior;
    int dim_computed = 0;
    int dim_predicted = 0;
    double principal_angle = 0.0;    // radians; largest angle when dims match
    double incompat_naive = 0.0;     // |y^T b| scan with naive projections
    double incompat_compatible = 0.0; // same with compatible projections
};

/// SVD null space of the adjoint of one patch operator, compared against the
/// predicted rigid-mode basis.
NullSpaceReport adjoint_null_space(const PipelineInputs& in, const LocalSystem& system);

/// Runs the null-space oracle and the right-hand-side incompatibility scan
/// over every patch, for both projection modes, with the given test-space
/// variant.
std::vector<NullSpaceReport> verify_patches(const PipelineInputs& in, const SurfaceLoad& g,
                                            const VolumeLoad& f,
                                            TestSpaceVariant variant = TestSpaceVariant::Deformed);

/// Largest principal angle between the column spans of two orthonormalizable
/// bases (radians).
double principal_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

} // namespace stresseq
