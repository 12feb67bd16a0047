// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/assembly.hpp"
#include "stresseq/patches.hpp"
#include "stresseq/rigid_modes.hpp"
#include "stresseq/rt_stress.hpp"

namespace stresseq {

enum class ProjectionMode { Naive, Compatible };

/// Shared read-only inputs of the post-processing pipeline.
struct PipelineInputs {
    const Mesh* mesh = nullptr;
    const PatchSet* patches = nullptr;
    const RTBasisTable* rt = nullptr;
    const DisplacementPressureField* field = nullptr;
    MaterialParams params;

    Mat2 stress_at(int tri, double b0, double b1, double b2) const {
        Mat2 F = field->deformation_gradient(tri, b0, b1, b2);
        double p = field->pressure(tri, b0, b1, b2);
        return piola_stress_pressure(F, p, params);
    }
};

/// Element-wise P2 load projection, stored in the centered monomial basis
/// {1, xi, eta, xi^2, xi*eta, eta^2} of each element (two rows of six).
struct ProjectedLoadField {
    const RTBasisTable* rt = nullptr;
    std::vector<Eigen::Matrix<double, 2, 6>> coeffs;

    Vec2 value(int tri, const Vec2& x) const;
    static ProjectedLoadField zero(const RTBasisTable& rt);
};

struct ProjectedStressField {
    std::vector<ElementP1Tensor> p1;
    BrokenRTStress rt; // the same field, interpolated into RT coefficients

    Mat2 value(int tri, const Vec2& x) const { return rt.value(tri, x); }
};

/// Component-wise, element-wise L2 projection of P(u_h, p_h) onto P1.
ElementP1Tensor naive_project_stress(const PipelineInputs& in, int tri);

/// Minimizer of ||fhat - f||_T over P2(T)^2 subject to
/// (fhat, rho phi_z)_T = (f, rho0 phi_z)_T for every rigid mode rho and
/// every interior patch center z covering the element; rho0 is the
/// undeformed counterpart of rho.
Eigen::Matrix<double, 2, 6> compatible_project_load(const PipelineInputs& in, int tri,
                                                    const VolumeLoad& f);

/// Full-mesh projections for the requested mode.
///
/// The compatible stress projection minimizes the element-wise distance to
/// P(u_h, p_h) subject to the moment conditions that make every interior
/// vertex-patch problem solvable: translation-mode conditions
/// (Phat - P, e_i w grad phi_z)_T = 0 per element (independent subset), and
/// the rotation-mode condition summed over each interior patch,
///   (Phat, rho3 w grad phi_z)_{omega_z}
///     = (P, grad(rho3_0 phi_z))_{omega_z} + <g, phi_z (rho3 - rho3_0)>_{Gamma_N},
/// whose boundary term cancels the plain surface-load moments of the local
/// systems through the Galerkin identity. The rotation condition cannot hold
/// element-wise: summed over the centers covering an element it would force
/// the integral of the antisymmetric part of P to vanish, which fails for a
/// first Piola-Kirchhoff stress.
ProjectedStressField project_stress(const PipelineInputs& in, ProjectionMode mode,
                                    const SurfaceLoad& g);
ProjectedLoadField project_load(const PipelineInputs& in, ProjectionMode mode,
                                const VolumeLoad& f);

/// Residuals of the enforced moment conditions of a projected stress:
/// largest per-element translation-mode residual and largest per-patch
/// rotation-mode residual, both relative to the local stress scale.
struct ProjectionResiduals {
    double element_translations = 0.0;
    double patch_rotation = 0.0;
    double worst() const { return std::max(element_translations, patch_rotation); }
};
ProjectionResiduals stress_constraint_residual(const PipelineInputs& in,
                                               const ProjectedStressField& stress,
                                               const SurfaceLoad& g);

} // namespace stresseq
