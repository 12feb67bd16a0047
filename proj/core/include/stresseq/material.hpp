// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/types.hpp"

#include <limits>

namespace stresseq {

/// Neo-Hookean parameters. lambda may be infinite (incompressible limit);
/// the pressure form of the stress and the saddle-point system then drop
/// their 1/lambda terms.
struct MaterialParams {
    double mu = 1.0;
    double lambda = std::numeric_limits<double>::infinity();

    bool incompressible() const { return std::isinf(lambda); }
    double inv_lambda() const { return incompressible() ? 0.0 : 1.0 / lambda; }
};

/// Per-quadrature-point kinematics derived from the deformation gradient.
struct KinematicState {
    Mat2 F;
    Mat2 F_inv_T;
    double det_F;

    static KinematicState from_F(const Mat2& F, int element_hint = -1);

    Mat2 left_cauchy_green() const { return F * F.transpose(); }
};

/// Stored energy psi_NH(B); requires finite lambda and det B > 0.
double energy_nh(const Mat2& B, const MaterialParams& params);

/// First Piola-Kirchhoff stress in terms of F alone (finite lambda):
/// P = mu F + (lambda/2 (det B - 1) - mu) F^{-T}.
Mat2 piola_stress(const Mat2& F, const MaterialParams& params);

/// Pressure form: P = mu F + (p (1 + p/(2 lambda)) - mu) F^{-T}; the
/// p^2/(2 lambda) term vanishes in the incompressible limit.
Mat2 piola_stress_pressure(const Mat2& F, double p, const MaterialParams& params);

/// Directional derivative of piola_stress_pressure at (F, p) in direction
/// (dH, dp) where dH is the increment of grad(u).
Mat2 piola_stress_tangent(const KinematicState& k, double p, double dp, const Mat2& dH,
                          const MaterialParams& params);

} // namespace stresseq
