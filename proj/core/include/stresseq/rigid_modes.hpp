// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/taylor_hood.hpp"

namespace stresseq {

/// Rigid body modes of the configuration deformed by x + u_h: translations
/// plus the rotation (x2 + u2, -(x1 + u1)). The rotational mode pairs with
/// the constant multiplier theta = 1 through J(theta) F(u_h) = grad(rho).
/// Composing a mode with the inverse deformation map gives the undeformed
/// mode with the same coefficients, which is what the compatibility
/// right-hand sides integrate against.
struct RigidMode {
    Vec2 translation = Vec2::Zero();
    double theta = 0.0; // rotation coefficient

    /// Mode evaluated in the deformed configuration ("rho").
    Vec2 deformed(const DisplacementPressureField& field, int tri, double b0, double b1,
                  double b2) const;

    /// Gradient of the deformed mode, equal to J(theta) F(u_h).
    Mat2 deformed_gradient(const DisplacementPressureField& field, int tri, double b0, double b1,
                           double b2) const;

    /// The composed mode rho(phi^{-1}(x)) = translation + theta (x2, -x1).
    Vec2 undeformed(const Vec2& x) const;
    Mat2 undeformed_gradient() const { return skew_j(theta); }
};

/// The three generator modes: two translations and the deformed rotation.
std::array<RigidMode, 3> rigid_mode_basis();

} // namespace stresseq
