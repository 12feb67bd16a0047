// SPDX-License-Identifier: Apache-2.0
#include "stresseq/rigid_modes.hpp"

namespace stresseq {

Vec2 RigidMode::deformed(const DisplacementPressureField& field, int tri, double b0, double b1,
                         double b2) const {
    Vec2 out = translation;
    if (theta != 0.0) {
        Vec2 x = field.space->mesh().point(tri, b0, b1, b2);
        Vec2 u = field.displacement(tri, b0, b1, b2);
        out.x() += theta * (x.y() + u.y());
        out.y() -= theta * (x.x() + u.x());
    }
    return out;
}

Mat2 RigidMode::deformed_gradient(const DisplacementPressureField& field, int tri, double b0,
                                  double b1, double b2) const {
    if (theta == 0.0) return Mat2::Zero();
    Mat2 F = field.deformation_gradient(tri, b0, b1, b2);
    return skew_j(theta) * F;
}

Vec2 RigidMode::undeformed(const Vec2& x) const {
    return translation + theta * Vec2(x.y(), -x.x());
}

std::array<RigidMode, 3> rigid_mode_basis() {
    return {
        RigidMode{Vec2(1.0, 0.0), 0.0},
        RigidMode{Vec2(0.0, 1.0), 0.0},
        RigidMode{Vec2(0.0, 0.0), 1.0},
    };
}

} // namespace stresseq
