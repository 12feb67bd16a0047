// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/material.hpp"
#include "stresseq/taylor_hood.hpp"

#include <Eigen/SparseCore>

#include <functional>

namespace stresseq {

/// Surface traction on Gamma_N in the reference configuration.
using SurfaceLoad = std::function<Vec2(const Vec2&)>;

/// Volume load; the benchmark uses zero.
using VolumeLoad = std::function<Vec2(const Vec2&)>;

inline SurfaceLoad zero_surface_load() {
    return [](const Vec2&) { return Vec2::Zero(); };
}
inline VolumeLoad zero_volume_load() {
    return [](const Vec2&) { return Vec2::Zero(); };
}

/// Vertical traction g = (0, gamma) on the right segment x = 0.48 of the
/// Cook geometry, zero on the traction-free parts.
SurfaceLoad cook_surface_load(double gamma);

struct AssembledSystem {
    Eigen::VectorXd residual;
    Eigen::SparseMatrix<double> tangent;
};

/// Residual of the discrete saddle-point problem. With apply_dirichlet the
/// constrained rows are replaced by the (homogeneous) boundary values.
Eigen::VectorXd assemble_residual(const DisplacementPressureField& field,
                                  const MaterialParams& params, const SurfaceLoad& load,
                                  const VolumeLoad& volume_load, bool apply_dirichlet);

/// Residual plus analytic tangent (Gateaux derivative), Dirichlet rows and
/// columns replaced by the identity.
AssembledSystem assemble_system(const DisplacementPressureField& field,
                                const MaterialParams& params, const SurfaceLoad& load,
                                const VolumeLoad& volume_load);

/// Smallest det F over the material quadrature points of all elements.
double min_det_f(const DisplacementPressureField& field);

/// Barycentric coordinates of a physical point with respect to a triangle.
std::array<double, 3> barycentric(const Mesh& mesh, int tri, const Vec2& x);

} // namespace stresseq
