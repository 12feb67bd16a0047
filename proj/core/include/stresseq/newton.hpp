// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/assembly.hpp"

#include <vector>

namespace stresseq {

struct NewtonOptions {
    int load_steps = 4;
    int max_iterations = 30;
    int max_bisections = 3;
    // Target residual sup-norm, relative to 1 + load. The driver iterates to
    // `tolerance` (the downstream patch compatibility rides on the Galerkin
    // identity, so the residual should sit at the roundoff floor) and treats
    // `accept_tolerance` as the converged/diverged boundary when the
    // iteration stagnates above the target.
    double tolerance = 1e-13;
    double accept_tolerance = 1e-10;
    bool verbose = false;
};

struct NewtonLog {
    struct Step {
        double load;
        int iterations;
        double final_residual;
    };
    std::vector<Step> steps;
};

/// Solves the discrete saddle-point problem for the Cook load (0, gamma) on
/// the right segment by incremental loading with Newton iterations. The step
/// is damped whenever it would drive det F below 1e-8 at a quadrature point;
/// on divergence the load increment is bisected (up to max_bisections).
DisplacementPressureField solve_newton(const TaylorHoodSpace& space, const MaterialParams& params,
                                       double gamma, const NewtonOptions& options = {},
                                       NewtonLog* log = nullptr);

/// Same driver with a caller-supplied load parameterization: the surface
/// load used at load factor t is load_at(t), t ending at 1.
DisplacementPressureField solve_newton_loadpath(
    const TaylorHoodSpace& space, const MaterialParams& params,
    const std::function<SurfaceLoad(double)>& load_at, double load_scale,
    const NewtonOptions& options = {}, NewtonLog* log = nullptr);

} // namespace stresseq
