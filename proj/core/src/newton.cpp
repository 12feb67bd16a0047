// SPDX-License-Identifier: Apache-2.0
#include "stresseq/newton.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <deque>

namespace stresseq {

namespace {

// One Newton solve at a fixed load. Returns false on divergence.
bool newton_at_load(DisplacementPressureField& field, const MaterialParams& params,
                    const SurfaceLoad& load, double load_magnitude,
                    const NewtonOptions& options, NewtonLog::Step* step) {
    const double scale = 1.0 + std::abs(load_magnitude);
    const double target = options.tolerance * scale;
    const double accept = options.accept_tolerance * scale;

    double residual_norm = std::numeric_limits<double>::infinity();
    double best = residual_norm;
    DisplacementPressureField best_field = field;
    int stagnant = 0;

    for (int it = 0; it < options.max_iterations; ++it) {
        AssembledSystem sys = assemble_system(field, params, load, zero_volume_load());
        residual_norm = sys.residual.lpNorm<Eigen::Infinity>();
        if (step) {
            step->iterations = it;
            step->final_residual = residual_norm;
        }
        if (options.verbose)
            std::fprintf(stderr, "    newton it %d |R|_inf = %.3e\n", it, residual_norm);
        if (!std::isfinite(residual_norm)) return false;
        if (residual_norm <= target) return true;

        if (residual_norm < best) {
            stagnant = (residual_norm > 0.5 * best) ? stagnant + 1 : 0;
            best = residual_norm;
            best_field = field;
        } else {
            ++stagnant;
        }
        // At the roundoff floor further steps stop improving; accept if the
        // floor is below the accept tolerance.
        if (stagnant >= 2) {
            field = best_field;
            if (step) step->final_residual = best;
            return best <= accept;
        }

        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(sys.tangent);
        if (lu.info() != Eigen::Success)
            throw Error("LINEAR_SOLVE_FAILED", "sparse LU factorization failed");
        Eigen::VectorXd delta = lu.solve(-sys.residual);
        if (lu.info() != Eigen::Success)
            throw Error("LINEAR_SOLVE_FAILED", "sparse LU back substitution failed");

        // Damp the update until det F stays positive.
        double alpha = 1.0;
        int nu = field.space->num_displacement_dofs();
        DisplacementPressureField trial = field;
        for (int damp = 0; damp < 10; ++damp) {
            trial.u = field.u + alpha * delta.head(nu);
            trial.p = field.p + alpha * delta.tail(field.space->num_pressure_dofs());
            if (min_det_f(trial) > 1e-8) break;
            alpha *= 0.5;
        }
        field = trial;
    }
    if (residual_norm <= accept) return true;
    return false;
}

} // namespace

DisplacementPressureField solve_newton_loadpath(
    const TaylorHoodSpace& space, const MaterialParams& params,
    const std::function<SurfaceLoad(double)>& load_at, double load_scale,
    const NewtonOptions& options, NewtonLog* log) {
    DisplacementPressureField field = DisplacementPressureField::zero(space);

    std::deque<double> targets;
    for (int k = 1; k <= options.load_steps; ++k) {
        targets.push_back(static_cast<double>(k) / options.load_steps);
    }

    double reached = 0.0;
    int bisections = 0;
    std::vector<double> residual_history;
    while (!targets.empty()) {
        double t = targets.front();
        DisplacementPressureField saved = field;
        NewtonLog::Step step{t * load_scale, 0, 0.0};
        bool ok = newton_at_load(field, params, load_at(t), t * load_scale, options, &step);
        if (log) log->steps.push_back(step);
        residual_history.push_back(step.final_residual);
        if (ok) {
            reached = t;
            targets.pop_front();
            continue;
        }
        if (++bisections > options.max_bisections) {
            std::string hist;
            for (double r : residual_history) hist += " " + std::to_string(r);
            throw Error("NEWTON_DIVERGED", "residual history:" + hist);
        }
        field = saved;
        targets.push_front(0.5 * (reached + t));
    }
    return field;
}

DisplacementPressureField solve_newton(const TaylorHoodSpace& space, const MaterialParams& params,
                                       double gamma, const NewtonOptions& options,
                                       NewtonLog* log) {
    auto load_at = [gamma](double t) { return cook_surface_load(t * gamma); };
    return solve_newton_loadpath(space, params, load_at, gamma, options, log);
}

} // namespace stresseq
