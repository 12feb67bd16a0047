// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/equilibrate.hpp"

namespace stresseq {

/// Resultant force of the normal trace over a boundary part: sum over the
/// part's edges of the exact integral of P.n (traces are piecewise P1).
Vec2 resultant_traction(const BrokenRTStress& stress, BoundaryLabel part);

/// I_{D,n} = integral over Gamma_D of n.(P.n).
double resultant_normal_traction(const BrokenRTStress& stress);

/// Same functionals for a projected (element-wise P1, discontinuous) stress,
/// using the trace of the adjacent element on each boundary edge.
Vec2 resultant_traction_projected(const PipelineInputs& in, const ProjectedStressField& stress,
                                  BoundaryLabel part);
double resultant_normal_traction_projected(const PipelineInputs& in,
                                           const ProjectedStressField& stress);

/// Piecewise affine n.(P.n) profile along Gamma_D, ordered by arc length;
/// two samples per edge (edge endpoints).
struct TractionProfile {
    struct Sample {
        double arclength;
        double value;
    };
    std::vector<Sample> samples;

    /// Integral of the piecewise affine profile (trapezoid per edge).
    double integral() const;
};

TractionProfile traction_profile(const BrokenRTStress& stress);
TractionProfile traction_profile_projected(const PipelineInputs& in,
                                           const ProjectedStressField& stress);

/// Vector-valued boundary data on Gamma_D given by values at edge quadrature
/// nodes; represents the functional v -> sum over edges of int s.v ds.
struct BoundaryFunctional {
    struct EdgeData {
        int edge_id;
        std::vector<Vec2> values; // one per quadrature node of segment_rule
    };
    std::vector<EdgeData> edges;
};

/// Approximate H^{-1/2}(Gamma_D) norm via the Riesz lift: solve
/// (grad w, grad v) + (w, v) = <s, v> over the scalar P2 space per
/// component and return sqrt(<s, w>).
double hminus_half_norm(const TaylorHoodSpace& space, const BoundaryFunctional& s);

/// Gamma_D traces of the reconstructed stress on the fine mesh minus the
/// coarse-mesh reconstruction evaluated at the same physical points. The
/// coarse mesh must be the fine mesh's uniform-refinement parent.
BoundaryFunctional traction_difference_reconstructed(const BrokenRTStress& fine,
                                                     const BrokenRTStress& coarse);

/// Same differencing for the raw material stress P(u_h, p_h).n.
BoundaryFunctional traction_difference_material(const PipelineInputs& fine,
                                                const PipelineInputs& coarse);

/// Residual families of the reconstruction (all relative to the problem
/// scale 1 + ||Phat||_L2): element-wise divergence tests, interior side
/// jump moments, Neumann trace moments against the side test space (load
/// moments taken with the same pullback used in assembly), and the global
/// weak-symmetry functionals.
struct AuditReport {
    double element_divergence = 0.0;
    double side_jumps = 0.0;
    double neumann_trace = 0.0;
    double weak_symmetry = 0.0;
    double scale = 1.0;

    double worst() const;
    bool pass(double tol) const { return worst() <= tol; }
};

AuditReport momentum_and_symmetry_audit(const PipelineInputs& in, const EquilibrationResult& eq,
                                        const SurfaceLoad& g,
                                        TestSpaceVariant variant = TestSpaceVariant::Deformed);

} // namespace stresseq
