// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stresseq/local_system.hpp"

namespace stresseq {

struct EquilibrationOptions {
    ProjectionMode mode = ProjectionMode::Compatible;
    TestSpaceVariant variant = TestSpaceVariant::Deformed;
    bool allow_incompatible = false; // let incompatible patch data be range-projected
};

struct EquilibrationResult {
    ProjectedStressField projected;   // Phat
    ProjectedLoadField projected_load; // fhat
    BrokenRTStress correction;        // sum of patch corrections
    BrokenRTStress reconstruction;    // P_h^R = Phat + correction

    int patches_solved = 0;
    double max_constraint_residual = 0.0; // relative, over patches
    double max_incompatibility = 0.0;     // relative distance of b from range(C)
};

/// Full post-processing pass: project the stress (and load), assemble and
/// solve every vertex-patch problem, and accumulate the corrections in
/// ascending patch-center order.
EquilibrationResult equilibrate(const PipelineInputs& in, const SurfaceLoad& g,
                                const VolumeLoad& f, const EquilibrationOptions& options = {});

} // namespace stresseq
