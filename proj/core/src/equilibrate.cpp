// SPDX-License-Identifier: Apache-2.0
#include "stresseq/equilibrate.hpp"

namespace stresseq {

EquilibrationResult equilibrate(const PipelineInputs& in, const SurfaceLoad& g,
                                const VolumeLoad& f, const EquilibrationOptions& options) {
    EquilibrationResult out;
    out.projected = project_stress(in, options.mode, g);
    out.projected_load = project_load(in, options.mode, f);
    out.correction = BrokenRTStress::zero(*in.rt);

    for (const VertexPatch& patch : in.patches->patches) {
        LocalSystem sys = build_local_system(in, patch, out.projected, out.projected_load, g,
                                             options.variant);
        PatchSolution sol = solve_patch(sys, options.allow_incompatible);
        accumulate_correction(sys, sol.solution.x, out.correction);
        ++out.patches_solved;
        out.max_constraint_residual =
            std::max(out.max_constraint_residual, sol.constraint_residual);
        double b_norm = sys.b.norm();
        if (b_norm > 0.0) {
            out.max_incompatibility =
                std::max(out.max_incompatibility, sol.solution.incompatibility / b_norm);
        }
    }

    out.reconstruction = out.projected.rt;
    out.reconstruction += out.correction;
    return out;
}

} // namespace stresseq
