// SPDX-License-Identifier: Apache-2.0
#include "stresseq/diagnostics.hpp"
#include "stresseq/newton.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <memory>

using namespace stresseq;

namespace {

struct Fixture {
    Mesh mesh;
    TaylorHoodSpace space;
    PatchSet patches;
    RTBasisTable rt;
    MaterialParams params{1.0};
    DisplacementPressureField field;

    explicit Fixture(int level)
        : mesh(build_cook_mesh(level)),
          space(mesh),
          patches(build_patches(mesh)),
          rt(mesh),
          field(solve_newton(space, params, 0.2)) {}

    PipelineInputs inputs() { return {&mesh, &patches, &rt, &field, params}; }
};

Fixture& fixture(int level) {
    static std::map<int, std::unique_ptr<Fixture>> cache;
    auto it = cache.find(level);
    if (it == cache.end()) it = cache.emplace(level, std::make_unique<Fixture>(level)).first;
    return *it->second;
}

void BM_AssembleTangent(benchmark::State& state) {
    Fixture& f = fixture(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        AssembledSystem sys =
            assemble_system(f.field, f.params, cook_surface_load(0.2), zero_volume_load());
        benchmark::DoNotOptimize(sys.residual.norm());
    }
}
BENCHMARK(BM_AssembleTangent)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_ProjectStressCompatible(benchmark::State& state) {
    Fixture& f = fixture(static_cast<int>(state.range(0)));
    PipelineInputs in = f.inputs();
    for (auto _ : state) {
        ProjectedStressField s =
            project_stress(in, ProjectionMode::Compatible, cook_surface_load(0.2));
        benchmark::DoNotOptimize(s.rt.coef.norm());
    }
}
BENCHMARK(BM_ProjectStressCompatible)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_PatchSolve(benchmark::State& state) {
    Fixture& f = fixture(3);
    PipelineInputs in = f.inputs();
    SurfaceLoad g = cook_surface_load(0.2);
    ProjectedStressField stress = project_stress(in, ProjectionMode::Compatible, g);
    ProjectedLoadField load = project_load(in, ProjectionMode::Compatible, zero_volume_load());
    const VertexPatch* patch = nullptr;
    for (const VertexPatch& p : f.patches.patches) {
        if (p.kind == PatchKind::Interior && p.elements.size() == 6) patch = &p;
    }
    for (auto _ : state) {
        LocalSystem sys = build_local_system(in, *patch, stress, load, g);
        PatchSolution sol = solve_patch(sys);
        benchmark::DoNotOptimize(sol.solution.x.norm());
    }
}
BENCHMARK(BM_PatchSolve)->Unit(benchmark::kMicrosecond);

void BM_Equilibrate(benchmark::State& state) {
    Fixture& f = fixture(static_cast<int>(state.range(0)));
    PipelineInputs in = f.inputs();
    for (auto _ : state) {
        EquilibrationResult eq = equilibrate(in, cook_surface_load(0.2), zero_volume_load());
        benchmark::DoNotOptimize(eq.reconstruction.coef.norm());
    }
}
BENCHMARK(BM_Equilibrate)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
