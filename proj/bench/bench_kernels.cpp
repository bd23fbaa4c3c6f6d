// Serial reference vs OpenMP driver for the hot kernels on the acceptance grid.
// Argument 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include <cmath>

#include "vpfp/diagnostics.hpp"
#include "vpfp/kinetic.hpp"
#include "vpfp/sde.hpp"

using namespace vpfp;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

struct Setup {
    std::shared_ptr<const PhaseSpace> space = build_grids(1.0, 128, 8.0, 256);
    InitialData init = initial_data(InitSpec{}, space);
    FieldPair field = field_from_density(init.rho0, init.rho_i);
};

const Setup& setup()
{
    static const Setup s;
    return s;
}

void label(benchmark::State& st)
{
    st.SetLabel(st.range(0) ? "openmp x" + std::to_string(max_threads()) : "serial");
}

}  // namespace

static void BM_Collision(benchmark::State& st)
{
    const auto& s = setup();
    for (auto _ : st) benchmark::DoNotOptimize(fokker_planck_step(s.init.f0, 1e-3, 0.1, exec_of(st)));
    label(st);
}
BENCHMARK(BM_Collision)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_Transport(benchmark::State& st)
{
    const auto& s = setup();
    for (auto _ : st) benchmark::DoNotOptimize(transport_step(s.init.f0, 1e-3, 0.1, exec_of(st)));
    label(st);
}
BENCHMARK(BM_Transport)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_Acceleration(benchmark::State& st)
{
    const auto& s = setup();
    for (auto _ : st) benchmark::DoNotOptimize(acceleration_step(s.init.f0, s.field, 1e-3, 0.1, exec_of(st)));
    label(st);
}
BENCHMARK(BM_Acceleration)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_StrangStep(benchmark::State& st)
{
    const auto& s = setup();
    const KineticState state = make_kinetic_state(s.init.f0, s.init.rho_i, 0.1);
    for (auto _ : st) benchmark::DoNotOptimize(step_vpfp(state, 1e-3, s.init.rho_i, exec_of(st)));
    label(st);
}
BENCHMARK(BM_StrangStep)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_ShiftedMarginal(benchmark::State& st)
{
    const auto& s = setup();
    for (auto _ : st) benchmark::DoNotOptimize(shifted_marginal(s.init.f0, 0.1, exec_of(st)));
    label(st);
}
BENCHMARK(BM_ShiftedMarginal)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_Particles(benchmark::State& st)
{
    auto ens = sample_local_equilibrium(CosineSeries{1.0, {0.5}}, 1.0, 100000, 0.2, 1);
    SpatialField e(SpatialGrid{1.0, 128}, 0.0);
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = 0.08 * std::sin(2 * 3.14159265358979 * e.grid().node(j));
    for (auto _ : st) ens.step(e, 4e-4, exec_of(st));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(ens.size()));
    label(st);
}
BENCHMARK(BM_Particles)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
