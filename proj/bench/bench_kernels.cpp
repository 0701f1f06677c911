// Serial reference vs OpenMP kernels on the 6-spin hexagon.

#include <benchmark/benchmark.h>

#include "mqspin/hamiltonians.hpp"
#include "mqspin/kernels.hpp"
#include "mqspin/observables.hpp"

namespace {

using namespace mqspin;

struct Setup {
    ZeemanBasis basis = build_basis(6);
    EigenSystem es = diagonalize(dq_hamiltonian(hexagon_couplings(1.0), basis));
    DensityMatrix rho0 = thermal_state(basis);
    std::vector<Observable> obs = parse_observables("Fall,diag_pair", basis, rho0.purity());
    RVector iz = collective_op(basis, SpinComponent::z).matrix.diagonal().real();
};

const Setup& setup() {
    static const Setup s;
    return s;
}

std::vector<double> phases(std::int64_t points) {
    std::vector<double> p(static_cast<std::size_t>(points));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 0.001 * static_cast<double>(i);
    return p;
}

template <auto Kernel>
void grid(benchmark::State& state) {
    const Setup& s = setup();
    const auto ph = phases(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(s.es, s.rho0.matrix(), ph, s.obs));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void cycle(benchmark::State& state) {
    const Setup& s = setup();
    const DensityMatrix rho = evolve(s.rho0, s.es, 0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(Kernel(rho.matrix(), s.iz, 6, static_cast<int>(state.range(0))));
    }
}

}  // namespace

BENCHMARK(grid<mqspin::kernels::evaluate_grid_serial>)->Arg(250)->Arg(2001)->Unit(benchmark::kMillisecond);
BENCHMARK(grid<mqspin::kernels::evaluate_grid_parallel>)->Arg(250)->Arg(2001)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(cycle<mqspin::kernels::phase_cycle_serial>)->Arg(14)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(cycle<mqspin::kernels::phase_cycle_parallel>)->Arg(14)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
