#include <benchmark/benchmark.h>

#include "qbt/metrology.hpp"
#include "qbt/special_functions.hpp"
#include "qbt/star_oracle.hpp"
#include "qbt/steady_state.hpp"

namespace {

void BM_Digamma(benchmark::State& state) {
    qbt::Complex z{0.37, 12.5};
    for (auto _ : state) {
        benchmark::DoNotOptimize(qbt::digamma(z));
        z += qbt::Complex(1e-7, 0.0);
    }
}
BENCHMARK(BM_Digamma);

void BM_CovarianceNumeric(benchmark::State& state) {
    const auto model = qbt::SpectralModel::lorentz_drude(1.0, 100.0);
    for (auto _ : state) benchmark::DoNotOptimize(qbt::covariance_numeric(model, {1.0}, 0.1));
}
BENCHMARK(BM_CovarianceNumeric)->Unit(benchmark::kMillisecond);

void BM_CovarianceAnalytic(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(qbt::covariance_analytic_ld(1.0, 100.0, {1.0}, 0.1));
}
BENCHMARK(BM_CovarianceAnalytic);

void BM_QfiFromFidelity(benchmark::State& state) {
    const qbt::SteadyStateSolver solver(qbt::SpectralModel::lorentz_drude(1.0, 100.0), {1.0});
    for (auto _ : state) benchmark::DoNotOptimize(qbt::qfi_from_fidelity(solver, 0.05));
}
BENCHMARK(BM_QfiFromFidelity)->Unit(benchmark::kMillisecond);

void BM_NormalModes(benchmark::State& state) {
    const auto star = qbt::discretize_bath(qbt::SpectralModel::lorentz_drude(1.0, 100.0),
                                           static_cast<int>(state.range(0)), 2000.0);
    for (auto _ : state) benchmark::DoNotOptimize(qbt::normal_modes(star));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NormalModes)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond)->Complexity();

}  // namespace
BENCHMARK_MAIN();
