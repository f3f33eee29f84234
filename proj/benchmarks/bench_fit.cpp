#include <benchmark/benchmark.h>

#include "pem/arma.hpp"
#include "pem/estimator.hpp"
#include "pem/param_space.hpp"

static void BM_FitArma11(benchmark::State& state) {
    Eigen::VectorXd ar(1);
    ar << 0.5;
    Eigen::VectorXd ma(1);
    ma << 0.3;
    const pem::ArmaParams truth(ar, ma);
    const auto traj =
        pem::simulate(truth, pem::NoiseSpec::rademacher(1.0), state.range(0), 3);
    const pem::ParameterClass cls(2, 0.9);
    for (auto _ : state) {
        auto result = pem::fit(truth.order(), traj.outputs, cls);
        benchmark::DoNotOptimize(result);
    }
}
BENCHMARK(BM_FitArma11)->RangeMultiplier(4)->Range(256, 16384)->Unit(benchmark::kMillisecond);
