#include <benchmark/benchmark.h>

#include "pem/arma.hpp"
#include "pem/noise.hpp"

static void BM_PredictSequence(benchmark::State& state) {
    Eigen::VectorXd ar(1);
    ar << 0.5;
    Eigen::VectorXd ma(1);
    ma << 0.3;
    const pem::ArmaParams params(ar, ma);
    const auto traj =
        pem::simulate(params, pem::NoiseSpec::rademacher(1.0), state.range(0), 1);
    for (auto _ : state) {
        auto yhat = pem::predict_sequence(params, traj.outputs);
        benchmark::DoNotOptimize(yhat);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PredictSequence)->RangeMultiplier(4)->Range(256, 65536);

static void BM_PredictGradients(benchmark::State& state) {
    Eigen::VectorXd ar(2);
    ar << 0.4, -0.2;
    Eigen::VectorXd ma(2);
    ma << 0.3, 0.1;
    const pem::ArmaParams params(ar, ma);
    const auto traj =
        pem::simulate(params, pem::NoiseSpec::rademacher(1.0), state.range(0), 2);
    for (auto _ : state) {
        auto grad = pem::predict_gradients(params, traj.outputs);
        benchmark::DoNotOptimize(grad);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PredictGradients)->RangeMultiplier(4)->Range(256, 16384);
