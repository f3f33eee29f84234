#include <benchmark/benchmark.h>

#include "pem/theory.hpp"

static void BM_DependencyMatrix(benchmark::State& state) {
    Eigen::MatrixXd P(2, 2);
    P << 0.7, 0.3, 0.3, 0.7;
    Eigen::VectorXd initial(2);
    initial << 0.5, 0.5;
    for (auto _ : state) {
        auto dep = pem::dependency_matrix_markov(P, initial, state.range(0));
        benchmark::DoNotOptimize(dep);
    }
}
BENCHMARK(BM_DependencyMatrix)->RangeMultiplier(2)->Range(32, 512)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
