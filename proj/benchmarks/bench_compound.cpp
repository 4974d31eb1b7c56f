#include <benchmark/benchmark.h>

#include <Eigen/Dense>
#include <random>

#include "kcontract/compound.hpp"
#include "kcontract/measures.hpp"

namespace {

Eigen::MatrixXd random_matrix(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = dist(rng);
    return M;
}

void bench_add_compound(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int k = static_cast<int>(state.range(1));
    const Eigen::MatrixXd A = random_matrix(n, 42);
    for (auto _ : state) benchmark::DoNotOptimize(kcontract::add_compound(A, k));
}
BENCHMARK(bench_add_compound)
    ->Args({4, 2})
    ->Args({8, 2})
    ->Args({8, 4})
    ->Args({12, 2})
    ->Args({16, 2});

void bench_mult_compound(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int k = static_cast<int>(state.range(1));
    const Eigen::MatrixXd A = random_matrix(n, 7);
    for (auto _ : state) benchmark::DoNotOptimize(kcontract::mult_compound(A, k));
}
BENCHMARK(bench_mult_compound)->Args({4, 2})->Args({8, 2})->Args({8, 4})->Args({12, 3});

void bench_measure_second_compound_closed_form(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXd A = random_matrix(n, 99);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            kcontract::measure_of_second_compound(A, kcontract::Norm::Inf));
}
BENCHMARK(bench_measure_second_compound_closed_form)->Arg(4)->Arg(8)->Arg(16);

void bench_measure_second_compound_materialized(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Eigen::MatrixXd A = random_matrix(n, 99);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            kcontract::measure(kcontract::add_compound(A, 2), kcontract::Norm::Inf));
}
BENCHMARK(bench_measure_second_compound_materialized)->Arg(4)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
