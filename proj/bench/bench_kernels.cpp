// Serial reference vs OpenMP kernels, plus the independent-work-item loops.
#include "sn/chebyshev.hpp"
#include "sn/kernels.hpp"
#include "sn/stationary.hpp"
#include "sn/verify.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

namespace {

using namespace sn;

template <Eigen::MatrixXd (*F)(const Eigen::VectorXd&)>
void BM_DiffMatrix(benchmark::State& st) {
  const Eigen::VectorXd x = chebyshev_points(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(F(x));
}
BENCHMARK_TEMPLATE(BM_DiffMatrix, kernels::serial::differentiation_matrix)->Arg(60)->Arg(200)->Arg(800);
BENCHMARK_TEMPLATE(BM_DiffMatrix, kernels::omp::differentiation_matrix)->Arg(60)->Arg(200)->Arg(800);

template <Eigen::VectorXd (*F)(int)>
void BM_Weights(benchmark::State& st) {
  const int N = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(F(N));
}
BENCHMARK_TEMPLATE(BM_Weights, kernels::serial::clenshaw_curtis_weights)->Arg(60)->Arg(800);
BENCHMARK_TEMPLATE(BM_Weights, kernels::omp::clenshaw_curtis_weights)->Arg(60)->Arg(800);

template <double (*F)(std::span<const double>, std::span<const double>)>
void BM_Trapezoid(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::vector<double> g(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = 1e-4 * static_cast<double>(i);
    v[i] = std::exp(-g[i]) * g[i] * g[i];
  }
  for (auto _ : st) benchmark::DoNotOptimize(F(g, v));
}
BENCHMARK_TEMPLATE(BM_Trapezoid, kernels::serial::trapezoid)->Arg(100001)->Arg(1000001);
BENCHMARK_TEMPLATE(BM_Trapezoid, kernels::omp::trapezoid)->Arg(100001)->Arg(1000001);

template <Eigen::MatrixXd (*F)(const Eigen::MatrixXd&, const Eigen::MatrixXd&)>
void BM_Matmul(benchmark::State& st) {
  const auto n = static_cast<Eigen::Index>(st.range(0));
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(n, n), b = Eigen::MatrixXd::Random(n, n);
  for (auto _ : st) benchmark::DoNotOptimize(F(a, b));
}
BENCHMARK_TEMPLATE(BM_Matmul, kernels::serial::matmul)->Arg(61)->Arg(161)->Arg(401);
BENCHMARK_TEMPLATE(BM_Matmul, kernels::omp::matmul)->Arg(61)->Arg(161)->Arg(401);

// Work-item parallelism: shooting several states at once.
void BM_SpectrumTable(benchmark::State& st) {
  const auto exec = st.range(0) ? Execution::Parallel : Execution::Serial;
  for (auto _ : st) benchmark::DoNotOptimize(spectrum_table(5, exec));
  st.SetLabel(st.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_SpectrumTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(2);

void BM_MismatchScan(benchmark::State& st) {
  const auto exec = st.range(0) ? Execution::Parallel : Execution::Serial;
  const StationaryState s = shoot(0);
  std::vector<cplx> scan;
  for (int k = 0; k < 8; ++k) scan.push_back(cplx(0.0, 0.03 + 0.005 * k));
  for (auto _ : st) benchmark::DoNotOptimize(mismatch_scan(scan, s, 150.0, {}, exec));
  st.SetLabel(st.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_MismatchScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
