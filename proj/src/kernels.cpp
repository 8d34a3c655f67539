#include "sn/kernels.hpp"

#include <cmath>
#include <numbers>

namespace sn::kernels {

namespace {

inline double node_weight(int k, int N) {
  const double c = (k == 0 || k == N) ? 2.0 : 1.0;
  return (k % 2 == 0) ? c : -c;
}

// Row k of the Clenshaw-Curtis weights (Trefethen's clencurt).
inline double cc_weight(int k, int N) {
  const double pi = std::numbers::pi;
  if (k == 0 || k == N) return (N % 2 == 0) ? 1.0 / (double(N) * N - 1.0) : 1.0 / (double(N) * N);
  const double theta = pi * k / N;
  double v = 1.0;
  if (N % 2 == 0) {
    for (int j = 1; j < N / 2; ++j) v -= 2.0 * std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
    v -= std::cos(N * theta) / (double(N) * N - 1.0);
  } else {
    for (int j = 1; j <= (N - 1) / 2; ++j) v -= 2.0 * std::cos(2.0 * j * theta) / (4.0 * j * j - 1.0);
  }
  return 2.0 * v / N;
}

inline void fill_row(const Eigen::VectorXd& x, int N, int i, Eigen::MatrixXd& D) {
  const double ci = node_weight(i, N);
  double sum = 0.0;
  for (int j = 0; j <= N; ++j) {
    if (j == i) continue;
    const double v = ci / node_weight(j, N) / (x(i) - x(j));
    D(i, j) = v;
    sum += v;
  }
  D(i, i) = -sum;
}

}  // namespace

namespace serial {

Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& x) {
  const int N = static_cast<int>(x.size()) - 1;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) fill_row(x, N, i, D);
  return D;
}

Eigen::VectorXd clenshaw_curtis_weights(int N) {
  Eigen::VectorXd w(N + 1);
  for (int k = 0; k <= N; ++k) w(k) = cc_weight(k, N);
  return w;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    s += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return s;
}

Eigen::MatrixXd matmul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  for (Eigen::Index j = 0; j < b.cols(); ++j)
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, j) += a(i, k) * bkj;
    }
  return out;
}

}  // namespace serial

namespace omp {

Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& x) {
  const int N = static_cast<int>(x.size()) - 1;
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N + 1, N + 1);
#pragma omp parallel for schedule(static)
  for (int i = 0; i <= N; ++i) fill_row(x, N, i, D);
  return D;
}

Eigen::VectorXd clenshaw_curtis_weights(int N) {
  Eigen::VectorXd w(N + 1);
#pragma omp parallel for schedule(static)
  for (int k = 0; k <= N; ++k) w(k) = cc_weight(k, N);
  return w;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  double s = 0.0;
#pragma omp parallel for reduction(+ : s) schedule(static)
  for (std::ptrdiff_t i = 1; i < n; ++i)
    s += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return s;
}

Eigen::MatrixXd matmul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  const auto cols = static_cast<std::ptrdiff_t>(b.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < cols; ++j)
    for (Eigen::Index k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, j) += a(i, k) * bkj;
    }
  return out;
}

}  // namespace omp
}  // namespace sn::kernels
