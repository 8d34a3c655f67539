#include "sn/chebyshev.hpp"

#include "sn/errors.hpp"
#include "sn/kernels.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sn {

Eigen::VectorXd chebyshev_points(int N) {
  if (N < 1) throw GridTooSmall("chebyshev_points: N must be at least 1");
  Eigen::VectorXd x(N + 1);
  for (int k = 0; k <= N; ++k) x(k) = std::cos(std::numbers::pi * k / N);
  // exact zeros and symmetry where cos rounds
  for (int k = 0; 2 * k < N; ++k) {
    x(N - k) = -x(k);
  }
  if (N % 2 == 0) x(N / 2) = 0.0;
  return x;
}

Eigen::MatrixXd differentiation_matrix(int N, Execution exec) {
  const Eigen::VectorXd x = chebyshev_points(N);
  return exec == Execution::Serial ? kernels::serial::differentiation_matrix(x)
                                   : kernels::omp::differentiation_matrix(x);
}

ChebyshevGrid build_grid(int N, double L, Execution exec) {
  if (N < 2) throw GridTooSmall("build_grid: N must be at least 2");
  if (!(L > 0.0)) throw Error("build_grid: L must be positive");
  ChebyshevGrid g;
  g.N = N;
  g.L = L;
  g.x = chebyshev_points(N);
  g.r = (L / 2.0) * (g.x.array() + 1.0);
  const bool serial = exec == Execution::Serial;
  g.D = serial ? kernels::serial::differentiation_matrix(g.x) : kernels::omp::differentiation_matrix(g.x);
  const double s = 2.0 / L;
  g.D2 = (s * s) * (serial ? kernels::serial::matmul(g.D, g.D) : kernels::omp::matmul(g.D, g.D));
  g.D2_trimmed = g.D2.block(1, 1, N - 1, N - 1);
  g.w = serial ? kernels::serial::clenshaw_curtis_weights(N) : kernels::omp::clenshaw_curtis_weights(N);
  return g;
}

Eigen::VectorXd resample(const RadialProfile& p, const ChebyshevGrid& grid) {
  Eigen::VectorXd out(grid.N - 1);
  for (int k = 1; k < grid.N; ++k) {
    const double r = grid.r(k);
    if (!p.covers(r)) {
      std::ostringstream msg;
      msg << "resample: node r=" << r << " lies outside the profile [" << p.front() << ", "
          << p.back() << "]";
      throw DomainMismatch(msg.str());
    }
    out(k - 1) = p(r);
  }
  return out;
}

Eigen::MatrixXd interpolation_matrix(int N, int M) {
  const Eigen::VectorXd x = chebyshev_points(N);
  const Eigen::VectorXd y = chebyshev_points(M);
  Eigen::VectorXd bw(N + 1);
  for (int j = 0; j <= N; ++j) bw(j) = (j % 2 ? -1.0 : 1.0) * (j == 0 || j == N ? 0.5 : 1.0);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(M + 1, N + 1);
  for (int i = 0; i <= M; ++i) {
    int hit = -1;
    for (int j = 0; j <= N && hit < 0; ++j)
      if (y(i) == x(j)) hit = j;
    if (hit >= 0) {
      P(i, hit) = 1.0;
      continue;
    }
    double den = 0.0;
    for (int j = 0; j <= N; ++j) {
      P(i, j) = bw(j) / (y(i) - x(j));
      den += P(i, j);
    }
    P.row(i) /= den;
  }
  return P;
}

double quad(const Eigen::VectorXd& values, const ChebyshevGrid& grid) {
  if (values.size() != grid.N + 1) throw DimensionError("quad: expected N+1 values");
  return 0.5 * grid.L * grid.w.dot(values);
}

std::complex<double> quad(const Eigen::VectorXcd& values, const ChebyshevGrid& grid) {
  if (values.size() != grid.N + 1) throw DimensionError("quad: expected N+1 values");
  return 0.5 * grid.L * (grid.w.cast<std::complex<double>>().transpose() * values)(0);
}

Eigen::VectorXd pad(const Eigen::VectorXd& interior) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(interior.size() + 2);
  out.segment(1, interior.size()) = interior;
  return out;
}

Eigen::VectorXcd pad(const Eigen::VectorXcd& interior) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(interior.size() + 2);
  out.segment(1, interior.size()) = interior;
  return out;
}

}  // namespace sn
