#pragma once

#include "sn/parallel.hpp"
#include "sn/radial_profile.hpp"

#include <Eigen/Dense>

namespace sn {

// Collocation on r ∈ (0, L) through x = 2r/L − 1 at the points
// x_k = cos(kπ/N), k = 0..N (so r_0 = L and r_N = 0).
struct ChebyshevGrid {
  int N = 0;
  double L = 0.0;
  Eigen::VectorXd x;           // N+1 points, descending
  Eigen::VectorXd r;           // mapped radii
  Eigen::MatrixXd D;           // d/dx on the full grid
  Eigen::MatrixXd D2;          // d²/dr² on the full grid, (2/L)² D·D
  Eigen::MatrixXd D2_trimmed;  // D2 without its first and last rows and columns
  Eigen::VectorXd w;           // Clenshaw–Curtis weights on [−1, 1]

  int interior() const { return N - 1; }
  Eigen::VectorXd interior_radii() const { return r.segment(1, N - 1); }
  // d/dr on the full grid.
  Eigen::MatrixXd Dr() const { return (2.0 / L) * D; }
};

Eigen::VectorXd chebyshev_points(int N);
// Valid for N ≥ 1.
Eigen::MatrixXd differentiation_matrix(int N, Execution exec = Execution::Parallel);

ChebyshevGrid build_grid(int N, double L, Execution exec = Execution::Parallel);

// Values at the M-point Chebyshev nodes of the polynomial interpolating
// values at the N-point nodes (barycentric form), as an (M+1)×(N+1) matrix.
Eigen::MatrixXd interpolation_matrix(int N, int M);

// Profile values at the interior radii r_1..r_{N−1}.
Eigen::VectorXd resample(const RadialProfile& p, const ChebyshevGrid& grid);

// ∫₀ᴸ f dr ≈ (L/2) Σ w_k f_k.
double quad(const Eigen::VectorXd& values, const ChebyshevGrid& grid);
std::complex<double> quad(const Eigen::VectorXcd& values, const ChebyshevGrid& grid);

// Interior vector with the Dirichlet zeros put back at both ends.
Eigen::VectorXd pad(const Eigen::VectorXd& interior);
Eigen::VectorXcd pad(const Eigen::VectorXcd& interior);

}  // namespace sn
