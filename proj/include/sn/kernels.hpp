#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial` is the
// reference implementation the tests compare against, `omp` is the
// OpenMP version used by default. bench/ times one against the other.

#include <Eigen/Dense>

#include <span>

namespace sn::kernels {

namespace serial {
// Chebyshev differentiation matrix on the nodes x (x_k = cos(k pi / N)),
// diagonal by the negative-sum trick.
Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& x);
Eigen::VectorXd clenshaw_curtis_weights(int N);
double trapezoid(std::span<const double> grid, std::span<const double> values);
// out = a * b for dense square matrices.
Eigen::MatrixXd matmul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
}  // namespace serial

namespace omp {
Eigen::MatrixXd differentiation_matrix(const Eigen::VectorXd& x);
Eigen::VectorXd clenshaw_curtis_weights(int N);
double trapezoid(std::span<const double> grid, std::span<const double> values);
Eigen::MatrixXd matmul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
}  // namespace omp

}  // namespace sn::kernels
