#pragma once

#include "sn/chebyshev.hpp"
#include "sn/parallel.hpp"
#include "sn/stability.hpp"
#include "sn/stationary.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sn {

// Largest relative residual of the three perturbation equations
//   W'' = 2R0A,  B'' = −U0B − iλA,  A'' = −U0A + R0W − iλB
// at the interior nodes, with the mode's own λ.
double ode_residual(const EigenMode& mode, const PerturbationOperator& op);

struct RkOptions {
  double step = 0.0;                     // 0: L / 100000
  std::size_t reorthonormalize = 100;    // steps between QR sweeps
  std::size_t stride = 10;               // stored samples
  std::optional<double> matching_radius; // default: radius enclosing half the norm
  double seed_scale = 1.0;               // multiplies every seed slope
};

// Eigenfunction rebuilt by Runge–Kutta from both ends of (0, L): regular
// solutions A, B, W ∝ r from the origin, and solutions vanishing at L.
// The two 3-dimensional families are kept orthonormal while integrating and
// matched at one radius. `mismatch` is σ_min/σ_max of the 6×6 matching
// matrix: zero iff λ is an eigenvalue of the continuous problem.
struct Reconstruction {
  cplx lambda;
  double matching_radius = 0.0;
  double mismatch = 0.0;
  std::vector<double> grid;
  std::vector<cplx> A, B, W;
  bool blowup = false;
  std::string note;

  // Linear interpolation of component `which` (0 = A, 1 = B, 2 = W).
  cplx at(int which, double r) const;
};

Reconstruction rk_reconstruct(cplx lambda, const StationaryState& state, double L, const RkOptions& options = {});

// |⟨B_rk, B⟩| / (‖B_rk‖‖B‖) over the interior Chebyshev nodes.
double cosine_similarity(const Reconstruction& rec, const EigenMode& mode, const ChebyshevGrid& grid);
// Same measure between two node vectors.
double cosine_similarity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

std::vector<double> mismatch_scan(const std::vector<cplx>& lambdas, const StationaryState& state, double L,
                                  const RkOptions& options = {}, Execution exec = Execution::Parallel);

// ODE residual, RK mismatch and B-similarity for one spectral mode.
VerifyEntry verify_mode(const EigenMode& mode, const PerturbationOperator& op, const StationaryState& state,
                        const RkOptions& options = {});

}  // namespace sn
