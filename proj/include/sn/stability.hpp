#pragma once

#include "sn/chebyshev.hpp"
#include "sn/parallel.hpp"
#include "sn/stationary.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace sn {

using cplx = std::complex<double>;

// How R0 and U0 reach the Chebyshev nodes. Interpolated reads the shooting
// profile; Polished re-solves the stationary equations on the nodes by
// Newton's method, starting from the interpolated values.
enum class NodeSampling { Interpolated, Polished };

enum class ModeClass { ZeroMode, ImaginaryPair, ComplexQuadruple, Spurious };
const char* to_string(ModeClass c);

struct NodeProfiles {
  Eigen::VectorXd r0;  // interior nodes r_1..r_{N−1}
  Eigen::VectorXd u0;
  double newton_residual = 0.0;  // 0 for Interpolated
  int newton_iterations = 0;
};
NodeProfiles sample_nodes(const StationaryState& state, const ChebyshevGrid& grid,
                          NodeSampling sampling = NodeSampling::Polished);

// Blocks act on (A, B, W) at the interior nodes.
//   LHS = [[−2R0, 0, D2t], [0, D2t + U0, 0], [−(D2t + U0), 0, R0]]
//   RHS = [[0, 0, 0], [−I, 0, 0], [0, I, 0]]
//   LHS v = iλ RHS v
//   reduced = [[0, D2t + U0], [D2t + U0 − 2R0 D2t⁻¹ R0, 0]],  reduced (A, B) = −iλ (A, B)
struct PerturbationOperator {
  ChebyshevGrid grid;
  Eigen::VectorXd r0;
  Eigen::VectorXd u0;
  Eigen::MatrixXd lhs;
  Eigen::MatrixXd rhs;
  Eigen::MatrixXd reduced;
  Eigen::MatrixXd d2t_inverse;
  double d2t_condition = 0.0;
};

PerturbationOperator assemble(const StationaryState& state, const ChebyshevGrid& grid,
                              NodeSampling sampling = NodeSampling::Polished);
PerturbationOperator assemble_from_nodes(const ChebyshevGrid& grid, const Eigen::VectorXd& r0,
                                         const Eigen::VectorXd& u0);

struct EigenMode {
  cplx lambda;
  Eigen::VectorXcd A, B, W;  // interior nodes
  ModeClass cls = ModeClass::Spurious;
  bool finite = true;
};

// Phase so the largest |B| entry is real positive, then ∫(|A|² + |B|²)dr = 1.
void normalize_mode(EigenMode& mode, const ChebyshevGrid& grid);

std::vector<EigenMode> solve_full(const PerturbationOperator& op);
std::vector<EigenMode> solve_reduced(const PerturbationOperator& op);

struct Tolerances {
  double zero = 1e-5;
  double real = 1e-5;
  double pair = 1e-8;    // relative
  double shape = 1e-4;   // zero mode: sup|A|, sup|W| against sup|B|
  double cosine = 0.999; // zero mode: B against r·R0
};

struct DichotomyEntry {
  cplx lambda;
  double q = 0.0;
};

struct RayleighResidual {
  // |−iλ∫ĀB − ∫(U0|A|² − |A_r|² + ½|W_r|²)| and |−iλ∫AB̄ − ∫(U0|B|² − |B_r|²)|,
  // each divided by the sum of its term magnitudes.
  double first = 0.0;
  double second = 0.0;
  // Imaginary parts of the left sides, which vanish for eigenpairs.
  double first_imag = 0.0;
  double second_imag = 0.0;
  double max() const { return first > second ? first : second; }
};

struct VerifyEntry {
  cplx lambda;
  double mismatch = 0.0;
  double cosine = 0.0;
  double ode_residual = 0.0;
};

struct StabilityReport {
  int n = -1;
  int N = 0;
  double L = 0.0;
  double energy = 0.0;
  std::vector<EigenMode> modes;  // sorted by |λ|
  int quadruple_count = 0;
  std::optional<std::size_t> zero_mode;
  std::vector<DichotomyEntry> dichotomy;
  std::vector<double> rayleigh_residuals;  // per non-spurious, non-zero mode, in mode order
  double max_re = 0.0;
  double bound = 0.0;
  std::optional<double> cross_check;
  std::vector<VerifyEntry> verification;
  std::vector<std::string> warnings;

  // Imaginary-pair modes with Im λ > 0, ascending.
  std::vector<cplx> positive_imaginary() const;
  // One representative (Re > 0, Im ≥ 0) per quadruple, ascending in Re.
  std::vector<cplx> quadruple_representatives() const;
};

// Tags every mode and groups pairs and quadruples; `r0_nodes` identifies the zero mode.
StabilityReport classify(std::vector<EigenMode> modes, const ChebyshevGrid& grid,
                         const Eigen::VectorXd& r0_nodes, const Tolerances& tol = {});

double dichotomy_q(const EigenMode& mode, const ChebyshevGrid& grid);
RayleighResidual rayleigh_residual(const EigenMode& mode, const PerturbationOperator& op);

// Largest relative disagreement between the two solvers over the
// `count` smallest nontrivial |λ|.
double cross_check(const std::vector<EigenMode>& full, const std::vector<EigenMode>& reduced,
                   int count = 10, double tol_zero = 1e-5);

enum class Solver { Full, Reduced, Both };

struct AnalysisOptions {
  Solver solver = Solver::Reduced;
  NodeSampling sampling = NodeSampling::Polished;
  Tolerances tol;
};

StabilityReport analyze(const StationaryState& state, const ChebyshevGrid& grid,
                        const AnalysisOptions& options = {});

// L of 150 for the first two states, 450 for the third, and ∝ 1/|E| beyond.
double default_length(int n, double energy);

enum class SweepParameter { N, L };

struct SweepPoint {
  double value = 0.0;
  cplx lambda;
  bool lost = false;
  std::string note;
};

// Tracks the k-th (1-based) positive imaginary eigenvalue while N or L varies;
// the other parameter is held at `fixed`. Throws TrackingLost at the first
// value where the mode is missing unless `keep_going` is set.
std::vector<SweepPoint> convergence_sweep(const StationaryState& state, SweepParameter param,
                                          const std::vector<double>& values, int tracked,
                                          double fixed, const AnalysisOptions& options = {},
                                          Execution exec = Execution::Parallel,
                                          bool keep_going = false);

}  // namespace sn
