#include <doctest.h>

#include "support.hpp"

#include "sn/diagnostics.hpp"
#include "sn/errors.hpp"
#include "sn/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace sn;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

int count(const StabilityReport& r, ModeClass c) {
  return static_cast<int>(std::count_if(r.modes.begin(), r.modes.end(), [&](const EigenMode& m) { return m.cls == c; }));
}

// Nearest eigenvalue in the set to z.
double distance_to_set(const std::vector<EigenMode>& modes, cplx z) {
  double d = INFINITY;
  for (const auto& m : modes)
    if (m.finite) d = std::min(d, std::abs(m.lambda - z));
  return d;
}

}  // namespace

TEST_CASE("operator blocks have the documented structure") {
  const auto& s = support::state(0);
  const auto grid = build_grid(12, 40.0);
  const auto op = assemble(s, grid, NodeSampling::Interpolated);
  const int m = 11;
  REQUIRE(op.lhs.rows() == 3 * m);
  REQUIRE(op.rhs.rows() == 3 * m);
  REQUIRE(op.reduced.rows() == 2 * m);

  const MatrixXd R0 = op.r0.asDiagonal();
  const MatrixXd H = grid.D2_trimmed + MatrixXd(op.u0.asDiagonal());
  CHECK((op.lhs.block(0, 0, m, m) + 2.0 * R0).norm() == 0.0);
  CHECK(op.lhs.block(0, m, m, m).norm() == 0.0);
  CHECK(op.lhs.block(0, 2 * m, m, m) == grid.D2_trimmed);
  CHECK((op.lhs.block(m, m, m, m) - H).norm() == 0.0);
  CHECK((op.lhs.block(2 * m, 0, m, m) + H).norm() == 0.0);
  CHECK((op.lhs.block(2 * m, 2 * m, m, m) - R0).norm() == 0.0);
  CHECK((op.d2t_inverse * grid.D2_trimmed - MatrixXd::Identity(m, m)).norm() < 1e-10);

  // RHS (a, b, w) = (0, −a, b)
  const VectorXd v = VectorXd::Random(3 * m);
  const VectorXd out = op.rhs * v;
  CHECK(out.head(m).norm() == 0.0);
  CHECK((out.segment(m, m) + v.head(m)).norm() == 0.0);
  CHECK((out.tail(m) - v.segment(m, m)).norm() == 0.0);

  // interpolated nodes are the profile values
  CHECK((op.r0 - resample(s.r0, grid)).norm() < 1e-14);
}

TEST_CASE("polished nodes solve the collocated stationary equations") {
  const auto& s = support::state(1);
  const auto grid = build_grid(60, 150.0);
  const auto nodes = sample_nodes(s, grid, NodeSampling::Polished);
  CHECK(nodes.newton_residual < 1e-8);
  CHECK(nodes.newton_iterations >= 1);
  const auto interp = sample_nodes(s, grid, NodeSampling::Interpolated);
  CHECK(interp.newton_residual == 0.0);
  // the polish only moves nodes at the level of the collocation error
  CHECK((nodes.r0 - interp.r0).cwiseAbs().maxCoeff() < 1e-3 * interp.r0.cwiseAbs().maxCoeff());
}

TEST_CASE("[derived] zero background gives the free spectrum") {
  // With R0 = U0 = 0 the reduced problem is [[0, D2t], [D2t, 0]], so λ = ±i μ
  // for the Dirichlet eigenvalues μ_k ≈ −(kπ/L)² of d²/dr².
  const double L = 10.0;
  const auto grid = build_grid(40, L);
  const auto op = assemble_from_nodes(grid, VectorXd::Zero(39), VectorXd::Zero(39));
  const auto modes = solve_reduced(op);
  for (int k = 1; k <= 6; ++k) {
    const double mu = std::pow(k * std::numbers::pi / L, 2);
    CAPTURE(k);
    CHECK(distance_to_set(modes, cplx(0.0, mu)) < 1e-8 * mu);
    CHECK(distance_to_set(modes, cplx(0.0, -mu)) < 1e-8 * mu);
  }
}

TEST_CASE("[reference] ground state spectrum at N = 60, L = 150") {
  const auto a = support::analysis(0, 60, 150.0);
  const auto im = a.report.positive_imaginary();
  REQUIRE(im.size() >= 6);
  // quoted to three significant figures
  const double table[] = {0.0341, 0.0603, 0.0688, 0.0731, 0.0765, 0.0810};
  for (int k = 0; k < 6; ++k) {
    CAPTURE(k);
    CHECK(std::abs(im[k].imag() - table[k]) <= 5e-5 + 1e-12);
    CHECK(std::abs(im[k].real()) < 1e-5);
  }
  CHECK(a.report.quadruple_count == 0);
  CHECK(a.report.max_re == 0.0);
  REQUIRE(a.report.zero_mode.has_value());
  const auto& z = a.report.modes[*a.report.zero_mode];
  CHECK(std::abs(z.lambda) < 1e-5);
  CHECK(count(a.report, ModeClass::ZeroMode) == 2);
  CHECK(count(a.report, ModeClass::Spurious) == 0);
  CHECK(count(a.report, ModeClass::ImaginaryPair) == 2 * 59 - 2);
}

TEST_CASE("[reference] second state has one quadruple near 0.00139 + 0.010i") {
  const auto a = support::analysis(1, 60, 150.0);
  CHECK(a.report.quadruple_count == 1);
  const auto q = a.report.quadruple_representatives();
  REQUIRE(q.size() == 1);
  CHECK(std::abs(q[0].real() - 0.00139) <= 0.05 * 0.00139);
  CHECK(std::abs(q[0].imag() - 0.010) <= 0.05 * 0.010);
  CHECK(a.report.max_re == doctest::Approx(q[0].real()));
  // all four members are present
  for (cplx t : {q[0], -q[0], std::conj(q[0]), -std::conj(q[0])}) CHECK(distance_to_set(a.report.modes, t) < 1e-10);
}

TEST_CASE("[reference] third and fourth states: n quadruples") {
  const auto& s2 = support::state(2);
  const auto& s3 = support::state(3);
  const auto r2 = analyze(s2, build_grid(60, default_length(2, s2.energy)));
  const auto r3 = analyze(s3, build_grid(60, default_length(3, s3.energy)));
  CHECK(r2.quadruple_count == 2);
  CHECK(r3.quadruple_count == 3);
  // reference growth rates, within 10%
  CHECK(std::abs(r2.max_re - 0.000520) <= 0.1 * 0.000520);
  CHECK(std::abs(r3.max_re - 0.000225) <= 0.1 * 0.000225);
  CHECK(r2.max_re <= r2.bound);
  CHECK(r3.max_re <= r3.bound);
}

TEST_CASE("spectrum is closed under λ → −λ and λ → conj λ") {
  for (int n : {0, 1}) {
    const auto a = support::analysis(n, 60, 150.0);
    for (const auto& m : a.report.modes) {
      if (!m.finite || m.cls == ModeClass::ZeroMode) continue;
      const double tol = 1e-8 * std::abs(m.lambda);
      CHECK(distance_to_set(a.report.modes, -m.lambda) <= tol);
      CHECK(distance_to_set(a.report.modes, std::conj(m.lambda)) <= tol);
    }
  }
}

TEST_CASE("the two solvers agree") {
  for (int n : {0, 1}) {
    const auto grid = build_grid(60, 150.0);
    const auto op = assemble(support::state(n), grid);
    const auto full = solve_full(op);
    const auto red = solve_reduced(op);
    CHECK(cross_check(full, red, 10) < 1e-6);
    const int finite = static_cast<int>(std::count_if(full.begin(), full.end(), [](const EigenMode& m) { return m.finite; }));
    CHECK(finite == 2 * 59);
    CHECK(red.size() == 2u * 59u);
  }
}

TEST_CASE("dichotomy") {
  const auto a = support::analysis(1, 60, 150.0);
  for (const auto& m : a.report.modes) {
    if (m.cls == ModeClass::ComplexQuadruple) CHECK(dichotomy_q(m, a.grid) < 1e-8);
    if (m.cls == ModeClass::ImaginaryPair || m.cls == ModeClass::ComplexQuadruple) {
      const double q = dichotomy_q(m, a.grid);
      CHECK(q >= 0.0);
      CHECK(q <= 1.0 + 1e-12);
    }
  }
  // the two lowest imaginary modes carry the tabulated overlaps, which are
  // insensitive to L for these modes
  const auto im = a.report.positive_imaginary();
  std::vector<double> qs;
  for (const auto& m : a.report.modes)
    if (m.cls == ModeClass::ImaginaryPair && m.lambda.imag() > 0 && m.lambda.imag() < 0.0095) qs.push_back(dichotomy_q(m, a.grid));
  REQUIRE(qs.size() == 2);
  std::sort(qs.begin(), qs.end());
  CHECK(std::abs(qs[0] - 0.235) <= 0.2 * 0.235);

  EigenMode same;
  same.A = Eigen::VectorXcd::Random(59);
  same.B = same.A;
  CHECK(dichotomy_q(same, a.grid) == doctest::Approx(1.0).epsilon(1e-12));
  EigenMode empty;
  empty.A = Eigen::VectorXcd::Zero(59);
  empty.B = Eigen::VectorXcd::Random(59);
  CHECK_THROWS_AS(dichotomy_q(empty, a.grid), DegenerateMode);
}

TEST_CASE("Rayleigh identities hold for converged modes and fail for random vectors") {
  const auto a = support::analysis(0, 60, 150.0);
  const auto fine = support::analysis(0, 80, 150.0);
  int checked = 0;
  for (const auto& m : a.report.modes) {
    if (m.cls != ModeClass::ImaginaryPair) continue;
    // converged: the same eigenvalue reappears on the finer grid
    if (distance_to_set(fine.report.modes, m.lambda) > 1e-8 * std::abs(m.lambda)) continue;
    const auto r = rayleigh_residual(m, a.op);
    CHECK(r.max() < 1e-6);
    CHECK(r.first_imag < 1e-6);
    ++checked;
  }
  CHECK(checked >= 6);

  EigenMode junk;
  junk.lambda = cplx(0.0, 0.05);
  junk.A = Eigen::VectorXcd::Random(59);
  junk.B = Eigen::VectorXcd::Random(59);
  junk.W = Eigen::VectorXcd::Random(59);
  CHECK(rayleigh_residual(junk, a.op).max() > 1e-3);
}

TEST_CASE("normalize_mode fixes phase and norm") {
  const auto grid = build_grid(20, 10.0);
  EigenMode m;
  m.A = Eigen::VectorXcd::Random(19);
  m.B = Eigen::VectorXcd::Random(19);
  m.W = Eigen::VectorXcd::Random(19);
  normalize_mode(m, grid);
  Eigen::Index k;
  m.B.cwiseAbs().maxCoeff(&k);
  CHECK(std::abs(m.B(k).imag()) < 1e-14);
  CHECK(m.B(k).real() > 0.0);
  const VectorXd dens = pad(VectorXd(m.A.cwiseAbs2() + m.B.cwiseAbs2()));
  CHECK(quad(dens, grid) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("an ill-conditioned operator is refused by the reduced solver") {
  auto op = assemble_from_nodes(build_grid(10, 5.0), VectorXd::Zero(9), VectorXd::Zero(9));
  op.d2t_condition = 1e15;
  CHECK_THROWS_AS(solve_reduced(op), IllConditioned);
}

TEST_CASE("default lengths") {
  CHECK(default_length(0, -0.163) == 150.0);
  CHECK(default_length(1, -0.0308) == 150.0);
  CHECK(default_length(2, -0.0125) == 450.0);
  CHECK(default_length(3, -0.00675) > 800.0);
  CHECK(default_length(4, -0.00421) > default_length(3, -0.00675));
}

TEST_CASE("convergence sweep follows the fifth ground-state mode") {
  const auto& s = support::state(0);
  const auto pts = convergence_sweep(s, SweepParameter::N, {40, 60, 80}, 5, 150.0);
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) {
    CHECK_FALSE(p.lost);
    CHECK(std::abs(p.lambda.imag() - 0.0765) <= 0.01 * 0.0765);
  }
  CHECK(std::abs(pts[2].lambda - pts[1].lambda) < 1e-3 * std::abs(pts[1].lambda));

  const auto one = convergence_sweep(s, SweepParameter::N, {60}, 1, 150.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].lambda.imag() == doctest::Approx(0.0341).epsilon(2e-3));

  CHECK_THROWS_AS(convergence_sweep(s, SweepParameter::N, {10}, 500, 150.0), TrackingLost);
  const auto kept = convergence_sweep(s, SweepParameter::N, {10}, 500, 150.0, {}, Execution::Parallel, true);
  CHECK(kept[0].lost);
  CHECK_THROWS_AS(convergence_sweep(s, SweepParameter::N, {60, 40}, 1, 150.0), Error);
}

TEST_CASE("serial and parallel sweeps agree") {
  const auto& s = support::state(0);
  const auto a = convergence_sweep(s, SweepParameter::L, {120, 150}, 2, 40, {}, Execution::Serial);
  const auto b = convergence_sweep(s, SweepParameter::L, {120, 150}, 2, 40, {}, Execution::Parallel);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].lambda == b[i].lambda);
}
