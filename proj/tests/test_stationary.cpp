#include <doctest.h>

#include "support.hpp"

#include "sn/errors.hpp"
#include "sn/stationary.hpp"

#include <cmath>
#include <vector>

using namespace sn;

namespace {

// Oracle: relative residual of (rψ)'' = −rψU, fourth-order central
// differences on every k-th sample of a uniform grid.
double equation_residual(const ProfilePair& pair, std::size_t k) {
  const auto& g = pair.psi.grid();
  const auto& p = pair.psi.values();
  const auto& u = pair.u.values();
  const double h = g[k] - g[0];
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 2 * k; i + 2 * k < g.size(); i += k) {
    auto S = [&](std::size_t j) { return g[j] * p[j]; };
    const double d2 = (-S(i - 2 * k) + 16 * S(i - k) - 30 * S(i) + 16 * S(i + k) - S(i + 2 * k)) / (12 * h * h);
    const double rhs = -S(i) * u[i];
    worst = std::max(worst, std::abs(d2 - rhs));
    scale = std::max(scale, std::abs(rhs));
  }
  return worst / scale;
}

double trapezoid_norm(const RadialProfile& psi) {
  const auto& g = psi.grid();
  const auto& p = psi.values();
  double s = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i)
    s += 0.5 * (g[i] - g[i - 1]) * (p[i] * p[i] * g[i] * g[i] + p[i - 1] * p[i - 1] * g[i - 1] * g[i - 1]);
  return s;
}

}  // namespace

TEST_CASE("[reference] first energies match the tabulated values") {
  // reference values carry three significant figures
  for (int n : {0, 1, 2, 3, 10}) {
    const double e = support::state(n).energy;
    CAPTURE(n);
    CHECK(std::abs(e - support::kReferenceEnergies[n]) <= 0.005 * std::abs(support::kReferenceEnergies[n]));
  }
}

TEST_CASE("states have n zeros, negative energy and unit norm") {
  for (int n = 0; n <= 3; ++n) {
    const auto& s = support::state(n);
    CAPTURE(n);
    CHECK(s.n == n);
    CHECK(s.energy < 0.0);
    CHECK(s.energy == kConventionalEnergyScale * s.eigenvalue);
    CHECK(count_nodes(s.r0) == n);
    CHECK(std::abs(trapezoid_norm(s.r0) - 1.0) < 1e-10);
    CHECK(std::abs(s.norm - 1.0) < 1e-10);
  }
  CHECK(support::state(0).energy < support::state(1).energy);
  CHECK(support::state(1).energy < support::state(2).energy);
}

TEST_CASE("[derived] the shot profile satisfies the radial equation") {
  const auto& s = support::state(0);
  CHECK(equation_residual({s.r0, s.u0}, 20) < 1e-6);
}

TEST_CASE("rescale: identity, covariance of the equations and norm scaling") {
  const auto& s = support::state(0);
  const ProfilePair pair{s.r0, s.u0};

  const auto same = rescale(pair, 1.0);
  CHECK(same.psi.grid() == pair.psi.grid());
  CHECK(same.psi.values() == pair.psi.values());
  CHECK(same.u.values() == pair.u.values());

  const auto twice = rescale(pair, 2.0);
  CHECK(twice.psi.front() == doctest::Approx(pair.psi.front() / 2.0));
  CHECK(twice.u.values()[0] == doctest::Approx(4.0 * pair.u.values()[0]));
  CHECK(equation_residual(twice, 20) < 1e-6);

  // ∫(λ²ψ(λr))² r² dr = λ ∫ψ²r²dr
  for (double lambda : {0.5, 2.0, 3.7}) {
    const auto sc = rescale(pair, lambda);
    CHECK(trapezoid_norm(sc.psi) == doctest::Approx(lambda * trapezoid_norm(pair.psi)).epsilon(1e-12));
  }
  // a sign flip leaves the grid orientation alone
  CHECK(rescale(pair, -2.0).psi.grid() == twice.psi.grid());

  CHECK_THROWS_AS(rescale(pair, 0.0), DegenerateScaling);
  CHECK_THROWS_AS(rescale(pair, std::nan("")), DegenerateScaling);
}

TEST_CASE("extract_energy recovers exact models and rejects non-asymptotic data") {
  std::vector<double> g, v, c, s;
  for (int i = 0; i <= 1000; ++i) {
    const double r = 1.0 + 0.1 * i;
    g.push_back(r);
    v.push_back(-0.5 + 1.0 / r);
    c.push_back(-0.25);
    s.push_back(std::sin(r));
  }
  const auto fit = extract_energy(RadialProfile(g, v));
  CHECK(std::abs(fit.energy + 0.5) < 1e-10);
  CHECK(std::abs(fit.coefficient - 1.0) < 1e-8);
  CHECK(fit.residual < 1e-12);

  const auto flat = extract_energy(RadialProfile(g, c));
  CHECK(std::abs(flat.energy + 0.25) < 1e-12);
  CHECK(std::abs(flat.coefficient) < 1e-9);

  CHECK_THROWS_AS(extract_energy(RadialProfile(g, s)), AsymptoteNotReached);
}

TEST_CASE("count_nodes counts sign changes inside the trusted range") {
  std::vector<double> g, v;
  for (int i = 0; i <= 1000; ++i) {
    const double r = 0.009 * i + 0.005;
    g.push_back(r);
    v.push_back(std::sin(r * 3.14159265358979 / 2.5));  // zeros at 2.5, 5, 7.5
  }
  RadialProfile p(g, v);
  CHECK(count_nodes(p) == 3);
  CHECK(count_nodes(p, 6.0) == 2);
  CHECK(count_nodes(p, 1.0) == 0);
}

TEST_CASE("shooting is covariant under the central potential") {
  ShootOptions half;
  half.central_potential = 0.5;
  const auto a = support::state(0);
  const auto b = shoot(0, half);
  CHECK(std::abs(b.energy - a.energy) < 1e-5 * std::abs(a.energy));
  CHECK(b.central_amplitude == doctest::Approx(0.5 * a.central_amplitude).epsilon(1e-6));
  for (double r : {0.5, 2.0, 5.0, 10.0})
    CHECK(std::abs(b.r0_at(r) - a.r0_at(r)) < 1e-5 * a.r0_at(0.0));
}

TEST_CASE("shoot rejects a scan start below the target amplitude") {
  ShootOptions low;
  low.scan_start = 0.5;
  CHECK_THROWS_AS(shoot(0, low), BracketFailure);
  CHECK_THROWS_AS(shoot(-1), Error);
}

TEST_CASE("state tails: constant inside, Coulomb outside") {
  const auto& s = support::state(1);
  CHECK(s.r0_at(0.0) == s.r0.values().front());
  CHECK(s.u0_at(0.0) == s.u0.values().front());
  const double far = 10.0 * s.extent();
  CHECK(s.r0_at(far) == 0.0);
  CHECK(s.u0_at(far) == doctest::Approx(s.eigenvalue + s.tail_coefficient / far));
  // potential keeps falling outward toward its limit
  CHECK(s.u0_at(far) > s.eigenvalue);
  const auto ext = s.extended(3.0 * s.extent());
  CHECK(ext.psi.back() >= 3.0 * s.extent());
  CHECK(ext.psi.size() == ext.u.size());
}

TEST_CASE("spectrum table, serial and parallel agree bit for bit") {
  const auto par = spectrum_table(3, Execution::Parallel);
  const auto ser = spectrum_table(3, Execution::Serial);
  REQUIRE(par.size() == 4);
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].n == static_cast<int>(i));
    CHECK(par[i].energy == ser[i].energy);
    CHECK(par[i].r0.values() == ser[i].r0.values());
  }
  for (std::size_t i = 1; i < par.size(); ++i) CHECK(par[i - 1].energy < par[i].energy);
  CHECK(spectrum_table(0).size() == 1);
  CHECK_THROWS_AS(spectrum_table(51), Error);
}

TEST_CASE("log-log slope") {
  std::vector<SpectrumEntry> inv, flat, short_table;
  for (int n = 1; n <= 30; ++n) {
    inv.push_back({n, -1.0 / (n * n)});
    flat.push_back({n, -0.3});
  }
  CHECK(std::abs(loglog_slope(inv, 10, 20) + 2.0) < 1e-12);
  CHECK(std::abs(loglog_slope(flat, 1, 30)) < 1e-12);
  CHECK_THROWS_AS(loglog_slope(inv, 10, 13), InsufficientData);
  CHECK_THROWS_AS(loglog_slope(inv, 0, 20), Error);

  // [reference] the tabulated energies themselves
  std::vector<SpectrumEntry> table;
  for (int n = 0; n <= 20; ++n) table.push_back({n, support::kReferenceEnergies[n]});
  const double slope = loglog_slope(table, 10, 20);
  CHECK(slope > -2.2);
  CHECK(slope < -1.8);
}
