#include "sn/diagnostics.hpp"

#include "sn/errors.hpp"
#include "sn/kernels.hpp"
#include "sn/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sn {

namespace {
constexpr double kPi = std::numbers::pi;
}

double PhysicalScales::gamma() const {
  return 32.0 * kPi * kPi * G * G * std::pow(m, 5) / std::pow(hbar, 3);
}

double time_to_si(const PhysicalScales& s, double t_nondim) {
  if (!(s.G > 0.0) || !(s.m > 0.0) || !(s.hbar > 0.0))
    throw InvalidScales("time_to_si: G, m and hbar must be positive");
  return t_nondim / s.gamma();
}

double VirialResiduals::max() const { return std::max({kinetic, potential, conserved}); }

VirialResiduals virial_check(const StationaryState& s) {
  const double e = std::abs(s.energy);
  return {std::abs(s.kinetic + s.energy / 3.0) / e, std::abs(s.potential - 4.0 * s.energy / 3.0) / e,
          std::abs(s.conserved_energy - s.energy / 3.0) / e};
}

double dispersion_acceleration(const StationaryState& s) { return 8.0 * s.conserved_energy - 2.0 * s.potential; }

double dispersion_acceleration(const Quadratures& q) {
  // 8(T + V/2) − 2V
  return 8.0 * q.kinetic + 2.0 * q.potential;
}

double growth_bound(double energy) {
  if (!(energy < 0.0)) throw NotABoundState("growth_bound: energy must be negative");
  return 4.0 / (9.0 * kPi * kPi) * std::sqrt(-energy);
}

double sobolev_constant() { return std::pow(2.0, 2.0 / 3.0) / (std::sqrt(3.0) * std::pow(kPi, 2.0 / 3.0)); }

double r0_cubed_integral(const StationaryState& s) {
  const auto& g = s.r0.grid();
  const auto& p = s.r0.values();
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::pow(std::abs(p[i]), 3) * g[i] * g[i];
  return 4.0 * kPi * kernels::serial::trapezoid(g, f);
}

CubedBound r0_cubed_bound(const StationaryState& s) {
  const double K = sobolev_constant();
  const Quadratures q = radial_quadratures(s.r0, s.u0, s.eigenvalue);
  const double I3 = 4.0 * kPi * q.norm;
  const double T3 = 4.0 * kPi * q.kinetic;
  return {r0_cubed_integral(s), std::pow(K, 1.5) * std::pow(I3, 0.75) * std::pow(T3, 0.75)};
}

double intrinsic_growth_bound(const StationaryState& s) {
  const double K = sobolev_constant();
  return K * K * std::pow(r0_cubed_integral(s), 2.0 / 3.0);
}

SobolevCheck sobolev_chain_check(const EigenMode& mode, const StationaryState& state, const ChebyshevGrid& grid) {
  // ∫|∇(W/r)|²d³x = 4π∫|W_r|²dr once W vanishes at both ends
  const Eigen::VectorXcd W = pad(mode.W);
  const Eigen::VectorXcd Wr = grid.Dr().cast<cplx>() * W;
  const double grad_w = 4.0 * kPi * quad(Eigen::VectorXd(Wr.cwiseAbs2()), grid);
  const double a2 = 4.0 * kPi * quad(Eigen::VectorXd(pad(mode.A).cwiseAbs2()), grid);
  const double K = sobolev_constant();
  return {std::sqrt(grad_w), 2.0 * K * std::cbrt(r0_cubed_integral(state)) * std::sqrt(a2)};
}

Quadratures spectral_quadratures(const StationaryState& s, const ChebyshevGrid& grid) {
  const int n = grid.N;
  Eigen::VectorXd p(n + 1), u(n + 1);
  for (int k = 0; k <= n; ++k) {
    p(k) = s.r0_at(grid.r(k));
    u(k) = s.u0_at(grid.r(k));
  }
  const Eigen::VectorXd dp = grid.Dr() * p;
  const Eigen::VectorXd r2 = grid.r.cwiseAbs2();
  Quadratures q;
  q.norm = quad(Eigen::VectorXd(p.cwiseAbs2().cwiseProduct(r2)), grid);
  q.kinetic = quad(Eigen::VectorXd(dp.cwiseAbs2().cwiseProduct(r2)), grid);
  q.potential = quad(Eigen::VectorXd((s.eigenvalue - u.array()).matrix().cwiseProduct(p.cwiseAbs2()).cwiseProduct(r2)), grid);
  return q;
}

}  // namespace sn
