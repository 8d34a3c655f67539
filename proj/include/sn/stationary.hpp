#pragma once

#include "sn/parallel.hpp"
#include "sn/radial_profile.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sn {

// Energies quoted in conventional units (−½∇², ∇²Φ = 4π|ψ|², unit norm)
// are this multiple of the eigenvalue U(∞) of the solved equations
// (rψ)'' = −rψU, (rU)'' = −rψ² normalized to ∫ψ²r²dr = 1.
inline constexpr double kConventionalEnergyScale = 2.0;

// A (ψ, U) pair sharing one radial grid.
struct ProfilePair {
  RadialProfile psi;
  RadialProfile u;
};

struct EnergyFit {
  double energy = 0.0;       // asymptotic value of U
  double coefficient = 0.0;  // U ≈ energy + coefficient / r
  double residual = 0.0;     // rms misfit over the fit window, relative to |energy|
};

// Radial integrals of a (ψ, U) pair in the solver's units:
// norm = ∫ψ²r²dr, kinetic = ∫ψ_r²r²dr, potential = ∫φψ²r²dr with φ = eigenvalue − U.
struct Quadratures {
  double norm = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
};

struct ShootOptions {
  double r_max = 0.0;  // 0 selects 24 + 12 n in shooting units
  double bracket_tol = 1e-12;
  std::size_t steps = 100000;
  double r_min = 1e-6;
  double divergence_factor = 1e4;  // stop once |ψ| > factor · ψ(0)
  double central_potential = 1.0;  // U(0) used while shooting
  double scan_start = 2.0;
  double scan_step = 0.01;
  int max_growth = 12;
  std::size_t profile_points = 100001;
  std::size_t trial_stride = 10;
};

struct StationaryState {
  int n = 0;
  double energy = 0.0;      // conventional units (kConventionalEnergyScale · eigenvalue)
  double eigenvalue = 0.0;  // U(∞) of the normalized solution
  RadialProfile r0;         // ψ on [r_min/λ, trust radius]
  RadialProfile u0;         // U on the same grid
  double tail_coefficient = 0.0;  // U ≈ eigenvalue + tail_coefficient / r beyond the grid
  // Conventional-unit diagnostics: norm = ∫ψ²r²dr, kinetic = 2∫ψ_r²r²dr,
  // potential = 2∫φψ²r²dr, conserved_energy = kinetic + potential / 2.
  double norm = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double conserved_energy = 0.0;
  // Shooting bookkeeping.
  double central_amplitude = 0.0;  // ψ(0) at U(0) = central_potential
  double central_potential = 1.0;
  double scale = 1.0;              // λ of the normalizing rescale
  double fit_residual = 0.0;
  double shooting_radius = 0.0;    // final R_max

  // ψ and U for any r ≥ 0: constant below the first node, decayed
  // (ψ = 0, U = eigenvalue + c/r) beyond the last.
  double r0_at(double r) const;
  double u0_at(double r) const;
  double extent() const { return r0.back(); }
  // Profiles covering [first node, max(L, extent)] with the analytic tail appended.
  ProfilePair extended(double L) const;
};

// Finds the state with exactly n zeros by bisection on ψ(0), then normalizes.
StationaryState shoot(int n, const ShootOptions& options = {});

// (ψ, U, r) → (λ²ψ(λ·), λ²U(λ·)) on the grid r/|λ|.
ProfilePair rescale(const ProfilePair& pair, double lambda);

// Least-squares fit U ≈ E + c/r over the outer `outer_fraction` of the grid.
EnergyFit extract_energy(const RadialProfile& u, double outer_fraction = 0.2,
                         double max_residual = 1e-4);

// Sign changes of ψ strictly inside (first node, r_trust).
int count_nodes(const RadialProfile& psi, std::optional<double> r_trust = std::nullopt);

Quadratures radial_quadratures(const RadialProfile& psi, const RadialProfile& u, double eigenvalue);

std::vector<StationaryState> spectrum_table(int n_max, Execution exec = Execution::Parallel,
                                            const ShootOptions& options = {});

struct SpectrumEntry {
  int n = 0;
  double energy = 0.0;
};
std::vector<SpectrumEntry> energies(std::span<const StationaryState> states);

// Least-squares slope of log|E_n| against log n for n in [n_lo, n_hi].
double loglog_slope(std::span<const SpectrumEntry> table, int n_lo, int n_hi);

}  // namespace sn
