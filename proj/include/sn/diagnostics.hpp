#pragma once

#include "sn/chebyshev.hpp"
#include "sn/stationary.hpp"

namespace sn {

struct EigenMode;

struct PhysicalScales {
  double G = 0.0;
  double m = 0.0;
  double hbar = 0.0;
  double gamma() const;  // 32π²G²m⁵/ħ³
};

// Nondimensional time → seconds.
double time_to_si(const PhysicalScales& scales, double t_nondim);

// |T + E/3|, |V − 4E/3|, |𝓔 − E/3|, each divided by |E|.
struct VirialResiduals {
  double kinetic = 0.0;
  double potential = 0.0;
  double conserved = 0.0;
  double max() const;
};
VirialResiduals virial_check(const StationaryState& state);

// 8𝓔 − 2V from the state's quadratures (second time derivative of the
// second moment); zero for stationary states.
double dispersion_acceleration(const StationaryState& state);
// Same combination from raw solver-unit quadratures.
double dispersion_acceleration(const Quadratures& q);

// (4/9π²)√(−E).
double growth_bound(double energy);

// K = 2^{2/3} / (√3 π^{2/3}).
double sobolev_constant();

// Both sides of (∫|∇w|²)^{1/2} ≤ 2K(∫|R₀|³)^{1/3}(∫|a|²)^{1/2} in 3D measure,
// a = A/r, w = W/r.
struct SobolevCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack() const { return rhs - lhs; }
};
SobolevCheck sobolev_chain_check(const EigenMode& mode, const StationaryState& state,
                                 const ChebyshevGrid& grid);

// ∫|R₀|³d³x against K^{3/2} I^{3/4} T^{3/4} (I = ∫|R₀|²d³x, T = ∫|∇R₀|²d³x);
// at I = 1 the right side is K^{3/2}T^{3/4}.
struct CubedBound {
  double direct = 0.0;
  double bound = 0.0;
  double slack() const { return bound - direct; }
};
CubedBound r0_cubed_bound(const StationaryState& state);

// K²(∫|R₀|³d³x)^{2/3}: the growth-rate bound before ∫|R₀|³ is traded for T.
double intrinsic_growth_bound(const StationaryState& state);

// ∫|R₀|³d³x on the shooting grid.
double r0_cubed_integral(const StationaryState& state);

// The norm ∫ψ²r²dr, kinetic ∫ψ_r²r²dr and potential ∫φψ²r²dr evaluated by
// Clenshaw–Curtis on a Chebyshev grid, for comparison with the dense trapezoid values.
Quadratures spectral_quadratures(const StationaryState& state, const ChebyshevGrid& grid);

}  // namespace sn
