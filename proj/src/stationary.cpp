#include "sn/stationary.hpp"

#include "sn/errors.hpp"
#include "sn/kernels.hpp"
#include "sn/radial_ode.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace sn {

namespace {

// State (S, S', V, V') with S = rψ, V = rU.
ode::OdeSystem radial_system() {
  ode::OdeSystem sys;
  sys.dimension = 4;
  sys.rhs = [](double r, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0] * y[2] / r;
    dy[2] = y[3];
    dy[3] = -y[0] * y[0] / r;
  };
  return sys;
}

struct Trial {
  int zeros = 0;
  bool diverged = false;
  ode::IntegrationResult path;
};

int sign_changes(std::span<const double> values, std::size_t end) {
  int count = 0;
  int last = 0;
  for (std::size_t i = 0; i < end && i < values.size(); ++i) {
    const double v = values[i];
    const int s = (v > 0.0) - (v < 0.0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

Trial run_trial(double psi0, double r_max, std::size_t steps, std::size_t stride,
                const ShootOptions& opt) {
  const double r0 = opt.r_min;
  const std::vector<double> y0{psi0 * r0, psi0, opt.central_potential * r0, opt.central_potential};
  ode::DivergenceTrigger trigger;
  trigger.threshold = opt.divergence_factor * std::abs(psi0);
  trigger.components = {0};
  trigger.divide_by_radius = true;
  Trial t;
  t.path = ode::integrate(radial_system(), y0, r0, r_max,
                          {(r_max - r0) / static_cast<double>(steps), stride}, trigger);
  t.diverged = t.path.terminated_early;
  const auto s = t.path.component(0);
  t.zeros = sign_changes(s, s.size());
  return t;
}

// Last local minimum of |S| before the trial blew up.
double trust_radius(const Trial& t) {
  const auto s = t.path.component(0);
  const auto& g = t.path.grid;
  for (std::size_t i = s.size() - 2; i >= 1; --i) {
    const double a = std::abs(s[i]);
    if (a <= std::abs(s[i - 1]) && a < std::abs(s[i + 1])) return g[i];
  }
  return g.back();
}

std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& f) {
  const std::size_t n = x.size();
  std::vector<double> d(n);
  if (n < 3) {
    const double s = (f[n - 1] - f[0]) / (x[n - 1] - x[0]);
    std::fill(d.begin(), d.end(), s);
    return d;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
    d[i] = (f[i + 1] * h0 * h0 - f[i - 1] * h1 * h1 + f[i] * (h1 * h1 - h0 * h0)) /
           (h0 * h1 * (h0 + h1));
  }
  // second-order one-sided ends
  auto edge = [&](std::size_t a, std::size_t b, std::size_t c) {
    const double h0 = x[b] - x[a], h1 = x[c] - x[a];
    return (f[b] * h1 * h1 - f[c] * h0 * h0 - f[a] * (h1 * h1 - h0 * h0)) /
           (h0 * h1 * (h1 - h0));
  };
  d[0] = edge(0, 1, 2);
  d[n - 1] = edge(n - 1, n - 2, n - 3);
  return d;
}

}  // namespace

double StationaryState::r0_at(double r) const {
  if (r <= r0.front()) return r0.values().front();
  if (r >= r0.back()) return 0.0;
  return r0(r);
}

double StationaryState::u0_at(double r) const {
  if (r <= u0.front()) return u0.values().front();
  if (r > u0.back()) return eigenvalue + tail_coefficient / r;
  return u0(r);
}

ProfilePair StationaryState::extended(double L) const {
  std::vector<double> g = r0.grid();
  std::vector<double> p = r0.values();
  std::vector<double> u = u0.values();
  if (L > g.back()) {
    const double h = g[1] - g[0];
    const double span = L - g.back();
    const auto count = static_cast<std::size_t>(
        std::ceil(span / std::max(h, span / 20000.0)));
    const double step = span / static_cast<double>(count);
    const double base = g.back();
    for (std::size_t i = 1; i <= count; ++i) {
      const double r = (i == count) ? L : base + static_cast<double>(i) * step;
      g.push_back(r);
      p.push_back(0.0);
      u.push_back(eigenvalue + tail_coefficient / r);
    }
  }
  return {RadialProfile(g, p), RadialProfile(g, u)};
}

ProfilePair rescale(const ProfilePair& pair, double lambda) {
  if (lambda == 0.0 || !std::isfinite(lambda)) throw DegenerateScaling("rescale: lambda must be nonzero");
  const double k = std::abs(lambda);
  const double l2 = lambda * lambda;
  std::vector<double> g = pair.psi.grid();
  std::vector<double> p = pair.psi.values();
  std::vector<double> u = pair.u.values();
  for (double& r : g) r /= k;
  for (double& v : p) v *= l2;
  for (double& v : u) v *= l2;
  return {RadialProfile(g, p), RadialProfile(std::move(g), u)};
}

EnergyFit extract_energy(const RadialProfile& u, double outer_fraction, double max_residual) {
  const auto& g = u.grid();
  const auto& v = u.values();
  const double cut = g.back() - outer_fraction * (g.back() - g.front());
  const auto first = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), cut) - g.begin());
  const std::size_t m = g.size() - first;
  if (m < 2) throw InsufficientData("extract_energy: fit window holds fewer than two samples");

  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = 1.0 / g[first + i];
    b(i) = v[first + i];
  }
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(b);
  const double rms = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(m));
  EnergyFit fit{c(0), c(1), rms / (std::abs(c(0)) > 0.0 ? std::abs(c(0)) : 1.0)};
  if (!(fit.residual <= max_residual)) {
    std::ostringstream msg;
    msg << "extract_energy: relative fit residual " << fit.residual << " exceeds " << max_residual;
    throw AsymptoteNotReached(msg.str());
  }
  return fit;
}

int count_nodes(const RadialProfile& psi, std::optional<double> r_trust) {
  const auto& g = psi.grid();
  std::size_t end = g.size();
  if (r_trust)
    end = static_cast<std::size_t>(std::lower_bound(g.begin(), g.end(), *r_trust) - g.begin());
  return sign_changes(psi.values(), end);
}

Quadratures radial_quadratures(const RadialProfile& psi, const RadialProfile& u, double eigenvalue) {
  if (psi.size() != u.size()) throw DimensionError("radial_quadratures: profiles differ in length");
  const auto& g = psi.grid();
  const auto& p = psi.values();
  const auto& w = u.values();
  const auto dp = derivative(g, p);
  std::vector<double> f0(g.size()), f1(g.size()), f2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r2 = g[i] * g[i];
    f0[i] = p[i] * p[i] * r2;
    f1[i] = dp[i] * dp[i] * r2;
    f2[i] = (eigenvalue - w[i]) * p[i] * p[i] * r2;
  }
  return {kernels::serial::trapezoid(g, f0), kernels::serial::trapezoid(g, f1),
          kernels::serial::trapezoid(g, f2)};
}

StationaryState shoot(int n, const ShootOptions& opt) {
  if (n < 0) throw Error("shoot: n must be nonnegative");
  double r_max = opt.r_max > 0.0 ? opt.r_max : 24.0 + 12.0 * n;
  const std::size_t steps = opt.steps;
  const std::size_t stride = std::max<std::size_t>(1, opt.trial_stride);

  // Scan down from scan_start for the first ψ(0) with more than n zeros.
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (int growth = 0; growth <= opt.max_growth && !bracketed; ++growth) {
    double prev = opt.scan_start;
    Trial top = run_trial(prev, r_max, steps, stride, opt);
    if (top.zeros > n) throw BracketFailure("shoot: scan start already has too many zeros");
    if (!top.diverged) {
      r_max *= 1.5;
      continue;
    }
    bool ambiguous = false;
    for (double p = opt.scan_start - opt.scan_step; p > 0.5 * opt.scan_step; p -= opt.scan_step) {
      Trial t = run_trial(p, r_max, steps, stride, opt);
      if (t.zeros > n) {
        lo = p;
        hi = prev;
        bracketed = true;
        break;
      }
      if (!t.diverged) {
        ambiguous = true;
        break;
      }
      prev = p;
    }
    if (!bracketed && !ambiguous) {
      std::ostringstream msg;
      msg << "shoot: no psi(0) in (0, " << opt.scan_start << "] gives " << n + 1 << " zeros";
      throw BracketFailure(msg.str());
    }
    if (ambiguous) r_max *= 1.5;
  }
  if (!bracketed) throw BracketFailure("shoot: bracket not found within the radius budget");

  // Bisect; lo always has more than n zeros, hi at most n before diverging.
  Trial best;
  int growth = 0;
  for (;;) {
    while (hi - lo > opt.bracket_tol) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      Trial t = run_trial(mid, r_max, steps, stride, opt);
      if (t.zeros > n)
        lo = mid;
      else if (t.diverged)
        hi = mid;
      else
        break;  // neither diverged nor over-counted: radius too short
    }
    best = run_trial(hi, r_max, steps, stride, opt);
    const bool done = hi - lo <= opt.bracket_tol || 0.5 * (lo + hi) <= lo || 0.5 * (lo + hi) >= hi;
    if (done && best.diverged && best.zeros == n) break;
    if (best.zeros != n && best.diverged && done) {
      std::ostringstream msg;
      msg << "shoot: converged trial has " << best.zeros << " zeros, wanted " << n;
      throw StateNotIsolated(msg.str());
    }
    if (++growth > opt.max_growth) throw BracketFailure("shoot: trial never diverged within the radius budget");
    r_max *= 1.5;
  }

  // Re-integrate once to the trust radius and store densely.
  const double psi0 = hi;
  EnergyFit fit;
  ode::IntegrationResult path;
  for (;;) {
    const double r_trust = trust_radius(best);
    const std::size_t steps_out = std::max<std::size_t>(opt.profile_points, 3) - 1;
    const std::vector<double> y0{psi0 * opt.r_min, psi0, opt.central_potential * opt.r_min,
                                 opt.central_potential};
    path = ode::integrate(radial_system(), y0, opt.r_min, r_trust,
                          {(r_trust - opt.r_min) / static_cast<double>(steps_out), 1});
    std::vector<double> u(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) u[i] = path.sample(i)[2] / path.grid[i];
    try {
      fit = extract_energy(RadialProfile(path.grid, u));
      break;
    } catch (const AsymptoteNotReached&) {
      if (++growth > opt.max_growth) throw;
      // a longer trial with the same ψ(0) diverges no earlier, so the trust radius only grows
      r_max *= 1.5;
      best = run_trial(psi0, r_max, steps, stride, opt);
    }
  }

  std::vector<double> g = path.grid;
  std::vector<double> p(g.size()), u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    p[i] = path.sample(i)[0] / g[i];
    u[i] = path.sample(i)[2] / g[i];
  }
  const int nodes = sign_changes(p, p.size());
  if (nodes != n) {
    std::ostringstream msg;
    msg << "shoot: stored profile has " << nodes << " zeros, wanted " << n;
    throw StateNotIsolated(msg.str());
  }

  std::vector<double> s2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) s2[i] = p[i] * p[i] * g[i] * g[i];
  const double norm_raw = kernels::serial::trapezoid(g, s2);
  const double lambda = 1.0 / norm_raw;

  ProfilePair scaled = rescale({RadialProfile(g, p), RadialProfile(g, u)}, lambda);

  StationaryState st;
  st.n = n;
  st.eigenvalue = lambda * lambda * fit.energy;
  st.energy = kConventionalEnergyScale * st.eigenvalue;
  st.tail_coefficient = lambda * fit.coefficient;
  st.r0 = std::move(scaled.psi);
  st.u0 = std::move(scaled.u);
  const Quadratures q = radial_quadratures(st.r0, st.u0, st.eigenvalue);
  st.norm = q.norm;
  st.kinetic = kConventionalEnergyScale * q.kinetic / q.norm;
  st.potential = kConventionalEnergyScale * q.potential / q.norm;
  st.conserved_energy = st.kinetic + 0.5 * st.potential;
  st.central_amplitude = psi0;
  st.central_potential = opt.central_potential;
  st.scale = lambda;
  st.fit_residual = fit.residual;
  st.shooting_radius = r_max;
  if (!(st.energy < 0.0)) throw StateNotIsolated("shoot: energy is not negative");
  return st;
}

std::vector<StationaryState> spectrum_table(int n_max, Execution exec, const ShootOptions& options) {
  if (n_max < 0 || n_max > 50) throw Error("spectrum_table: n_max must lie in [0, 50]");
  std::vector<StationaryState> out(static_cast<std::size_t>(n_max) + 1);
  for_each_index(exec, out.size(), [&](std::size_t i) {
    try {
      out[i] = shoot(static_cast<int>(i), options);
    } catch (const Error& e) {
      throw SpectrumError(static_cast<int>(i), e.what());
    }
  });
  return out;
}

std::vector<SpectrumEntry> energies(std::span<const StationaryState> states) {
  std::vector<SpectrumEntry> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back({s.n, s.energy});
  return out;
}

double loglog_slope(std::span<const SpectrumEntry> table, int n_lo, int n_hi) {
  if (n_lo < 1) throw Error("loglog_slope: n_lo must be at least 1");
  std::vector<double> x, y;
  for (const auto& e : table) {
    if (e.n < n_lo || e.n > n_hi) continue;
    x.push_back(std::log(static_cast<double>(e.n)));
    y.push_back(std::log(std::abs(e.energy)));
  }
  if (x.size() < 5) throw InsufficientData("loglog_slope: fewer than five points in range");
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i];
  const double mx = sx / m, my = sy / m;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace sn
