#include "sn/verify.hpp"

#include "sn/errors.hpp"
#include "sn/kernels.hpp"
#include "sn/radial_ode.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sn {

namespace {

using Basis = Eigen::Matrix<cplx, 6, 3>;

// Columns j = 0..2 of the real state: 12 entries each, (A, A', B, B', W, W')
// as (re, im) pairs.
Basis unpack(std::span<const double> y) {
  Basis b;
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 6; ++c) b(c, j) = cplx(y[j * 12 + 2 * c], y[j * 12 + 2 * c + 1]);
  return b;
}

std::vector<double> pack(const Basis& b) {
  std::vector<double> y(36);
  for (int j = 0; j < 3; ++j)
    for (int c = 0; c < 6; ++c) {
      y[j * 12 + 2 * c] = b(c, j).real();
      y[j * 12 + 2 * c + 1] = b(c, j).imag();
    }
  return y;
}

// With `inward`, the independent variable is s = L − r; the second-order
// system is unchanged under the reflection.
ode::OdeSystem perturbation_system(const StationaryState& state, cplx lambda, bool inward, double L) {
  ode::OdeSystem sys;
  sys.dimension = 36;
  const cplx il = cplx(0.0, 1.0) * lambda;
  sys.rhs = [&state, il, inward, L](double t, std::span<const double> y, std::span<double> dy) {
    const double r = inward ? L - t : t;
    const double R0 = state.r0_at(r), U0 = state.u0_at(r);
    for (int j = 0; j < 3; ++j) {
      const double* z = y.data() + j * 12;
      double* d = dy.data() + j * 12;
      const cplx A(z[0], z[1]), A1(z[2], z[3]), B(z[4], z[5]), B1(z[6], z[7]), W(z[8], z[9]), W1(z[10], z[11]);
      const cplx dA1 = -U0 * A + R0 * W - il * B;
      const cplx dB1 = -U0 * B - il * A;
      const cplx dW1 = 2.0 * R0 * A;
      d[0] = A1.real(), d[1] = A1.imag();
      d[2] = dA1.real(), d[3] = dA1.imag();
      d[4] = B1.real(), d[5] = B1.imag();
      d[6] = dB1.real(), d[7] = dB1.imag();
      d[8] = W1.real(), d[9] = W1.imag();
      d[10] = dW1.real(), d[11] = dW1.imag();
    }
  };
  return sys;
}

struct Sweep {
  std::vector<Eigen::Matrix3cd> R;
  std::vector<std::vector<double>> grid;
  std::vector<std::vector<Basis>> values;
  Basis Qw;  // final orthonormal basis in the weighted norm
};

Sweep run_sweep(const ode::OdeSystem& sys, Basis seeds, double from, double to, double h, std::size_t reorth,
                std::size_t stride, double ell) {
  Eigen::Matrix<double, 6, 1> weight;
  weight << 1, ell, 1, ell, 1, ell;
  Sweep out;
  const double seg = static_cast<double>(reorth) * h;
  const auto nseg = static_cast<std::size_t>(std::max(1.0, std::ceil((to - from) / seg - 1e-9)));
  Basis Y = seeds;
  for (std::size_t k = 0; k < nseg; ++k) {
    const double a = from + static_cast<double>(k) * seg;
    const double b = (k + 1 == nseg) ? to : from + static_cast<double>(k + 1) * seg;
    const auto y0 = pack(Y);
    const auto res = ode::integrate(sys, y0, a, b, {h, stride});
    std::vector<Basis> vals;
    vals.reserve(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) vals.push_back(unpack(res.sample(i)));
    out.grid.push_back(res.grid);

    const Basis end = vals.back();
    out.values.push_back(std::move(vals));
    const Basis weighted = weight.asDiagonal() * end;
    Eigen::HouseholderQR<Basis> qr(weighted);
    const Basis Qw = qr.householderQ() * Basis::Identity();
    Eigen::Matrix3cd Rk = Qw.adjoint() * weighted;
    out.R.push_back(Rk);
    out.Qw = Qw;
    Y = weight.cwiseInverse().asDiagonal() * Qw;
  }
  return out;
}

// Solution samples from final-basis coefficients c.
void back_substitute(const Sweep& s, Eigen::Vector3cd c, std::vector<double>& grid, std::vector<Eigen::Matrix<cplx, 6, 1>>& vals) {
  const std::size_t nseg = s.R.size();
  std::vector<Eigen::Vector3cd> d(nseg);
  for (std::size_t k = nseg; k-- > 0;) {
    c = s.R[k].triangularView<Eigen::Upper>().solve(c);
    d[k] = c;
  }
  for (std::size_t k = 0; k < nseg; ++k) {
    const std::size_t first = k == 0 ? 0 : 1;  // segment starts repeat the previous end
    for (std::size_t i = first; i < s.grid[k].size(); ++i) {
      grid.push_back(s.grid[k][i]);
      vals.push_back(s.values[k][i] * d[k]);
    }
  }
}

double half_norm_radius(const StationaryState& state) {
  const auto& g = state.r0.grid();
  const auto& p = state.r0.values();
  double total = 0.0;
  std::vector<double> cum(g.size(), 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double f0 = p[i - 1] * p[i - 1] * g[i - 1] * g[i - 1];
    const double f1 = p[i] * p[i] * g[i] * g[i];
    total += 0.5 * (g[i] - g[i - 1]) * (f0 + f1);
    cum[i] = total;
  }
  for (std::size_t i = 1; i < g.size(); ++i)
    if (cum[i] >= 0.5 * total) return g[i];
  return g.back();
}

}  // namespace

double ode_residual(const EigenMode& mode, const PerturbationOperator& op) {
  const ChebyshevGrid& g = op.grid;
  const int m = g.N - 1;
  const Eigen::MatrixXcd D2 = g.D2.cast<cplx>();
  const Eigen::VectorXcd A = pad(mode.A), B = pad(mode.B), W = pad(mode.W);
  const Eigen::VectorXcd a = mode.A, b = mode.B, w = mode.W;
  const Eigen::VectorXcd R = op.r0.cast<cplx>(), U = op.u0.cast<cplx>();
  const cplx il = cplx(0.0, 1.0) * mode.lambda;

  const Eigen::VectorXcd d2a = (D2 * A).segment(1, m), d2b = (D2 * B).segment(1, m), d2w = (D2 * W).segment(1, m);
  const Eigen::VectorXcd ra = R.cwiseProduct(a), rw = R.cwiseProduct(w), ua = U.cwiseProduct(a), ub = U.cwiseProduct(b);

  auto inf = [](const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
  const double res = std::max({inf(d2w - 2.0 * ra), inf(d2b + ub + il * a), inf(d2a + ua - rw + il * b)});
  const double scale = std::max({inf(d2a), inf(d2b), inf(d2w), inf(ra), inf(rw), inf(ua), inf(ub),
                                 std::abs(il) * inf(a), std::abs(il) * inf(b)});
  return scale > 0.0 ? res / scale : 0.0;
}

cplx Reconstruction::at(int which, double r) const {
  const std::vector<cplx>& v = which == 0 ? A : which == 1 ? B : W;
  if (grid.empty()) return 0.0;
  if (r <= grid.front()) return v.front();
  if (r >= grid.back()) return v.back();
  const auto it = std::upper_bound(grid.begin(), grid.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - grid.begin());
  const double t = (r - grid[k - 1]) / (grid[k] - grid[k - 1]);
  return (1.0 - t) * v[k - 1] + t * v[k];
}

Reconstruction rk_reconstruct(cplx lambda, const StationaryState& state, double L, const RkOptions& opt) {
  const double r_min = state.r0.front();
  if (!(L > r_min)) throw Error("rk_reconstruct: L must exceed the innermost radius");
  Reconstruction rec;
  rec.lambda = lambda;
  const double h = opt.step > 0.0 ? opt.step : L / 100000.0;
  double rm = opt.matching_radius.value_or(half_norm_radius(state));
  if (!(rm > r_min && rm < L)) rm = 0.5 * L;
  rec.matching_radius = rm;
  const double ell = 1.0 / std::sqrt(std::abs(state.eigenvalue));

  Basis out_seed = Basis::Zero(), in_seed = Basis::Zero();
  for (int j = 0; j < 3; ++j) {
    out_seed(2 * j, j) = opt.seed_scale * r_min;
    out_seed(2 * j + 1, j) = opt.seed_scale;
    in_seed(2 * j + 1, j) = opt.seed_scale;
  }

  Sweep out, in;
  try {
    out = run_sweep(perturbation_system(state, lambda, false, L), out_seed, r_min, rm, h, opt.reorthonormalize,
                    opt.stride, ell);
    in = run_sweep(perturbation_system(state, lambda, true, L), in_seed, 0.0, L - rm, h, opt.reorthonormalize,
                   opt.stride, ell);
  } catch (const NumericalBlowup& e) {
    rec.blowup = true;
    rec.mismatch = std::numeric_limits<double>::infinity();
    rec.note = e.what();
    return rec;
  }

  // d/ds = −d/dr on the inward family
  Basis in_r = in.Qw;
  for (int c = 1; c < 6; c += 2) in_r.row(c) *= -1.0;
  Eigen::Matrix<cplx, 6, 6> M;
  M << out.Qw, in_r;
  Eigen::JacobiSVD<Eigen::Matrix<cplx, 6, 6>> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  rec.mismatch = sv(5) / sv(0);
  const Eigen::Matrix<cplx, 6, 1> v = svd.matrixV().col(5);

  std::vector<double> go, gi;
  std::vector<Eigen::Matrix<cplx, 6, 1>> vo, vi;
  back_substitute(out, v.head<3>(), go, vo);
  back_substitute(in, -v.tail<3>(), gi, vi);

  for (std::size_t i = 0; i < go.size(); ++i) {
    rec.grid.push_back(go[i]);
    rec.A.push_back(vo[i](0));
    rec.B.push_back(vo[i](2));
    rec.W.push_back(vo[i](4));
  }
  for (std::size_t i = gi.size() - 1; i-- > 0;) {  // skip s = L − rm, already present
    const double r = L - gi[i];
    if (r <= rec.grid.back()) continue;
    rec.grid.push_back(r);
    rec.A.push_back(vi[i](0));
    rec.B.push_back(vi[i](2));
    rec.W.push_back(vi[i](4));
  }

  // same normalization as the spectral modes
  std::size_t k = 0;
  std::vector<double> dens(rec.grid.size());
  for (std::size_t i = 0; i < rec.grid.size(); ++i) {
    dens[i] = std::norm(rec.A[i]) + std::norm(rec.B[i]);
    if (std::abs(rec.B[i]) > std::abs(rec.B[k])) k = i;
  }
  const double n2 = kernels::serial::trapezoid(rec.grid, dens);
  cplx phase = std::abs(rec.B[k]) > 0.0 ? std::abs(rec.B[k]) / rec.B[k] : cplx(1.0);
  if (n2 > 0.0) phase /= std::sqrt(n2);
  for (auto* vec : {&rec.A, &rec.B, &rec.W})
    for (auto& z : *vec) z *= phase;
  return rec;
}

double cosine_similarity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw DimensionError("cosine_similarity: length mismatch");
  const double d = a.norm() * b.norm();
  return d > 0.0 ? std::abs(a.dot(b)) / d : 0.0;
}

double cosine_similarity(const Reconstruction& rec, const EigenMode& mode, const ChebyshevGrid& grid) {
  const Eigen::VectorXd ri = grid.interior_radii();
  Eigen::VectorXcd b(ri.size());
  for (Eigen::Index i = 0; i < ri.size(); ++i) b(i) = rec.at(1, ri(i));
  return cosine_similarity(b, mode.B);
}

std::vector<double> mismatch_scan(const std::vector<cplx>& lambdas, const StationaryState& state, double L,
                                  const RkOptions& options, Execution exec) {
  std::vector<double> out(lambdas.size());
  for_each_index(exec, lambdas.size(), [&](std::size_t i) {
    out[i] = rk_reconstruct(lambdas[i], state, L, options).mismatch;
  });
  return out;
}

VerifyEntry verify_mode(const EigenMode& mode, const PerturbationOperator& op, const StationaryState& state,
                        const RkOptions& options) {
  VerifyEntry e;
  e.lambda = mode.lambda;
  e.ode_residual = ode_residual(mode, op);
  const Reconstruction rec = rk_reconstruct(mode.lambda, state, op.grid.L, options);
  e.mismatch = rec.mismatch;
  e.cosine = rec.blowup ? 0.0 : cosine_similarity(rec, mode, op.grid);
  return e;
}

}  // namespace sn
