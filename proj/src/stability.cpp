#include "sn/stability.hpp"

#include "sn/diagnostics.hpp"
#include "sn/errors.hpp"
#include "sn/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sn {

namespace {

constexpr double kThirdStateEnergy = -0.0125;
constexpr double kInfiniteRatio = 1e9;  // |α/β| above this is an infinite generalized eigenvalue

double sup(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

const char* to_string(ModeClass c) {
  switch (c) {
    case ModeClass::ZeroMode: return "ZeroMode";
    case ModeClass::ImaginaryPair: return "ImaginaryPair";
    case ModeClass::ComplexQuadruple: return "ComplexQuadruple";
    case ModeClass::Spurious: return "Spurious";
  }
  return "?";
}

NodeProfiles sample_nodes(const StationaryState& state, const ChebyshevGrid& grid, NodeSampling sampling) {
  const ProfilePair ext = state.extended(grid.L);
  NodeProfiles out;
  out.r0 = resample(ext.psi, grid);
  out.u0 = resample(ext.u, grid);
  if (sampling == NodeSampling::Interpolated) return out;

  // Newton on S = rR0, V = rU0 at the interior nodes; S vanishes at both
  // ends, V at the origin, and V(L) = L·U0(L).
  const int m = grid.N - 1;
  const Eigen::VectorXd ri = grid.interior_radii();
  const Eigen::MatrixXd& D2t = grid.D2_trimmed;
  const Eigen::VectorXd bcol = grid.D2.block(1, 0, m, 1);
  const double v_end = grid.L * state.u0_at(grid.L);

  Eigen::VectorXd S = out.r0.cwiseProduct(ri);
  Eigen::VectorXd V = out.u0.cwiseProduct(ri);
  Eigen::VectorXd F(2 * m);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  double res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 30; ++it) {
    F.head(m) = D2t * S + S.cwiseProduct(V).cwiseQuotient(ri);
    F.tail(m) = D2t * V + bcol * v_end + S.cwiseProduct(S).cwiseQuotient(ri);
    res = F.cwiseAbs().maxCoeff();
    out.newton_iterations = it;
    if (res < 1e-13) break;
    J.setZero();
    J.topLeftCorner(m, m) = D2t;
    J.topLeftCorner(m, m).diagonal() += V.cwiseQuotient(ri);
    J.topRightCorner(m, m).diagonal() = S.cwiseQuotient(ri);
    J.bottomLeftCorner(m, m).diagonal() = 2.0 * S.cwiseQuotient(ri);
    J.bottomRightCorner(m, m) = D2t;
    const Eigen::VectorXd d = J.partialPivLu().solve(-F);
    S += d.head(m);
    V += d.tail(m);
    // stalls at round-off level
    if (d.cwiseAbs().maxCoeff() < 1e-15 * (1.0 + S.cwiseAbs().maxCoeff())) {
      F.head(m) = D2t * S + S.cwiseProduct(V).cwiseQuotient(ri);
      F.tail(m) = D2t * V + bcol * v_end + S.cwiseProduct(S).cwiseQuotient(ri);
      res = F.cwiseAbs().maxCoeff();
      break;
    }
  }
  if (!(res < 1e-8)) {
    std::ostringstream msg;
    msg << "sample_nodes: Newton polish stalled at residual " << res;
    throw SolverError(msg.str(), res);
  }
  out.r0 = S.cwiseQuotient(ri);
  out.u0 = V.cwiseQuotient(ri);
  out.newton_residual = res;
  return out;
}

PerturbationOperator assemble_from_nodes(const ChebyshevGrid& grid, const Eigen::VectorXd& r0,
                                         const Eigen::VectorXd& u0) {
  const int m = grid.N - 1;
  if (r0.size() != m || u0.size() != m) throw DimensionError("assemble: node vectors must have N-1 entries");
  PerturbationOperator op;
  op.grid = grid;
  op.r0 = r0;
  op.u0 = u0;

  const Eigen::MatrixXd& D2t = grid.D2_trimmed;
  Eigen::MatrixXd H = D2t;
  H.diagonal() += u0;
  const Eigen::MatrixXd R = r0.asDiagonal();

  op.lhs = Eigen::MatrixXd::Zero(3 * m, 3 * m);
  op.lhs.block(0, 0, m, m) = -2.0 * R;
  op.lhs.block(0, 2 * m, m, m) = D2t;
  op.lhs.block(m, m, m, m) = H;
  op.lhs.block(2 * m, 0, m, m) = -H;
  op.lhs.block(2 * m, 2 * m, m, m) = R;

  op.rhs = Eigen::MatrixXd::Zero(3 * m, 3 * m);
  op.rhs.block(m, 0, m, m) = -Eigen::MatrixXd::Identity(m, m);
  op.rhs.block(2 * m, m, m, m) = Eigen::MatrixXd::Identity(m, m);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(D2t);
  const double rc = lu.rcond();
  op.d2t_condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  op.d2t_inverse = lu.inverse();

  op.reduced = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  op.reduced.block(0, m, m, m) = H;
  op.reduced.block(m, 0, m, m) = H - 2.0 * R * op.d2t_inverse * R;
  return op;
}

PerturbationOperator assemble(const StationaryState& state, const ChebyshevGrid& grid, NodeSampling sampling) {
  const NodeProfiles nodes = sample_nodes(state, grid, sampling);
  return assemble_from_nodes(grid, nodes.r0, nodes.u0);
}

void normalize_mode(EigenMode& mode, const ChebyshevGrid& grid) {
  Eigen::Index k = 0;
  if (mode.B.size()) mode.B.cwiseAbs().maxCoeff(&k);
  cplx phase = (mode.B.size() && std::abs(mode.B(k)) > 0.0) ? std::abs(mode.B(k)) / mode.B(k) : cplx(1.0);
  const Eigen::VectorXd dens = pad(Eigen::VectorXd(mode.A.cwiseAbs2() + mode.B.cwiseAbs2()));
  const double norm2 = quad(dens, grid);
  if (norm2 > 0.0) phase /= std::sqrt(norm2);
  mode.A *= phase;
  mode.B *= phase;
  mode.W *= phase;
}

std::vector<EigenMode> solve_reduced(const PerturbationOperator& op) {
  if (op.d2t_condition > 1e14) {
    std::ostringstream msg;
    msg << "solve_reduced: trimmed second-derivative matrix has condition " << op.d2t_condition;
    throw IllConditioned(msg.str());
  }
  const Eigen::Index m = op.grid.N - 1;
  Eigen::EigenSolver<Eigen::MatrixXd> es(op.reduced, true);
  if (es.info() != Eigen::Success) throw SolverError("solve_reduced: eigensolver did not converge", op.d2t_condition);
  std::vector<EigenMode> out;
  out.reserve(2 * m);
  const cplx I(0.0, 1.0);
  const Eigen::MatrixXcd rinv = op.d2t_inverse.cast<cplx>();
  for (Eigen::Index i = 0; i < 2 * m; ++i) {
    EigenMode md;
    md.lambda = I * es.eigenvalues()(i);
    const Eigen::VectorXcd v = es.eigenvectors().col(i);
    md.A = v.head(m);
    md.B = v.tail(m);
    md.W = rinv * (2.0 * op.r0.cast<cplx>().cwiseProduct(md.A));
    normalize_mode(md, op.grid);
    out.push_back(std::move(md));
  }
  return out;
}

std::vector<EigenMode> solve_full(const PerturbationOperator& op) {
  const Eigen::Index m = op.grid.N - 1;
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(op.lhs, op.rhs, true);
  if (ges.info() != Eigen::Success) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op.lhs);
    const auto& s = svd.singularValues();
    throw SolverError("solve_full: QZ iteration did not converge", s(0) / s(s.size() - 1));
  }
  const cplx I(0.0, 1.0);
  std::vector<EigenMode> out;
  out.reserve(3 * m);
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  const Eigen::MatrixXcd vecs = ges.eigenvectors();
  for (Eigen::Index i = 0; i < 3 * m; ++i) {
    EigenMode md;
    const cplx a = alphas(i);
    const double b = betas(i);
    md.finite = std::abs(b) * kInfiniteRatio > std::abs(a);
    md.lambda = md.finite ? -I * (a / b) : cplx(std::numeric_limits<double>::infinity(), 0.0);
    const Eigen::VectorXcd v = vecs.col(i);
    md.A = v.segment(0, m);
    md.B = v.segment(m, m);
    md.W = v.segment(2 * m, m);
    if (md.finite) normalize_mode(md, op.grid);
    out.push_back(std::move(md));
  }
  return out;
}

std::vector<cplx> StabilityReport::positive_imaginary() const {
  std::vector<cplx> out;
  for (const auto& m : modes)
    if (m.cls == ModeClass::ImaginaryPair && m.lambda.imag() > 0.0) out.push_back(m.lambda);
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
  return out;
}

std::vector<cplx> StabilityReport::quadruple_representatives() const {
  std::vector<cplx> out;
  for (const auto& m : modes) {
    if (m.cls != ModeClass::ComplexQuadruple) continue;
    if (m.lambda.real() <= 0.0 || m.lambda.imag() < 0.0) continue;
    out.push_back(m.lambda);
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  return out;
}

StabilityReport classify(std::vector<EigenMode> modes, const ChebyshevGrid& grid,
                         const Eigen::VectorXd& r0_nodes, const Tolerances& tol) {
  std::stable_sort(modes.begin(), modes.end(), [](const EigenMode& a, const EigenMode& b) {
    if (a.finite != b.finite) return a.finite;
    return std::abs(a.lambda) < std::abs(b.lambda);
  });
  StabilityReport rep;
  rep.N = grid.N;
  rep.L = grid.L;
  const std::size_t n = modes.size();
  std::vector<bool> used(n, false);
  for (auto& m : modes) m.cls = ModeClass::Spurious;

  // zero mode: B along r·R0, A and W negligible
  const Eigen::VectorXcd shape = grid.interior_radii().cwiseProduct(r0_nodes).cast<cplx>();
  for (std::size_t i = 0; i < n; ++i) {
    auto& m = modes[i];
    if (!m.finite || std::abs(m.lambda) >= tol.zero) continue;
    const double sb = sup(m.B);
    if (!(sb > 0.0)) continue;
    const double cosine = std::abs(shape.dot(m.B)) / (shape.norm() * m.B.norm());
    if (sup(m.A) / sb < tol.shape && sup(m.W) / sb < tol.shape && cosine > tol.cosine) {
      m.cls = ModeClass::ZeroMode;
      used[i] = true;
      if (!rep.zero_mode) rep.zero_mode = i;
    }
  }

  auto nearest = [&](std::size_t self, cplx target, double scale) -> std::optional<std::size_t> {
    std::optional<std::size_t> best;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == self || used[j] || !modes[j].finite) continue;
      const double d = std::abs(modes[j].lambda - target);
      if (d < bd) bd = d, best = j;
    }
    if (best && bd <= tol.pair * scale) return best;
    return std::nullopt;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (used[i] || !modes[i].finite) continue;
    const cplx l = modes[i].lambda;
    const double scale = std::abs(l);
    if (std::abs(l.real()) < tol.real) {
      // λ = iν pairs with −iν, which is both −λ and conj λ up to the tiny real part
      auto j = nearest(i, -l, scale);
      auto k = nearest(i, std::conj(l), scale);
      if (!j || (k && std::abs(modes[*k].lambda - std::conj(l)) < std::abs(modes[*j].lambda + l))) j = k;
      if (j) {
        used[i] = used[*j] = true;
        modes[i].cls = modes[*j].cls = ModeClass::ImaginaryPair;
      }
      continue;
    }
    std::vector<cplx> targets{-l};
    if (std::abs(l.imag()) >= tol.real) {
      targets.push_back(std::conj(l));
      targets.push_back(-std::conj(l));
    }
    used[i] = true;
    std::vector<std::size_t> found;
    for (cplx t : targets) {
      auto j = nearest(i, t, scale);
      if (!j) break;
      used[*j] = true;
      found.push_back(*j);
    }
    if (found.size() == targets.size()) {
      modes[i].cls = ModeClass::ComplexQuadruple;
      for (auto j : found) modes[j].cls = ModeClass::ComplexQuadruple;
      ++rep.quadruple_count;
    } else {
      used[i] = false;
      for (auto j : found) used[j] = false;
    }
  }

  int spurious = 0;
  double max_re = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = modes[i];
    if (m.cls == ModeClass::Spurious) {
      if (m.finite) ++spurious;
      continue;
    }
    if (m.cls != ModeClass::ZeroMode) max_re = std::max(max_re, std::abs(m.lambda.real()));
  }
  rep.max_re = max_re < tol.real ? 0.0 : max_re;
  if (spurious > 0) {
    std::ostringstream msg;
    msg << spurious << " finite eigenvalue(s) without symmetry partners tagged Spurious";
    rep.warnings.push_back(msg.str());
  }
  if (!rep.zero_mode) rep.warnings.push_back("no zero mode identified");
  rep.modes = std::move(modes);
  return rep;
}

double dichotomy_q(const EigenMode& mode, const ChebyshevGrid& grid) {
  const Eigen::VectorXcd A = pad(mode.A), B = pad(mode.B);
  const double na = quad(Eigen::VectorXd(A.cwiseAbs2()), grid);
  const double nb = quad(Eigen::VectorXd(B.cwiseAbs2()), grid);
  if (!(na > 0.0) || !(nb > 0.0)) throw DegenerateMode("dichotomy_q: A or B vanishes");
  const Eigen::VectorXcd prod = A.conjugate().cwiseProduct(B);
  return std::abs(quad(prod, grid)) / std::sqrt(na * nb);
}

RayleighResidual rayleigh_residual(const EigenMode& mode, const PerturbationOperator& op) {
  const ChebyshevGrid& g = op.grid;
  const Eigen::MatrixXcd Dr = g.Dr().cast<cplx>();
  const Eigen::VectorXcd A = pad(mode.A), B = pad(mode.B), W = pad(mode.W);
  const Eigen::VectorXd U = pad(op.u0);
  const cplx mi(0.0, -1.0);

  // Products of two degree-N interpolants are integrated exactly on 2N+1 nodes;
  // the U0 terms stay on the collocation nodes, where U0 is known.
  const int M = 2 * g.N;
  const Eigen::MatrixXcd P = interpolation_matrix(g.N, M).cast<cplx>();
  const Eigen::VectorXd wf = kernels::serial::clenshaw_curtis_weights(M);
  auto fine = [&](const Eigen::VectorXcd& f, const Eigen::VectorXcd& h) {
    const Eigen::VectorXcd pf = P * f, ph = P * h;
    return 0.5 * g.L * (wf.cast<cplx>().transpose() * pf.conjugate().cwiseProduct(ph))(0);
  };

  const cplx ab = fine(A, B);
  const double ua = quad(Eigen::VectorXd(U.cwiseProduct(A.cwiseAbs2())), g);
  const double ar = fine(Dr * A, Dr * A).real();
  const double wr = fine(Dr * W, Dr * W).real();
  const cplx t1 = mi * mode.lambda * ab;
  const double rhs1 = ua - ar + 0.5 * wr;
  const double s1 = std::abs(t1) + std::abs(ua) + ar + 0.5 * wr;

  const cplx t2 = mi * mode.lambda * std::conj(ab);
  const double ub = quad(Eigen::VectorXd(U.cwiseProduct(B.cwiseAbs2())), g);
  const double br = fine(Dr * B, Dr * B).real();
  const double rhs2 = ub - br;
  const double s2 = std::abs(t2) + std::abs(ub) + br;

  RayleighResidual r;
  r.first = s1 > 0.0 ? std::abs(t1 - rhs1) / s1 : 0.0;
  r.second = s2 > 0.0 ? std::abs(t2 - rhs2) / s2 : 0.0;
  r.first_imag = s1 > 0.0 ? std::abs(t1.imag()) / s1 : 0.0;
  r.second_imag = s2 > 0.0 ? std::abs(t2.imag()) / s2 : 0.0;
  return r;
}

double cross_check(const std::vector<EigenMode>& full, const std::vector<EigenMode>& reduced, int count,
                   double tol_zero) {
  std::vector<cplx> a, b;
  for (const auto& m : reduced)
    if (m.finite && std::abs(m.lambda) >= tol_zero) a.push_back(m.lambda);
  for (const auto& m : full)
    if (m.finite && std::abs(m.lambda) >= tol_zero) b.push_back(m.lambda);
  if (b.empty()) throw SolverError("cross_check: full solver returned no finite eigenvalues", 0.0);
  std::sort(a.begin(), a.end(), [](cplx x, cplx y) { return std::abs(x) < std::abs(y); });
  double worst = 0.0;
  for (int i = 0; i < count && i < static_cast<int>(a.size()); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (cplx z : b) best = std::min(best, std::abs(z - a[i]));
    worst = std::max(worst, best / std::abs(a[i]));
  }
  return worst;
}

StabilityReport analyze(const StationaryState& state, const ChebyshevGrid& grid, const AnalysisOptions& options) {
  const PerturbationOperator op = assemble(state, grid, options.sampling);
  std::vector<EigenMode> modes;
  std::optional<double> agreement;
  if (options.solver == Solver::Full) {
    modes = solve_full(op);
  } else {
    modes = solve_reduced(op);
    if (options.solver == Solver::Both) agreement = cross_check(solve_full(op), modes, 10, options.tol.zero);
  }
  StabilityReport rep = classify(std::move(modes), grid, op.r0, options.tol);
  rep.n = state.n;
  rep.energy = state.energy;
  rep.bound = growth_bound(state.energy);
  rep.cross_check = agreement;
  for (const auto& m : rep.modes) {
    if (m.cls == ModeClass::Spurious || m.cls == ModeClass::ZeroMode) continue;
    rep.dichotomy.push_back({m.lambda, dichotomy_q(m, grid)});
    rep.rayleigh_residuals.push_back(rayleigh_residual(m, op).max());
  }
  return rep;
}

double default_length(int n, double energy) {
  if (n <= 1) return 150.0;
  if (n == 2) return 450.0;
  return 450.0 * std::abs(kThirdStateEnergy) / std::abs(energy);
}

std::vector<SweepPoint> convergence_sweep(const StationaryState& state, SweepParameter param,
                                          const std::vector<double>& values, int tracked, double fixed,
                                          const AnalysisOptions& options, Execution exec, bool keep_going) {
  if (tracked < 1) throw Error("convergence_sweep: tracked index is 1-based");
  for (std::size_t i = 1; i < values.size(); ++i)
    if (!(values[i] > values[i - 1])) throw Error("convergence_sweep: values must be ascending");
  AnalysisOptions opt = options;
  opt.solver = Solver::Reduced;
  std::vector<SweepPoint> out(values.size());
  for_each_index(exec, values.size(), [&](std::size_t i) {
    const double v = values[i];
    const int N = param == SweepParameter::N ? static_cast<int>(std::lround(v)) : static_cast<int>(std::lround(fixed));
    const double L = param == SweepParameter::L ? v : fixed;
    SweepPoint p;
    p.value = v;
    const auto im = analyze(state, build_grid(N, L, Execution::Serial), opt).positive_imaginary();
    if (static_cast<int>(im.size()) < tracked) {
      p.lost = true;
      p.note = "only " + std::to_string(im.size()) + " imaginary modes";
      p.lambda = cplx(std::nan(""), std::nan(""));
    } else {
      p.lambda = im[static_cast<std::size_t>(tracked - 1)];
    }
    out[i] = p;
  });
  if (!keep_going)
    for (const auto& p : out)
      if (p.lost) throw TrackingLost("convergence_sweep: tracked mode lost (" + p.note + ")", p.value);
  return out;
}

}  // namespace sn
