#include "cli.hpp"

#include "sn/diagnostics.hpp"
#include "sn/errors.hpp"
#include "sn/io.hpp"
#include "sn/stability.hpp"
#include "sn/stationary.hpp"
#include "sn/verify.hpp"

#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace sn::cli {

namespace {

namespace fs = std::filesystem;
using io::fmt;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reference growth rates and printed bound column, states 1..6.
constexpr std::array<double, 6> kReferenceMaxRe{0.0, 0.00139, 0.000520, 0.000225, 0.000114, 0.0000653};
constexpr std::array<double, 6> kReferenceBound{0.00362, 0.00158, 0.00101, 0.000738, 0.000583, 0.000482};

struct Options {
  int n = 0;
  int n_max = 20;
  int N = 60;
  std::optional<double> L;
  std::string solver = "reduced";
  std::string sampling = "polished";
  std::string out = "out";
  std::string cache_dir;
  std::string param = "N";
  std::vector<double> values;
  int track = 5;
  int verify_count = 10;
  bool eigenvectors = false;
  std::optional<double> G, m, hbar;
  double t = 0.0;
  bool serial = false;
};

fs::path cache_of(const Options& o) { return o.cache_dir.empty() ? fs::path(o.out) / "cache" : fs::path(o.cache_dir); }

Execution exec_of(const Options& o) { return o.serial ? Execution::Serial : Execution::Parallel; }

AnalysisOptions analysis_of(const Options& o) {
  AnalysisOptions a;
  if (o.solver == "full") a.solver = Solver::Full;
  else if (o.solver == "both") a.solver = Solver::Both;
  a.sampling = o.sampling == "interp" ? NodeSampling::Interpolated : NodeSampling::Polished;
  return a;
}

std::string cls_of(const EigenMode& m) { return m.finite ? to_string(m.cls) : "Infinite"; }

int cmd_states(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n_max < 0 || o.n_max > 50) throw UsageError("--n-max must lie in [0, 50]");
  const std::size_t count = static_cast<std::size_t>(o.n_max) + 1;
  std::vector<std::optional<StationaryState>> states(count);
  std::vector<std::string> failures(count);
  std::vector<char> hits(count, 0);
  const fs::path cache = cache_of(o);
  for_each_index(exec_of(o), count, [&](std::size_t i) {
    try {
      bool hit = false;
      states[i] = io::load_or_shoot(static_cast<int>(i), cache, io::CachePolicy::RecomputeStale, {}, &hit);
      hits[i] = hit;
    } catch (const Error& e) {
      failures[i] = e.what();
    }
  });

  io::Header h{{{"command", "states"}, {"n_max", std::to_string(o.n_max)}}, io::make_run_id()};
  io::CsvTable spectrum({"n", "E", "T", "V", "conserved_energy", "virial_residual", "status"});
  std::vector<SpectrumEntry> table;
  int failed = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (!states[i]) {
      ++failed;
      err << "state n=" << i << ": " << failures[i] << "\n";
      spectrum.add_row({std::to_string(i), "nan", "nan", "nan", "nan", "nan", "error"});
      continue;
    }
    const auto& s = *states[i];
    table.push_back({s.n, s.energy});
    spectrum.add_row({std::to_string(i), fmt(s.energy), fmt(s.kinetic), fmt(s.potential), fmt(s.conserved_energy),
                      fmt(virial_check(s).max()), "ok"});
  }
  io::write_text_atomic(fs::path(o.out) / "spectrum.csv", spectrum.render(h));

  io::Header hl = h;
  try {
    hl.params.push_back({"slope_10_20", fmt(loglog_slope(table, 10, 20))});
  } catch (const Error&) {
  }
  io::CsvTable loglog({"n", "E", "log_n", "log_abs_E"});
  for (const auto& e : table) {
    if (e.n < 1) continue;
    loglog.add_row({std::to_string(e.n), fmt(e.energy), fmt(std::log(double(e.n))), fmt(std::log(std::abs(e.energy)))});
  }
  io::write_text_atomic(fs::path(o.out) / "loglog.csv", loglog.render(hl));

  int cached = 0;
  for (char c : hits) cached += c;
  out << "states 0.." << o.n_max << ": " << count - failed << " solved (" << cached << " from cache), " << failed
      << " failed\n";
  return failed ? kSolverError : kOk;
}

int cmd_stability(const Options& o, std::ostream& out, std::ostream&) {
  if (o.n < 0) throw UsageError("--n must be nonnegative");
  const StationaryState s = io::load_or_shoot(o.n, cache_of(o), io::CachePolicy::RejectStale);
  const double L = o.L.value_or(default_length(o.n, s.energy));
  const ChebyshevGrid grid = build_grid(o.N, L);
  const AnalysisOptions a = analysis_of(o);
  StabilityReport rep = analyze(s, grid, a);

  // RK cross-validation of the lowest nontrivial modes (upper half plane)
  const PerturbationOperator op = assemble(s, grid, a.sampling);
  std::vector<const EigenMode*> picked;
  for (const auto& m : rep.modes) {
    if (static_cast<int>(picked.size()) >= o.verify_count) break;
    if (m.cls == ModeClass::Spurious || m.cls == ModeClass::ZeroMode || m.lambda.imag() < 0.0) continue;
    picked.push_back(&m);
  }
  rep.verification.resize(picked.size());
  for_each_index(exec_of(o), picked.size(), [&](std::size_t i) { rep.verification[i] = verify_mode(*picked[i], op, s); });

  const fs::path dir = fs::path(o.out) / ("stability_n" + std::to_string(o.n));
  io::Header h{{{"command", "stability"},
                {"n", std::to_string(o.n)},
                {"N", std::to_string(o.N)},
                {"L", fmt(L)},
                {"solver", o.solver},
                {"sampling", o.sampling}},
               io::make_run_id()};

  io::CsvTable modes({"index", "re", "im", "abs", "class"});
  for (std::size_t i = 0; i < rep.modes.size(); ++i) {
    const auto& m = rep.modes[i];
    if (!m.finite) continue;
    modes.add_row({std::to_string(i), fmt(m.lambda.real()), fmt(m.lambda.imag()), fmt(std::abs(m.lambda)), cls_of(m)});
  }
  io::write_text_atomic(dir / "modes.csv", modes.render(h));

  io::CsvTable dich({"re", "im", "Q", "class"});
  std::size_t k = 0;
  for (const auto& m : rep.modes) {
    if (m.cls == ModeClass::Spurious || m.cls == ModeClass::ZeroMode) continue;
    const auto& d = rep.dichotomy[k++];
    dich.add_row({fmt(d.lambda.real()), fmt(d.lambda.imag()), fmt(d.q), cls_of(m)});
  }
  io::write_text_atomic(dir / "dichotomy.csv", dich.render(h));

  io::CsvTable ver({"re", "im", "mismatch", "cosine_similarity", "ode_residual"});
  for (const auto& v : rep.verification)
    ver.add_row({fmt(v.lambda.real()), fmt(v.lambda.imag()), fmt(v.mismatch), fmt(v.cosine), fmt(v.ode_residual)});
  io::write_text_atomic(dir / "verify.csv", ver.render(h));

  io::json j = io::report_to_json(rep);
  j["header"] = h.to_json();
  io::write_text_atomic(dir / "report.json", j.dump(2));
  if (o.eigenvectors) io::write_text_atomic(dir / "eigenvectors.json", io::eigenvectors_to_json(rep).dump());

  out << "state n=" << o.n << " E=" << fmt(s.energy) << " N=" << o.N << " L=" << fmt(L) << ": "
      << rep.quadruple_count << " quadruple(s), max Re = " << fmt(rep.max_re) << ", bound = " << fmt(rep.bound);
  if (rep.cross_check) out << ", solver agreement " << fmt(*rep.cross_check);
  out << "\n";
  for (const auto& w : rep.warnings) out << "warning: " << w << "\n";
  return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream&) {
  if (o.values.size() < 3) throw UsageError("--values needs at least three entries");
  if (o.param != "N" && o.param != "L") throw UsageError("--param must be N or L");
  const StationaryState s = io::load_or_shoot(o.n, cache_of(o), io::CachePolicy::RejectStale);
  const SweepParameter p = o.param == "N" ? SweepParameter::N : SweepParameter::L;
  const double fixed = p == SweepParameter::N ? o.L.value_or(default_length(o.n, s.energy)) : double(o.N);
  const auto pts = convergence_sweep(s, p, o.values, o.track, fixed, analysis_of(o), exec_of(o), true);

  io::Header h{{{"command", "sweep"},
                {"n", std::to_string(o.n)},
                {"param", o.param},
                {p == SweepParameter::N ? "L" : "N", fmt(fixed)},
                {"track", std::to_string(o.track)},
                {"sampling", o.sampling}},
               io::make_run_id()};
  io::CsvTable t({"value", "re", "im", "lost"});
  for (const auto& q : pts) t.add_row({fmt(q.value), fmt(q.lambda.real()), fmt(q.lambda.imag()), q.lost ? "1" : "0"});
  io::write_text_atomic(fs::path(o.out) / ("sweep_" + o.param + ".csv"), t.render(h));
  for (const auto& q : pts)
    out << o.param << "=" << fmt(q.value) << "  " << (q.lost ? "lost" : fmt(q.lambda.imag()) + "i") << "\n";
  return kOk;
}

int cmd_bounds(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.n_max < 1) throw UsageError("--n-max counts states from 1");
  std::vector<int> missing;
  std::vector<io::json> reports;
  for (int label = 1; label <= o.n_max; ++label) {
    const fs::path p = fs::path(o.out) / ("stability_n" + std::to_string(label - 1)) / "report.json";
    if (!fs::exists(p)) {
      missing.push_back(label - 1);
      continue;
    }
    reports.push_back(io::json::parse(io::read_text(p)));
  }
  if (!missing.empty()) {
    std::ostringstream msg;
    msg << "missing stability reports; run first:";
    for (int n : missing) msg << " `stability --n " << n << "`";
    throw IoError(msg.str());
  }

  io::Header h{{{"command", "bounds"}, {"n_max", std::to_string(o.n_max)}}, io::make_run_id()};
  io::CsvTable t({"state", "n", "E", "max_re", "bound", "within_bound", "reference_max_re", "reference_bound",
                  "intrinsic_bound"});
  bool ok = true;
  for (int label = 1; label <= o.n_max; ++label) {
    const auto& r = reports[static_cast<std::size_t>(label - 1)];
    const int n = label - 1;
    const double E = r.at("E").get<double>();
    const double max_re = r.at("max_re").get<double>();
    const double bound = growth_bound(E);
    const StationaryState s = io::load_or_shoot(n, cache_of(o), io::CachePolicy::RejectStale);
    const bool within = max_re <= bound;
    ok = ok && within;
    const bool has_ref = label <= static_cast<int>(kReferenceMaxRe.size());
    t.add_row({std::to_string(label), std::to_string(n), fmt(E), fmt(max_re), fmt(bound), within ? "1" : "0",
               has_ref ? fmt(kReferenceMaxRe[label - 1]) : "", has_ref ? fmt(kReferenceBound[label - 1]) : "",
               fmt(intrinsic_growth_bound(s))});
    out << "state " << label << ": max Re = " << fmt(max_re) << ", bound = " << fmt(bound) << (within ? "" : "  VIOLATED")
        << "\n";
  }
  io::write_text_atomic(fs::path(o.out) / "bounds.csv", t.render(h));
  if (!ok) err << "computed growth rate exceeds the bound\n";
  return ok ? kOk : kSolverError;
}

int cmd_convert(const Options& o, std::ostream& out, std::ostream&) {
  if (!o.G || !o.m || !o.hbar) throw UsageError("convert needs --G, --m and --hbar");
  PhysicalScales sc{*o.G, *o.m, *o.hbar};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", time_to_si(sc, o.t));
  out << buf << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stationary states of the Schrodinger-Newton equations and their linear stability"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file mirroring the flags");
  Options o;
  app.add_option("--n", o.n, "State index (number of zeros)");
  app.add_option("--n-max", o.n_max, "Highest state index (states) or state label (bounds)");
  app.add_option("--N", o.N, "Chebyshev degree");
  app.add_option("--L", o.L, "Domain length (default depends on the state)");
  app.add_option("--solver", o.solver, "Eigensolver")->check(CLI::IsMember({"reduced", "full", "both"}));
  app.add_option("--sampling", o.sampling, "Node sampling of R0, U0")->check(CLI::IsMember({"polished", "interp"}));
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--cache-dir", o.cache_dir, "State cache (default <out>/cache)");
  app.add_option("--param", o.param, "Sweep parameter")->check(CLI::IsMember({"N", "L"}));
  app.add_option("--values", o.values, "Sweep values")->delimiter(',');
  app.add_option("--track", o.track, "Tracked positive imaginary eigenvalue (1-based)");
  app.add_option("--verify-count", o.verify_count, "Modes cross-checked by Runge-Kutta");
  app.add_flag("--eigenvectors", o.eigenvectors, "Also write eigenvectors.json");
  app.add_flag("--serial", o.serial, "Disable OpenMP across independent work items");
  app.add_option("--G", o.G, "Gravitational constant");
  app.add_option("--m", o.m, "Particle mass");
  app.add_option("--hbar", o.hbar, "Reduced Planck constant");
  app.add_option("--t", o.t, "Nondimensional time");

  int code = kOk;
  auto sub = [&](const char* name, const char* help, auto fn) {
    auto* c = app.add_subcommand(name, help);
    c->fallthrough();
    c->callback([&, fn] { code = fn(o, out, err); });
  };
  sub("states", "Solve states 0..n-max, write spectrum.csv and loglog.csv", cmd_states);
  sub("stability", "Stability analysis of state --n", cmd_stability);
  sub("sweep", "Track an eigenvalue while N or L varies", cmd_sweep);
  sub("bounds", "Compare growth rates of states 1..n-max with the analytic bound", cmd_bounds);
  sub("convert", "Convert nondimensional time to seconds", cmd_convert);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kUsageError;
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverError;
  }
  return code;
}

}  // namespace sn::cli
