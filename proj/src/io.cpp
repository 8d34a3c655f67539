#include "sn/io.hpp"

#include "sn/errors.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace sn::io {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(std::random_device{}());
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw IoError("cannot write " + tmp.string());
    f << content;
    if (!f.flush()) throw IoError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

json state_to_json(const StationaryState& s) {
  json j;
  j["format_version"] = kFormatVersion;
  j["solver_version"] = kSolverVersion;
  j["n"] = s.n;
  j["E"] = s.energy;
  j["eigenvalue"] = s.eigenvalue;
  j["tail_coefficient"] = s.tail_coefficient;
  j["central_amplitude"] = s.central_amplitude;
  j["central_potential"] = s.central_potential;
  j["scale"] = s.scale;
  j["fit_residual"] = s.fit_residual;
  j["shooting_radius"] = s.shooting_radius;
  j["grid"] = s.r0.grid();
  j["R0_values"] = s.r0.values();
  j["U0_values"] = s.u0.values();
  j["diagnostics"] = {{"T", s.kinetic}, {"V", s.potential}, {"conserved_energy", s.conserved_energy}, {"I", s.norm}};
  return j;
}

StationaryState state_from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) throw FormatError("state: unsupported format_version");
    StationaryState s;
    s.n = j.at("n").get<int>();
    s.energy = j.at("E").get<double>();
    s.eigenvalue = j.at("eigenvalue").get<double>();
    s.tail_coefficient = j.at("tail_coefficient").get<double>();
    s.central_amplitude = j.at("central_amplitude").get<double>();
    s.central_potential = j.at("central_potential").get<double>();
    s.scale = j.at("scale").get<double>();
    s.fit_residual = j.at("fit_residual").get<double>();
    s.shooting_radius = j.at("shooting_radius").get<double>();
    auto g = j.at("grid").get<std::vector<double>>();
    s.r0 = RadialProfile(g, j.at("R0_values").get<std::vector<double>>());
    s.u0 = RadialProfile(std::move(g), j.at("U0_values").get<std::vector<double>>());
    const auto& d = j.at("diagnostics");
    s.kinetic = d.at("T").get<double>();
    s.potential = d.at("V").get<double>();
    s.conserved_energy = d.at("conserved_energy").get<double>();
    s.norm = d.at("I").get<double>();
    return s;
  } catch (const json::exception& e) {
    throw FormatError(std::string("state: ") + e.what());
  }
}

namespace {
json complex_list(const Eigen::VectorXcd& v) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}
}  // namespace

json report_to_json(const StabilityReport& r) {
  json j;
  j["format_version"] = kFormatVersion;
  j["n"] = r.n;
  j["N"] = r.N;
  j["L"] = r.L;
  j["E"] = r.energy;
  json modes = json::array();
  for (const auto& m : r.modes) {
    if (!m.finite) continue;
    modes.push_back({{"re", m.lambda.real()}, {"im", m.lambda.imag()}, {"class", to_string(m.cls)}});
  }
  j["modes"] = modes;
  j["quadruple_count"] = r.quadruple_count;
  j["zero_mode"] = r.zero_mode ? json(*r.zero_mode) : json(nullptr);
  json dich = json::array();
  for (const auto& d : r.dichotomy) dich.push_back({{"re", d.lambda.real()}, {"im", d.lambda.imag()}, {"Q", d.q}});
  j["dichotomy"] = dich;
  j["rayleigh_residuals"] = r.rayleigh_residuals;
  j["max_re"] = r.max_re;
  j["bound"] = r.bound;
  j["cross_check"] = r.cross_check ? json(*r.cross_check) : json(nullptr);
  json ver = json::array();
  for (const auto& v : r.verification)
    ver.push_back({{"lambda", {{"re", v.lambda.real()}, {"im", v.lambda.imag()}}},
                   {"mismatch", v.mismatch},
                   {"cosine_similarity", v.cosine},
                   {"ode_residual", v.ode_residual}});
  j["verification"] = ver;
  j["warnings"] = r.warnings;
  return j;
}

json eigenvectors_to_json(const StabilityReport& r) {
  json j = json::object();
  for (std::size_t i = 0; i < r.modes.size(); ++i) {
    const auto& m = r.modes[i];
    if (!m.finite) continue;
    j[std::to_string(i)] = {{"re", m.lambda.real()},
                            {"im", m.lambda.imag()},
                            {"class", to_string(m.cls)},
                            {"A", complex_list(m.A)},
                            {"B", complex_list(m.B)},
                            {"W", complex_list(m.W)}};
  }
  return j;
}

std::string Header::comment_block() const {
  std::ostringstream s;
  s << "# format_version: " << kFormatVersion << "\n";
  s << "# solver_version: " << kSolverVersion << "\n";
  s << "# params:";
  for (const auto& [k, v] : params) s << " " << k << "=" << v;
  s << "\n# run_id: " << run_id << "\n";
  return s.str();
}

json Header::to_json() const {
  json p = json::object();
  for (const auto& [k, v] : params) p[k] = v;
  return {{"format_version", kFormatVersion}, {"solver_version", kSolverVersion}, {"params", p}, {"run_id", run_id}};
}

std::string make_run_id() {
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  std::uint64_t h = 1469598103934665603ull;
  std::uint64_t x = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(now).count()) ^
                    (static_cast<std::uint64_t>(std::random_device{}()) << 32);
  for (int i = 0; i < 8; ++i) {
    h ^= (x >> (8 * i)) & 0xff;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%012llx", static_cast<unsigned long long>(h & 0xffffffffffffull));
  return buf;
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw DimensionError("CsvTable: row width differs from header");
  rows_.push_back(std::move(cells));
}

std::string CsvTable::render(const Header& header) const {
  std::ostringstream s;
  s << header.comment_block();
  for (std::size_t i = 0; i < columns_.size(); ++i) s << (i ? "," : "") << columns_[i];
  s << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) s << (i ? "," : "") << row[i];
    s << "\n";
  }
  return s.str();
}

fs::path state_cache_path(const fs::path& cache_dir, int n) {
  return cache_dir / ("state_" + std::to_string(n) + ".json");
}

StationaryState load_or_shoot(int n, const fs::path& cache_dir, CachePolicy policy, const ShootOptions& options,
                              bool* cache_hit) {
  const fs::path p = state_cache_path(cache_dir, n);
  if (cache_hit) *cache_hit = false;
  if (fs::exists(p)) {
    json j;
    try {
      j = json::parse(read_text(p));
    } catch (const json::exception& e) {
      throw FormatError("cache " + p.string() + ": " + e.what());
    }
    const std::string version = j.value("solver_version", std::string());
    if (version == kSolverVersion) {
      StationaryState s = state_from_json(j);
      if (s.n != n) throw FormatError("cache " + p.string() + " holds state " + std::to_string(s.n));
      if (cache_hit) *cache_hit = true;
      return s;
    }
    if (policy == CachePolicy::RejectStale)
      throw StaleCache("cache " + p.string() + " was written by solver '" + version + "', current is '" +
                       kSolverVersion + "'; rerun `states` or delete the file to regenerate");
  }
  StationaryState s = shoot(n, options);
  write_text_atomic(p, state_to_json(s).dump());
  return s;
}

}  // namespace sn::io
