#pragma once

#include "sn/stability.hpp"
#include "sn/stationary.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace sn::io {

inline constexpr int kFormatVersion = 1;
// Bumped whenever the shooting numerics change; cached states carrying a
// different string are stale.
inline constexpr const char* kSolverVersion = "shoot-rk4-1e5-v1";

using json = nlohmann::json;

// Full-precision decimal text (17 significant digits).
std::string fmt(double v);

// Writes next to `path` and renames into place.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

json state_to_json(const StationaryState& state);
StationaryState state_from_json(const json& j);

json report_to_json(const StabilityReport& report);
json eigenvectors_to_json(const StabilityReport& report);

// Header block carried by every CSV (as # comments) and JSON (as "header").
struct Header {
  std::vector<std::pair<std::string, std::string>> params;
  std::string run_id;
  std::string comment_block() const;
  json to_json() const;
};
std::string make_run_id();

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void add_row(std::vector<std::string> cells);
  std::string render(const Header& header) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

enum class CachePolicy { RecomputeStale, RejectStale };

std::filesystem::path state_cache_path(const std::filesystem::path& cache_dir, int n);

// Returns the cached state for n if present and current, otherwise shoots and
// stores it. With RejectStale a version mismatch raises StaleCache.
StationaryState load_or_shoot(int n, const std::filesystem::path& cache_dir, CachePolicy policy,
                              const ShootOptions& options = {}, bool* cache_hit = nullptr);

}  // namespace sn::io
