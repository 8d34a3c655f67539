#include <doctest.h>

#include "support.hpp"
#include "tmpdir.hpp"

#include "sn/errors.hpp"
#include "sn/io.hpp"

#include <fstream>

using namespace sn;
namespace fs = std::filesystem;

TEST_CASE("state JSON round trip is lossless") {
  const auto& s = support::state(1);
  const auto back = io::state_from_json(io::json::parse(io::state_to_json(s).dump()));
  CHECK(back.n == s.n);
  CHECK(back.energy == s.energy);
  CHECK(back.eigenvalue == s.eigenvalue);
  CHECK(back.tail_coefficient == s.tail_coefficient);
  CHECK(back.central_amplitude == s.central_amplitude);
  CHECK(back.kinetic == s.kinetic);
  CHECK(back.r0.grid() == s.r0.grid());
  CHECK(back.r0.values() == s.r0.values());
  CHECK(back.u0.values() == s.u0.values());
}

TEST_CASE("malformed state JSON is a format error") {
  CHECK_THROWS_AS(io::state_from_json(io::json::parse(R"({"n": 1})")), FormatError);
  auto j = io::state_to_json(support::state(0));
  j["format_version"] = 99;
  CHECK_THROWS_AS(io::state_from_json(j), FormatError);
}

TEST_CASE("full-precision number formatting") {
  CHECK(io::fmt(0.1) == "0.10000000000000001");
  CHECK(std::stod(io::fmt(-0.16276912345678901)) == -0.16276912345678901);
}

TEST_CASE("atomic writes leave only the target") {
  support::TempDir d;
  const fs::path p = d.path / "sub" / "x.txt";
  io::write_text_atomic(p, "hello\n");
  CHECK(io::read_text(p) == "hello\n");
  io::write_text_atomic(p, "again\n");
  CHECK(io::read_text(p) == "again\n");
  int files = 0;
  for (const auto& e : fs::directory_iterator(d.path / "sub")) files += e.is_regular_file();
  CHECK(files == 1);
  CHECK_THROWS_AS(io::read_text(d.path / "none"), IoError);
  // a regular file where a directory is needed
  CHECK_THROWS_AS(io::write_text_atomic(p / "child.txt", "x"), IoError);
}

TEST_CASE("CSV tables carry the header block") {
  io::Header h{{{"command", "test"}, {"n", "3"}}, "0123456789ab"};
  io::CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  CHECK_THROWS_AS(t.add_row({"1"}), DimensionError);
  const std::string s = t.render(h);
  CHECK(s.find("# run_id: 0123456789ab") != std::string::npos);
  CHECK(s.find("command") != std::string::npos);
  CHECK(s.find("\na,b\n1,2\n") != std::string::npos);
  CHECK(h.to_json().at("params").at("n") == "3");
  CHECK(io::make_run_id().size() == 12);
  CHECK(io::make_run_id() != io::make_run_id());
}

TEST_CASE("state cache: hit, stale and corrupt files") {
  support::TempDir d;
  bool hit = true;
  const auto a = io::load_or_shoot(0, d.path, io::CachePolicy::RejectStale, {}, &hit);
  CHECK_FALSE(hit);
  CHECK(fs::exists(io::state_cache_path(d.path, 0)));
  const auto b = io::load_or_shoot(0, d.path, io::CachePolicy::RejectStale, {}, &hit);
  CHECK(hit);
  CHECK(b.energy == a.energy);
  CHECK(b.r0.values() == a.r0.values());

  auto j = io::state_to_json(a);
  j["solver_version"] = "older";
  io::write_text_atomic(io::state_cache_path(d.path, 0), j.dump());
  CHECK_THROWS_AS(io::load_or_shoot(0, d.path, io::CachePolicy::RejectStale), StaleCache);
  const auto c = io::load_or_shoot(0, d.path, io::CachePolicy::RecomputeStale, {}, &hit);
  CHECK_FALSE(hit);
  CHECK(c.energy == a.energy);
  CHECK(io::json::parse(io::read_text(io::state_cache_path(d.path, 0))).at("solver_version") == io::kSolverVersion);

  io::write_text_atomic(io::state_cache_path(d.path, 0), "{not json");
  CHECK_THROWS_AS(io::load_or_shoot(0, d.path, io::CachePolicy::RecomputeStale), FormatError);
}

TEST_CASE("report JSON lists every mode with its class") {
  const auto a = support::analysis(0, 30, 150.0);
  const auto j = io::report_to_json(a.report);
  CHECK(j.at("modes").size() == a.report.modes.size());
  CHECK(j.at("quadruple_count") == 0);
  CHECK(j.at("modes")[0].at("class") == "ZeroMode");
  const auto ev = io::eigenvectors_to_json(a.report);
  CHECK(ev.size() == a.report.modes.size());
}
