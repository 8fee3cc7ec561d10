#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <unistd.h>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "common.hpp"
#include "shellcir/io.hpp"
#include "shellcir/sweep.hpp"

using namespace shellcir;
using namespace shellcir::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("shellcir_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SweepSpec small_sweep() {
  SweepSpec s;
  s.command = "test";
  s.params = test::params_at(0.53);
  s.trunc = test::small_truncation();
  s.scattering = {ScatteringLength::from_length(0.53), ScatteringLength::from_length(0.6)};
  s.r0 = {0.5, 1.0, 1.5};
  s.n_states = 4;
  s.fidelity = true;
  return s;
}

bool same_points(const SweepOutcome& a, const SweepOutcome& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const auto& x = a.points[i];
    const auto& y = b.points[i];
    if (x.a_index != y.a_index || x.r_index != y.r_index || x.data.rows() != y.data.rows() || x.data.cols() != y.data.cols())
      return false;
    if (std::memcmp(x.data.data(), y.data.data(), sizeof(double) * static_cast<std::size_t>(x.data.size())) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("number formatting round trips") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
      const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
      CHECK(std::strtod(fmt(v).c_str(), nullptr) == v);
    }
    CHECK(fmt(0.5) == "0.5");
  }

  TEST_CASE("key = value config files") {
    const fs::path d = scratch("kv");
    fs::create_directories(d);
    {
      std::ofstream f(d / "ok.cfg");
      f << "# comment\n\n a0 = 0.53 \nstates=14\n";
    }
    const auto kv = read_key_values(d / "ok.cfg");
    REQUIRE(kv.size() == 2);
    CHECK(kv[0] == std::pair<std::string, std::string>{"a0", "0.53"});
    CHECK(kv[1].second == "14");
    {
      std::ofstream f(d / "bad.cfg");
      f << "a0 0.53\n= 3\n";
    }
    try {
      read_key_values(d / "bad.cfg");
      FAIL("no exception");
    } catch (const ConfigError& e) {
      CHECK(e.issues().size() == 2);
    }
    CHECK_THROWS_AS(read_key_values(d / "missing.cfg"), ConfigError);
    fs::remove_all(d);
  }

  TEST_CASE("csv writers") {
    const fs::path d = scratch("csv");
    fs::create_directories(d);
    {
      CsvWriter w(d / "a.csv", {"x", "y"});
      w.row({"1", "2"});
      CHECK_THROWS_AS(w.row({"1"}), std::logic_error);
    }
    CHECK(slurp(d / "a.csv") == "x,y\n1,2\n");
    Eigen::MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    write_matrix_csv(d / "m.csv", "r\\R", {0.0, 1.0}, {0.5, 1.5, 2.5}, m);
    CHECK(slurp(d / "m.csv") == "r\\R,0.5,1.5,2.5\n0,1,2,3\n1,4,5,6\n");
    CHECK_THROWS_AS(write_matrix_csv(d / "m.csv", "c", {0.0}, {0.5}, m), std::logic_error);
    fs::remove_all(d);
  }

  TEST_CASE("hashing") {
    // Published FNV-1a 64-bit test vectors.
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
    CHECK(hex64(0xabcULL) == "0000000000000abc");
    const nlohmann::json a{{"b", 1}, {"a", 2}};
    const nlohmann::json b{{"a", 2}, {"b", 1}};
    CHECK(content_hash(a) == content_hash(b));
    Truncation t;
    Truncation t2 = t;
    t2.rel_grid.elements += 1;
    CHECK(content_hash(to_json(t)) != content_hash(to_json(t2)));
  }

  TEST_CASE("cache round trip and corruption") {
    const fs::path d = scratch("cache");
    fs::create_directories(d);
    Eigen::MatrixXd m(3, 2);
    m << 1.0 / 3.0, -2e-300, 5, 6, 7, 8;
    write_cache(d / "x.bin", 42, m);
    const auto back = read_cache(d / "x.bin", 42);
    REQUIRE(back.has_value());
    CHECK(std::memcmp(back->data(), m.data(), sizeof(double) * 6) == 0);
    CHECK_FALSE(read_cache(d / "none.bin", 42).has_value());
    CHECK_THROWS_AS(read_cache(d / "x.bin", 43), CacheCorrupt);
    {
      std::fstream f(d / "x.bin", std::ios::in | std::ios::out | std::ios::binary);
      f.seekp(40);
      f.put('\x7f');
    }
    CHECK_THROWS_AS(read_cache(d / "x.bin", 42), CacheCorrupt);
    fs::resize_file(d / "x.bin", 20);
    CHECK_THROWS_AS(read_cache(d / "x.bin", 42), CacheCorrupt);
    {
      std::ofstream f(d / "y.bin", std::ios::binary);
      f << "garbage!garbage!";
    }
    CHECK_THROWS_AS(read_cache(d / "y.bin", 42), CacheCorrupt);
    fs::remove_all(d);
  }

  TEST_CASE("manifest round trip and config diffs") {
    const fs::path d = scratch("manifest");
    fs::create_directories(d);
    CHECK_FALSE(read_manifest(d).has_value());
    Manifest m;
    m.command = "spectrum";
    m.config = {{"r0", {0.0, 1.0}}, {"n", 4}};
    m.jobs_total = 2;
    m.jobs_done = 1;
    m.wall_clock_s = 1.5;
    write_manifest(d, m);
    const auto back = read_manifest(d);
    REQUIRE(back.has_value());
    CHECK(back->config == m.config);
    CHECK(back->jobs_done == 1);
    CHECK_FALSE(back->complete());
    const auto j = nlohmann::json::parse(slurp(d / "manifest.json"));
    CHECK(j["status"] == "partial");
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["config_hash"] == content_hash(m.config));
    const auto diff = config_diff(m.config, nlohmann::json{{"r0", {0.0, 2.0}}, {"n", 4}});
    REQUIRE(diff.size() == 1);
    CHECK(diff[0] == "/r0/1: 1.0 -> 2.0");
    {
      std::ofstream f(d / "manifest.json");
      f << "{not json";
    }
    CHECK_THROWS_AS(read_manifest(d), ConfigError);
    fs::remove_all(d);
  }

  TEST_CASE("sweep resume is bitwise identical to an uninterrupted run") {
    const SweepSpec spec = small_sweep();
    const fs::path full = scratch("full");
    const fs::path part = scratch("part");
    const SweepOutcome a = run_sweep(spec, full);
    CHECK(a.complete());
    CHECK(a.computed == 6);

    const SweepOutcome p1 = run_sweep(spec, part, 2);
    CHECK_FALSE(p1.complete());
    CHECK(p1.done == 2);
    CHECK(read_manifest(part)->jobs_done == 2);
    const SweepOutcome p2 = run_sweep(spec, part, 3);
    CHECK(p2.done == 5);
    CHECK(p2.computed == 3);
    const SweepOutcome p3 = run_sweep(spec, part);
    CHECK(p3.complete());
    CHECK(p3.computed == 1);
    CHECK(same_points(a, p3));

    // A second pass only reads the cache.
    const SweepOutcome again = run_sweep(spec, full);
    CHECK(again.computed == 0);
    CHECK(same_points(a, again));

    // Fidelity column is populated and non-negative.
    for (const auto& pt : a.points) CHECK(pt.data.col(1).minCoeff() >= 0.0);
    const FidelityScan scan = scan_of(spec, a, 1);
    CHECK(scan.r0 == spec.r0);
    fs::remove_all(full);
    fs::remove_all(part);
  }

  TEST_CASE("corrupted cache entries are recomputed with a warning") {
    const SweepSpec spec = small_sweep();
    const fs::path d = scratch("corrupt");
    const SweepOutcome a = run_sweep(spec, d);
    fs::path victim;
    for (const auto& e : fs::directory_iterator(d / "cache")) victim = e.path();
    REQUIRE_FALSE(victim.empty());
    fs::resize_file(victim, fs::file_size(victim) - 5);
    const SweepOutcome b = run_sweep(spec, d);
    CHECK(b.computed == 1);
    CHECK(b.warnings.size() == 1);
    CHECK(same_points(a, b));
    fs::remove_all(d);
  }

  TEST_CASE("a directory holding another configuration is refused") {
    SweepSpec spec = small_sweep();
    spec.r0 = {0.5};
    spec.scattering.pop_back();
    const fs::path d = scratch("mismatch");
    run_sweep(spec, d);
    spec.trunc.n_rel_max += 1;
    try {
      run_sweep(spec, d);
      FAIL("no exception");
    } catch (const ConfigError& e) {
      REQUIRE(e.issues().size() == 1);
      CHECK(e.issues()[0] == "/truncation/n_rel_max: 8 -> 9");
    }
    fs::remove_all(d);
  }

  TEST_CASE("sweep input validation") {
    SweepSpec spec = small_sweep();
    spec.r0.clear();
    CHECK_THROWS_AS(run_sweep(spec, scratch("empty")), ConfigError);
    spec = small_sweep();
    spec.n_states = 0;
    CHECK_THROWS_AS(run_sweep(spec, scratch("empty")), ConfigError);
  }

  TEST_CASE("worker count from the environment") {
    ::setenv("SHELLCIR_WORKERS", "3", 1);
    CHECK(workers_from_env() == 3);
    ::setenv("SHELLCIR_WORKERS", "three", 1);
    CHECK_THROWS_AS(workers_from_env(), ConfigError);
    ::setenv("SHELLCIR_WORKERS", "0", 1);
    CHECK_THROWS_AS(workers_from_env(), ConfigError);
    ::unsetenv("SHELLCIR_WORKERS");
    CHECK_FALSE(workers_from_env().has_value());
  }
}
