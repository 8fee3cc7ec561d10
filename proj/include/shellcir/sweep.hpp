#pragma once

// Resumable (a0, r0) sweeps. Every grid point is an independent job whose
// result is cached under <out>/cache; a rerun on the same directory only
// computes missing points. Results are always returned in grid order.

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "shellcir/core_model.hpp"
#include "shellcir/resonance.hpp"

namespace shellcir::io {

struct SweepSpec {
  std::string command;
  ModelParams params;  // scattering is taken from `scattering`
  Truncation trunc;
  std::vector<ScatteringLength> scattering;
  std::vector<double> r0;
  int n_states = 14;
  bool fidelity = false;  // second solve at r0 + delta_r0 per point
  nlohmann::json extra = nlohmann::json::object();

  nlohmann::json config() const;
};

/// Per-point result, one row per state:
/// E, dF (0 without fidelity), dominant channel, dominant n_rel, dominant n_com.
inline constexpr int kPointColumns = 5;

struct SweepPoint {
  std::size_t a_index = 0;
  std::size_t r_index = 0;
  Eigen::MatrixXd data;
};

struct SweepOutcome {
  std::size_t total = 0;
  std::size_t done = 0;
  std::size_t computed = 0;  // this run
  std::vector<std::string> warnings;
  std::vector<SweepPoint> points;  // completed points sorted by (a_index, r_index)

  bool complete() const { return done == total; }
};

/// Runs or resumes a sweep in `out`. A manifest from an earlier run with a
/// different configuration is refused (ConfigError listing the differences).
/// `stop_after` bounds the number of points computed by this call.
SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& out,
                       std::optional<std::size_t> stop_after = std::nullopt);

/// Scan of one a0 of a complete sweep, in the layout used by detection.
FidelityScan scan_of(const SweepSpec& spec, const SweepOutcome& outcome, std::size_t a_index);

/// Computes one point; exposed for tests.
Eigen::MatrixXd compute_point(const CoupledChannelSolver& solver, double r0, const SweepSpec& spec);

/// Thread count from SHELLCIR_WORKERS, if set and valid.
std::optional<int> workers_from_env();

}  // namespace shellcir::io
