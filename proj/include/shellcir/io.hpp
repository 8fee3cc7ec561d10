#pragma once

// Persistence: key=value configuration, CSV tables, JSON manifests and the
// flat binary cache used for per-point results and eigenvectors.

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "shellcir/core_model.hpp"

namespace shellcir::io {

inline constexpr int kSchemaVersion = 1;
std::string code_version();

/// Lines "key = value"; blank lines and lines starting with '#' are skipped.
/// Throws ConfigError on malformed lines or an unreadable file.
std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path);

/// Shortest round-trip-safe text for a double: printf "%.17g".
std::string fmt(double v);

/// Comma-separated table with a header row; values are written as given.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);

 private:
  std::FILE* f_ = nullptr;
  std::size_t columns_ = 0;
};

/// Matrix with axis headers: first row "x_name\y_name, y...", then "x, values...".
void write_matrix_csv(const std::filesystem::path& path, const std::string& corner, const std::vector<double>& x,
                      const std::vector<double>& y, const Eigen::MatrixXd& values);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(const std::vector<double>& values);
std::string hex64(std::uint64_t v);

nlohmann::json to_json(const ModelParams& params);
nlohmann::json to_json(const Truncation& trunc);

/// Content hash of a JSON value (serialized with sorted keys).
std::string content_hash(const nlohmann::json& value);

/// Binary cache file:
///   "SHCRBIN1" | u32 schema | u64 key | u64 rows | u64 cols | rows*cols f64 (row-major) | u64 FNV-1a of payload
void write_cache(const std::filesystem::path& path, std::uint64_t key, const Eigen::MatrixXd& m);

/// nullopt if the file is missing. Throws CacheCorrupt on bad magic, key
/// mismatch, truncation or checksum failure.
struct CacheCorrupt : std::runtime_error {
  using std::runtime_error::runtime_error;
};
std::optional<Eigen::MatrixXd> read_cache(const std::filesystem::path& path, std::uint64_t key);

/// Run manifest stored as manifest.json in the output directory.
struct Manifest {
  std::string command;
  nlohmann::json config;
  nlohmann::json grids;
  std::size_t jobs_total = 0;
  std::size_t jobs_done = 0;
  double wall_clock_s = 0.0;

  bool complete() const { return jobs_done == jobs_total; }
  nlohmann::json to_json() const;
  static Manifest from_json(const nlohmann::json& j);
};

void write_manifest(const std::filesystem::path& dir, const Manifest& m);
std::optional<Manifest> read_manifest(const std::filesystem::path& dir);

/// Human-readable differences between two configurations ("path: old -> new").
std::vector<std::string> config_diff(const nlohmann::json& before, const nlohmann::json& after);

/// Create `dir` (and parents); throws ConfigError if it cannot be written.
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace shellcir::io
