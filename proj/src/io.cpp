#include "shellcir/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace shellcir::io {

namespace {

constexpr char kMagic[8] = {'S', 'H', 'C', 'R', 'B', 'I', 'N', '1'};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

nlohmann::json grid_json(const GridSpec& g) {
  return {{"extent", g.extent}, {"elements", g.elements}, {"order", g.order}, {"origin_layers", g.origin_layers}};
}

template <class T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::ifstream& in, T& v) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

}  // namespace

std::string code_version() {
#ifdef SHELLCIR_VERSION
  return SHELLCIR_VERSION;
#else
  return "unknown";
#endif
}

std::vector<std::pair<std::string, std::string>> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> issues;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      issues.push_back(path.string() + ":" + std::to_string(no) + ": expected key = value");
      continue;
    }
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      issues.push_back(path.string() + ":" + std::to_string(no) + ": empty key");
      continue;
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  if (!issues.empty()) throw ConfigError("malformed config file", issues);
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : columns_(header.size()) {
  f_ = std::fopen(path.string().c_str(), "w");
  if (!f_) throw ConfigError("cannot write " + path.string() + ": " + std::strerror(errno));
  row(header);
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row width differs from header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) std::fputc(',', f_);
    std::fputs(cells[i].c_str(), f_);
  }
  std::fputc('\n', f_);
}

void write_matrix_csv(const std::filesystem::path& path, const std::string& corner, const std::vector<double>& x,
                      const std::vector<double>& y, const Eigen::MatrixXd& values) {
  if (values.rows() != static_cast<Eigen::Index>(x.size()) || values.cols() != static_cast<Eigen::Index>(y.size()))
    throw std::logic_error("matrix csv: shape mismatch");
  std::vector<std::string> header{corner};
  for (double v : y) header.push_back(fmt(v));
  CsvWriter w(path, header);
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<std::string> r{fmt(x[i])};
    for (std::size_t j = 0; j < y.size(); ++j) r.push_back(fmt(values(i, j)));
    w.row(r);
  }
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::vector<double>& values) {
  return fnv1a(std::string_view(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(double)));
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::json to_json(const ModelParams& p) {
  nlohmann::json j;
  j["inv_a0"] = p.scattering.inverse();
  j["r0"] = p.r0;
  j["delta_r0"] = p.delta_r0;
  j["J"] = p.J;
  j["M"] = p.MJ;
  j["parity"] = p.parity;
  return j;
}

nlohmann::json to_json(const Truncation& t) {
  return {{"n_rel_max", t.n_rel_max},   {"n_com_max", t.n_com_max},   {"l_max", t.l_max},
          {"k_max", t.k_max},           {"rel_grid", grid_json(t.rel_grid)}, {"com_grid", grid_json(t.com_grid)},
          {"xi_points", t.xi_points},   {"xi_margin", t.xi_margin},   {"xi_grid", grid_json(t.xi_grid)},
          {"chi_elements", t.chi_elements}, {"chi_order", t.chi_order}, {"n_xi_max", t.n_xi_max},
          {"n_chi_max", t.n_chi_max}};
}

std::string content_hash(const nlohmann::json& value) {
  // nlohmann::json objects are std::map backed, so dump() is key-sorted.
  return hex64(fnv1a(value.dump()));
}

void write_cache(const std::filesystem::path& path, std::uint64_t key, const Eigen::MatrixXd& m) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write cache " + tmp.string());
    out.write(kMagic, sizeof kMagic);
    put(out, static_cast<std::uint32_t>(kSchemaVersion));
    put(out, key);
    put(out, static_cast<std::uint64_t>(m.rows()));
    put(out, static_cast<std::uint64_t>(m.cols()));
    std::vector<double> flat(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) flat[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    out.write(reinterpret_cast<const char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double)));
    put(out, fnv1a(flat));
    if (!out) throw ConfigError("short write to cache " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::optional<Eigen::MatrixXd> read_cache(const std::filesystem::path& path, std::uint64_t key) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CacheCorrupt("unreadable: " + path.string());
  char magic[8];
  std::uint32_t schema = 0;
  std::uint64_t stored_key = 0, rows = 0, cols = 0, checksum = 0;
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw CacheCorrupt("bad magic: " + path.string());
  if (!get(in, schema) || schema != static_cast<std::uint32_t>(kSchemaVersion))
    throw CacheCorrupt("schema mismatch: " + path.string());
  if (!get(in, stored_key) || stored_key != key) throw CacheCorrupt("key mismatch: " + path.string());
  if (!get(in, rows) || !get(in, cols) || rows > (1u << 20) || cols > (1u << 20))
    throw CacheCorrupt("bad shape: " + path.string());
  std::vector<double> flat(rows * cols);
  if (!in.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double))))
    throw CacheCorrupt("truncated: " + path.string());
  if (!get(in, checksum) || checksum != fnv1a(flat)) throw CacheCorrupt("checksum mismatch: " + path.string());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = flat[i * cols + j];
  return m;
}

nlohmann::json Manifest::to_json() const {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"code_version", code_version()},
          {"config", config},
          {"config_hash", content_hash(config)},
          {"grids", grids},
          {"jobs", {{"total", jobs_total}, {"done", jobs_done}}},
          {"status", complete() ? "complete" : "partial"},
          {"wall_clock_s", wall_clock_s}};
}

Manifest Manifest::from_json(const nlohmann::json& j) {
  if (j.value("schema_version", -1) != kSchemaVersion) throw ConfigError("manifest schema version differs");
  Manifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config");
  m.grids = j.value("grids", nlohmann::json::object());
  m.jobs_total = j.at("jobs").at("total").get<std::size_t>();
  m.jobs_done = j.at("jobs").at("done").get<std::size_t>();
  m.wall_clock_s = j.value("wall_clock_s", 0.0);
  return m;
}

void write_manifest(const std::filesystem::path& dir, const Manifest& m) {
  const auto path = dir / "manifest.json";
  const auto tmp = dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << m.to_json().dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::optional<Manifest> read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "manifest.json";
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path);
  try {
    return Manifest::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("unreadable manifest " + path.string() + ": " + e.what());
  }
}

std::vector<std::string> config_diff(const nlohmann::json& before, const nlohmann::json& after) {
  std::vector<std::string> out;
  for (const auto& op : nlohmann::json::diff(before, after)) {
    const std::string path = op.at("path").get<std::string>();
    const std::string kind = op.at("op").get<std::string>();
    const nlohmann::json::json_pointer ptr(path);
    std::string old_v = before.contains(ptr) ? before.at(ptr).dump() : "(absent)";
    std::string new_v = kind == "remove" ? "(absent)" : op.at("value").dump();
    out.push_back(path + ": " + old_v + " -> " + new_v);
  }
  return out;
}

void ensure_writable_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("output directory not writable: " + dir.string());
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace shellcir::io
