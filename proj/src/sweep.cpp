#include "shellcir/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <memory>

#include "shellcir/io.hpp"

namespace shellcir::io {

namespace {

double r0_max_of(const SweepSpec& spec) {
  double m = 0.0;
  for (double r : spec.r0) m = std::max(m, r);
  return spec.fidelity ? m + spec.params.delta_r0 : m;
}

ModelParams params_at(const SweepSpec& spec, std::size_t a) {
  ModelParams p = spec.params;
  p.scattering = spec.scattering[a];
  return p;
}

std::uint64_t job_key(const std::string& config_hash, double inv_a0, double r0) {
  const nlohmann::json job{{"config", config_hash}, {"inv_a0", inv_a0}, {"r0", r0}};
  return fnv1a(job.dump());
}

}  // namespace

nlohmann::json SweepSpec::config() const {
  std::vector<double> inv;
  for (const auto& s : scattering) inv.push_back(s.inverse());
  nlohmann::json p = to_json(params);
  p.erase("inv_a0");
  return {{"command", command}, {"params", p}, {"truncation", to_json(trunc)}, {"inv_a0", inv},
          {"r0", r0}, {"n_states", n_states}, {"fidelity", fidelity}, {"extra", extra}};
}

Eigen::MatrixXd compute_point(const CoupledChannelSolver& solver, double r0, const SweepSpec& spec) {
  ProductBasis b0;
  const SpectrumResult s0 = solver.solve(r0, spec.n_states, &b0);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(s0.size(), kPointColumns);
  m.col(0) = s0.energies;
  for (int n = 0; n < s0.size(); ++n) {
    m(n, 2) = s0.dominant[static_cast<std::size_t>(n)].channel;
    m(n, 3) = s0.dominant[static_cast<std::size_t>(n)].n_rel;
    m(n, 4) = s0.dominant[static_cast<std::size_t>(n)].n_com;
  }
  if (spec.fidelity) {
    const double d = spec.params.delta_r0;
    ProductBasis b1;
    const SpectrumResult s1 = solver.solve(r0 + d, spec.n_states, &b1);
    for (int n = 0; n < s0.size(); ++n) m(n, 1) = std::max(0.0, 1.0 - state_overlap(s0, b0, n, s1, b1, n)) / (d * d);
  }
  return m;
}

SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& out, std::optional<std::size_t> stop_after) {
  if (spec.scattering.empty() || spec.r0.empty()) throw ConfigError("sweep grid is empty");
  if (spec.n_states < 1) throw ConfigError("states must be >= 1");
  for (std::size_t a = 0; a < spec.scattering.size(); ++a) validate(params_at(spec, a), spec.trunc);

  const auto t_start = std::chrono::steady_clock::now();
  ensure_writable_dir(out);
  const auto cache_dir = out / "cache";
  ensure_writable_dir(cache_dir);

  const nlohmann::json config = spec.config();
  double previous_wall = 0.0;
  if (const auto old = read_manifest(out)) {
    if (old->config != config) throw ConfigError("output directory holds a run with a different configuration",
                                                 config_diff(old->config, config));
    previous_wall = old->wall_clock_s;
  }
  const std::string config_hash = content_hash(config);

  SweepOutcome outcome;
  outcome.total = spec.scattering.size() * spec.r0.size();

  struct Job {
    std::size_t a;
    std::size_t r;
    std::uint64_t key;
    std::filesystem::path file;
  };
  std::vector<Job> pending;
  for (std::size_t a = 0; a < spec.scattering.size(); ++a) {
    for (std::size_t r = 0; r < spec.r0.size(); ++r) {
      const std::uint64_t key = job_key(config_hash, spec.scattering[a].inverse(), spec.r0[r]);
      const auto file = cache_dir / (hex64(key) + ".bin");
      try {
        if (auto m = read_cache(file, key)) {
          outcome.points.push_back({a, r, std::move(*m)});
          continue;
        }
      } catch (const CacheCorrupt& e) {
        outcome.warnings.push_back(std::string("recomputing corrupted cache entry (") + e.what() + ")");
        std::cerr << "warning: " << outcome.warnings.back() << '\n';
      }
      pending.push_back({a, r, key, file});
    }
  }
  if (stop_after && pending.size() > *stop_after) pending.resize(*stop_after);

  // One solver per a0 with work to do; solvers are read-only once built.
  std::vector<std::unique_ptr<CoupledChannelSolver>> solvers(spec.scattering.size());
  const double r_max = r0_max_of(spec);
  for (const auto& j : pending) {
    if (!solvers[j.a]) solvers[j.a] = std::make_unique<CoupledChannelSolver>(params_at(spec, j.a), spec.trunc, r_max);
  }

  std::vector<Eigen::MatrixXd> results(pending.size());
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < pending.size(); ++i) {
    try {
      results[i] = compute_point(*solvers[pending[i].a], spec.r0[pending[i].r], spec);
      write_cache(pending[i].file, pending[i].key, results[i]);
    } catch (const std::exception& e) {
#pragma omp critical(sweep_failure)
      if (failure.empty()) failure = "a0 index " + std::to_string(pending[i].a) + ", r0 = " + fmt(spec.r0[pending[i].r]) + ": " + e.what();
    }
  }
  if (!failure.empty()) throw NumericalError(failure);

  for (std::size_t i = 0; i < pending.size(); ++i) outcome.points.push_back({pending[i].a, pending[i].r, std::move(results[i])});
  std::sort(outcome.points.begin(), outcome.points.end(),
            [](const auto& x, const auto& y) { return std::tie(x.a_index, x.r_index) < std::tie(y.a_index, y.r_index); });
  outcome.computed = pending.size();
  outcome.done = outcome.points.size();

  Manifest m;
  m.command = spec.command;
  m.config = config;
  {
    const CoupledChannelSolver probe(params_at(spec, 0), spec.trunc, r_max);
    m.grids = {{"relative", hex64(fnv1a(probe.rel_grid().points()))}, {"com", hex64(fnv1a(probe.com_grid().points()))},
               {"com_extent", probe.com_grid().mesh->hi()}};
  }
  m.jobs_total = outcome.total;
  m.jobs_done = outcome.done;
  m.wall_clock_s = previous_wall + std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  write_manifest(out, m);
  return outcome;
}

FidelityScan scan_of(const SweepSpec& spec, const SweepOutcome& outcome, std::size_t a_index) {
  std::vector<FidelityPoint> pts;
  for (const auto& p : outcome.points) {
    if (p.a_index != a_index) continue;
    pts.push_back({spec.r0[p.r_index], p.data.col(0), p.data.col(1)});
  }
  if (pts.size() != spec.r0.size()) throw std::logic_error("scan_of: sweep incomplete for this a0");
  return assemble_scan(std::move(pts), spec.params.delta_r0);
}

std::optional<int> workers_from_env() {
  const char* v = std::getenv("SHELLCIR_WORKERS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) throw ConfigError(std::string("SHELLCIR_WORKERS must be a positive integer, got '") + v + "'");
  return static_cast<int>(n);
}

}  // namespace shellcir::io
