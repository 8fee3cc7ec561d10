// shellcir: command-line front end.
//
//   shellcir <busch|spectrum|hyper|fidelity|acmap|density> [options] [--config file] [--out dir]
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "shellcir/busch.hpp"
#include "shellcir/coupled_channel.hpp"
#include "shellcir/hyperspherical.hpp"
#include "shellcir/io.hpp"
#include "shellcir/observables.hpp"
#include "shellcir/resonance.hpp"
#include "shellcir/sweep.hpp"

namespace fs = std::filesystem;
using namespace shellcir;
using io::fmt;

namespace {

struct Options {
  std::optional<double> a0;
  std::optional<double> inv_a0;
  std::optional<double> r0;
  std::string r0_scan;
  std::string a0_scan = "0.4:0.7:0.05";
  int J = 0;
  int M = 0;
  int parity = 1;
  int states = 14;
  int n = 4;
  double delta_r0 = 1e-3;
  bool vectors = false;
  std::optional<std::size_t> stop_after;
  int label_states = 0;
  int state = 0;
  std::string kind = "conditional";
  double extent = 0.0;
  int points = 121;
  std::string out = "out";
  Truncation trunc;
};

ScatteringLength scattering_of(const Options& o) {
  if (o.inv_a0) return ScatteringLength::from_inverse(*o.inv_a0);
  return ScatteringLength::from_length(o.a0.value_or(0.53));
}

ModelParams params_of(const Options& o) {
  ModelParams p;
  p.scattering = scattering_of(o);
  p.r0 = o.r0.value_or(0.0);
  p.delta_r0 = o.delta_r0;
  p.J = o.J;
  p.MJ = o.M;
  p.parity = o.parity;
  return p;
}

void add_scattering(CLI::App* sub, Options& o) {
  auto* a = sub->add_option("--a0", o.a0, "scattering length (oscillator units, default 0.53)");
  auto* i = sub->add_option("--inv-a0", o.inv_a0, "inverse scattering length (0 = unitarity)");
  a->excludes(i);
}

void add_block(CLI::App* sub, Options& o) {
  sub->add_option("--J", o.J, "total angular momentum");
  sub->add_option("--M", o.M, "projection of J (densities only)");
  sub->add_option("--parity", o.parity, "+1 or -1")->check(CLI::IsMember({1, -1}));
}

void add_truncation(CLI::App* sub, Options& o) {
  Truncation& t = o.trunc;
  sub->add_option("--n-rel", t.n_rel_max, "relative basis functions per channel")->group("Truncation");
  sub->add_option("--n-com", t.n_com_max, "CoM basis functions per channel")->group("Truncation");
  sub->add_option("--l-max", t.l_max, "largest relative / CoM angular momentum")->group("Truncation");
  sub->add_option("--k-max", t.k_max, "largest multipole order of the residual potential")->group("Truncation");
  sub->add_option("--rel-extent", t.rel_grid.extent, "relative grid extent")->group("Truncation");
  sub->add_option("--rel-elements", t.rel_grid.elements, "relative grid elements")->group("Truncation");
  sub->add_option("--rel-origin-layers", t.rel_grid.origin_layers, "extra relative elements graded toward r = 0")
      ->group("Truncation");
  sub->add_option("--com-extent", t.com_grid.extent, "CoM grid extent (0 = max(12, r0 + 8))")->group("Truncation");
  sub->add_option("--com-elements", t.com_grid.elements, "CoM grid elements")->group("Truncation");
  sub->add_option("--grid-order", t.rel_grid.order, "polynomial order of the radial elements")
      ->group("Truncation")
      ->each([&t](const std::string& v) { t.com_grid.order = std::stoi(v); });  // runs before the store
}

void add_adiabatic(CLI::App* sub, Options& o) {
  Truncation& t = o.trunc;
  sub->add_option("--xi-points", t.xi_points, "tabulation points of the potential curves")->group("Adiabatic");
  sub->add_option("--xi-margin", t.xi_margin, "curves cover [0, xi0 + margin]")->group("Adiabatic");
  sub->add_option("--chi-elements", t.chi_elements, "hyperangular elements")->group("Adiabatic");
  sub->add_option("--chi-order", t.chi_order, "hyperangular element order")->group("Adiabatic");
  sub->add_option("--n-xi", t.n_xi_max, "hyperradial levels per curve")->group("Adiabatic");
  sub->add_option("--n-chi", t.n_chi_max, "curves per (L, l)")->group("Adiabatic");
}

void add_out(CLI::App* sub, Options& o) { sub->add_option("--out", o.out, "output directory"); }

std::vector<double> scan_values(const std::string& text) { return parse_scan(text).values(); }

std::vector<double> r0_grid_of(const Options& o, const std::string& fallback) {
  if (o.r0 && !o.r0_scan.empty()) throw ConfigError("--r0 and --r0-scan are mutually exclusive");
  if (o.r0) return {*o.r0};
  return scan_values(o.r0_scan.empty() ? fallback : o.r0_scan);
}

nlohmann::json options_json(const Options& o) {
  nlohmann::json j = io::to_json(params_of(o));
  j["truncation"] = io::to_json(o.trunc);
  return j;
}

void simple_manifest(const fs::path& out, const std::string& command, nlohmann::json config,
                     std::chrono::steady_clock::time_point start) {
  io::Manifest m;
  m.command = command;
  m.config = std::move(config);
  m.jobs_total = 1;
  m.jobs_done = 1;
  m.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_manifest(out, m);
}

// ---------------------------------------------------------------------------

int run_busch(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  if (o.n < 1) throw ConfigError("--n must be >= 1");
  const fs::path out(o.out);
  io::ensure_writable_dir(out);
  const double inv = scattering_of(o).inverse();
  const auto roots = solve_busch_roots(inv, o.n);
  io::CsvWriter w(out / "busch.csv", {"n_chi", "energy"});
  for (const auto& r : roots) {
    w.row({std::to_string(r.n_chi), fmt(r.energy)});
    std::cout << r.n_chi << ' ' << fmt(r.energy) << '\n';
  }
  simple_manifest(out, "busch", {{"inv_a0", inv}, {"n", o.n}}, start);
  return 0;
}

int run_spectrum(const Options& o) {
  io::SweepSpec spec;
  spec.command = "spectrum";
  spec.params = params_of(o);
  spec.trunc = o.trunc;
  spec.scattering = {spec.params.scattering};
  spec.r0 = r0_grid_of(o, "0:3:0.01");
  spec.n_states = o.states;
  spec.fidelity = false;
  spec.extra = {{"vectors", o.vectors}};
  const fs::path out(o.out);
  const auto result = io::run_sweep(spec, out, o.stop_after);
  if (!result.complete()) {
    std::cerr << "partial run: " << result.done << "/" << result.total << " points; rerun to resume\n";
    return 0;
  }
  const CoupledChannelSolver solver(spec.params, spec.trunc, *std::max_element(spec.r0.begin(), spec.r0.end()));
  {
    io::CsvWriter w(out / "channels.csv", {"channel", "l", "L"});
    for (std::size_t c = 0; c < solver.channels().size(); ++c)
      w.row({std::to_string(c), std::to_string(solver.channels()[c].l), std::to_string(solver.channels()[c].L)});
  }
  io::CsvWriter w(out / "spectrum.csv", {"r0", "n", "E_n", "dominant_channel", "dominant_nrel", "dominant_ncom"});
  for (const auto& p : result.points) {
    for (Eigen::Index n = 0; n < p.data.rows(); ++n) {
      w.row({fmt(spec.r0[p.r_index]), std::to_string(n), fmt(p.data(n, 0)),
             std::to_string(static_cast<int>(p.data(n, 2))), std::to_string(static_cast<int>(p.data(n, 3))),
             std::to_string(static_cast<int>(p.data(n, 4)))});
    }
  }
  if (o.vectors) {
    const fs::path dir = out / "vectors";
    io::ensure_writable_dir(dir);
    io::CsvWriter index(dir / "index.csv", {"r0", "file"});
    for (std::size_t i = 0; i < spec.r0.size(); ++i) {
      const SpectrumResult s = solver.solve(spec.r0[i], o.states);
      const std::string name = "r0_" + std::to_string(i) + ".bin";
      io::write_cache(dir / name, io::fnv1a(fmt(spec.r0[i])), s.coeffs);
      index.row({fmt(spec.r0[i]), name});
    }
  }
  return 0;
}

int run_hyper(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const ModelParams p = params_of(o);
  validate(p, o.trunc);
  const fs::path out(o.out);
  io::ensure_writable_dir(out);
  const AdiabaticSpectrum a = adiabatic_spectrum(p, o.trunc, p.r0);
  {
    std::vector<std::string> header{"xi"};
    for (const auto& c : a.curves) header.push_back("L" + std::to_string(c.L) + "l" + std::to_string(c.l) + "n" + std::to_string(c.n_chi));
    io::CsvWriter w(out / "curves.csv", header);
    const auto& first = a.curves.front();
    for (std::size_t i = 0; i < first.lambda.size(); ++i) {
      std::vector<std::string> row{fmt(first.xi_lo + first.xi_step * static_cast<double>(i))};
      for (const auto& c : a.curves) row.push_back(fmt(c.lambda[i]));
      w.row(row);
    }
  }
  {
    io::CsvWriter w(out / "levels.csv", {"n_xi", "n_chi", "L", "l", "energy", "label"});
    for (const auto& l : a.levels)
      w.row({std::to_string(l.n_xi), std::to_string(l.n_chi), std::to_string(l.L), std::to_string(l.l), fmt(l.energy), l.label()});
  }
  if (o.label_states > 0) {
    const CoupledChannelSolver solver(p, o.trunc, p.r0);
    const SpectrumResult s = solver.solve(p.r0, o.label_states);
    const std::vector<double> e(s.energies.data(), s.energies.data() + s.size());
    const auto labels = label_exact_states(e, a);
    io::CsvWriter w(out / "labels.csv", {"n", "E_exact", "label", "delta"});
    for (std::size_t n = 0; n < labels.size(); ++n) {
      const auto& lab = labels[n];
      w.row({std::to_string(n), fmt(e[n]), lab.level ? (lab.mixed() ? "mixed" : lab.level->label()) : "unmatched",
             lab.level ? fmt(lab.delta) : ""});
    }
  }
  simple_manifest(out, "hyper", options_json(o), start);
  return 0;
}

std::vector<std::string> ac_row(const AvoidedCrossing& ac) {
  const auto text = [](const std::optional<AdiabaticLevel>& l) { return l ? l->label() : std::string("mixed"); };
  return {fmt(ac.r0_star), fmt(ac.gap), fmt(ac.fwhm), fmt(ac.peak), std::to_string(ac.lower), std::to_string(ac.upper),
          text(ac.label_lower), text(ac.label_upper), to_string(ac.cls)};
}

const std::vector<std::string> kAcHeader{"r0_star", "gap", "fwhm", "peak", "lower", "upper",
                                         "label_lower", "label_upper", "class"};

int run_fidelity(const Options& o) {
  io::SweepSpec spec;
  spec.command = "fidelity";
  spec.params = params_of(o);
  spec.trunc = o.trunc;
  spec.scattering = {spec.params.scattering};
  spec.r0 = r0_grid_of(o, "0:3:0.01");
  if (spec.r0.size() > 1) validate(spec.params, spec.trunc, spec.r0[1] - spec.r0[0]);
  spec.n_states = o.states;
  spec.fidelity = true;
  const fs::path out(o.out);
  const auto result = io::run_sweep(spec, out, o.stop_after);
  if (!result.complete()) {
    std::cerr << "partial run: " << result.done << "/" << result.total << " points; rerun to resume\n";
    return 0;
  }
  const FidelityScan scan = io::scan_of(spec, result, 0);
  {
    io::CsvWriter w(out / "fidelity.csv", {"r0", "n", "E_n", "delta_F"});
    for (std::size_t i = 0; i < scan.r0.size(); ++i)
      for (int n = 0; n < scan.states(); ++n)
        w.row({fmt(scan.r0[i]), std::to_string(n), fmt(scan.energies(i, n)), fmt(scan.delta_f(i, n))});
  }
  Detection det = detect_acs(scan.r0, scan.delta_f, scan.energies);
  label_crossings(det, scan, spec.params, spec.trunc);
  {
    io::CsvWriter w(out / "acs.csv", kAcHeader);
    for (const auto& ac : det.crossings) w.row(ac_row(ac));
  }
  {
    io::CsvWriter w(out / "unpaired.csv", {"state", "r0", "height"});
    for (const auto& u : det.unpaired) w.row({std::to_string(u.state), fmt(u.r0), fmt(u.height)});
  }
  for (const auto& ac : det.crossings)
    std::cout << "AC states " << ac.lower << "/" << ac.upper << " r0*=" << fmt(ac.r0_star) << " " << ac.label_text()
              << " " << to_string(ac.cls) << '\n';
  return 0;
}

int run_acmap(const Options& o) {
  io::SweepSpec spec;
  spec.command = "acmap";
  spec.params = params_of(o);
  spec.trunc = o.trunc;
  const std::vector<double> a0 = scan_values(o.a0_scan);
  for (double a : a0) spec.scattering.push_back(ScatteringLength::from_length(a));
  spec.r0 = r0_grid_of(o, "0:3:0.01");
  spec.n_states = o.states;
  spec.fidelity = true;
  spec.extra = {{"detection", {{"noise_factor", DetectionOptions{}.noise_factor}, {"pair_window", DetectionOptions{}.pair_window}}},
                {"label_tolerance", 0.5}};
  const fs::path out(o.out);
  const auto result = io::run_sweep(spec, out, o.stop_after);
  if (!result.complete()) {
    std::cerr << "partial run: " << result.done << "/" << result.total << " points; rerun to resume\n";
    return 0;
  }
  AcMap map;
  for (std::size_t a = 0; a < a0.size(); ++a) {
    ModelParams p = spec.params;
    p.scattering = spec.scattering[a];
    const FidelityScan scan = io::scan_of(spec, result, a);
    Detection det = detect_acs(scan.r0, scan.delta_f, scan.energies);
    try {
      label_crossings(det, scan, p, spec.trunc);
    } catch (const std::exception& e) {
      map.failures.push_back("a0=" + fmt(a0[a]) + ": " + e.what());
    }
    for (const auto& ac : det.crossings) map.rows.push_back({a0[a], ac});
  }
  {
    std::vector<std::string> header{"a0"};
    header.insert(header.end(), kAcHeader.begin(), kAcHeader.end());
    io::CsvWriter w(out / "acmap.csv", header);
    for (const auto& row : map.rows) {
      std::vector<std::string> r{fmt(row.a0)};
      const auto rest = ac_row(row.ac);
      r.insert(r.end(), rest.begin(), rest.end());
      w.row(r);
    }
  }
  {
    io::CsvWriter w(out / "loci.csv", {"class", "labels", "points", "mean_r0_star", "relative_spread", "strictly_increasing"});
    for (const auto& l : group_loci(map)) {
      double mean = 0.0;
      for (double r : l.r0_star) mean += r;
      mean /= static_cast<double>(l.r0_star.size());
      w.row({to_string(l.cls), l.labels, std::to_string(l.a0.size()), fmt(mean), fmt(l.relative_spread()),
             l.strictly_increasing() ? "true" : "false"});
    }
  }
  for (const auto& f : map.failures) std::cerr << "warning: " << f << '\n';
  return 0;
}

int run_density(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  if (!o.r0) throw ConfigError("density needs --r0");
  if (o.state < 0) throw ConfigError("--state must be >= 0");
  if (o.points < 2) throw ConfigError("--points must be >= 2");
  if (o.kind != "conditional" && o.kind != "rR") throw ConfigError("--kind must be conditional or rR");
  const ModelParams p = params_of(o);
  validate(p, o.trunc);
  const fs::path out(o.out);
  io::ensure_writable_dir(out);
  const CoupledChannelSolver solver(p, o.trunc, p.r0);
  ProductBasis basis;
  const SpectrumResult s = solver.solve(p.r0, o.state + 1, &basis);
  if (o.kind == "rR") {
    const DensityGrid d = rR_density(wavefunction_on_grid(s, o.state, basis));
    io::write_matrix_csv(out / "density.csv", "r\\R", d.x, d.y, d.values);
  } else {
    const double ext = o.extent > 0.0 ? o.extent : p.r0 + 4.0;
    std::vector<double> rho(static_cast<std::size_t>(o.points));
    std::vector<double> z(static_cast<std::size_t>(o.points));
    for (int i = 0; i < o.points; ++i) {
      rho[static_cast<std::size_t>(i)] = ext * i / (o.points - 1);
      z[static_cast<std::size_t>(i)] = -ext + 2.0 * ext * i / (o.points - 1);
    }
    const DensityGrid d = conditional_density(s, o.state, basis, p, rho, z);
    io::write_matrix_csv(out / "density.csv", "rho2\\z2", d.x, d.y, d.values);
  }
  nlohmann::json cfg = options_json(o);
  cfg["state"] = o.state;
  cfg["kind"] = o.kind;
  cfg["energy"] = s.energies(o.state);
  simple_manifest(out, "density", cfg, start);
  std::cout << "state " << o.state << " E=" << fmt(s.energies(o.state)) << '\n';
  return 0;
}

// --config file: its key=value lines become "--key=value" arguments placed
// right after the subcommand, so explicit flags given later win.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> rest;
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ConfigError("--config needs a file");
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (!config) return rest;
  std::vector<std::string> injected;
  for (const auto& [k, v] : io::read_key_values(*config)) {
    const std::string key = k.rfind("--", 0) == 0 ? k.substr(2) : k;
    injected.push_back(v.empty() ? "--" + key : "--" + key + "=" + v);
  }
  const auto pos = rest.empty() || rest.front().rfind('-', 0) == 0 ? rest.begin() : rest.begin() + 1;
  rest.insert(pos, injected.begin(), injected.end());
  return rest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two bosons in a spherical shell trap: spectra, fidelity scans and avoided-crossing maps"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_file;
  app.add_option("--config", config_file, "file of key=value lines mirroring the flags");
  app.set_version_flag("--version", io::code_version());

  Options o;
  auto* busch = app.add_subcommand("busch", "trap energies at r0 = 0 (relative motion)");
  add_scattering(busch, o);
  busch->add_option("--n", o.n, "number of roots");
  add_out(busch, o);

  auto* spectrum = app.add_subcommand("spectrum", "coupled-channel spectrum");
  add_scattering(spectrum, o);
  spectrum->add_option("--r0", o.r0, "single shell radius");
  spectrum->add_option("--r0-scan", o.r0_scan, "start:stop:step (default 0:3:0.01)");
  add_block(spectrum, o);
  spectrum->add_option("--states", o.states, "lowest states kept");
  spectrum->add_flag("--vectors", o.vectors, "also store eigenvectors (binary)");
  spectrum->add_option("--stop-after", o.stop_after, "compute at most N new points, then stop");
  add_truncation(spectrum, o);
  add_out(spectrum, o);

  auto* hyper = app.add_subcommand("hyper", "hyperspherical adiabatic curves and levels");
  add_scattering(hyper, o);
  hyper->add_option("--r0", o.r0, "shell radius");
  add_block(hyper, o);
  hyper->add_option("--label-states", o.label_states, "label this many exact states against the adiabatic levels");
  add_adiabatic(hyper, o);
  add_truncation(hyper, o);
  add_out(hyper, o);

  auto* fidelity = app.add_subcommand("fidelity", "fidelity scan and avoided-crossing detection");
  add_scattering(fidelity, o);
  fidelity->add_option("--r0-scan", o.r0_scan, "start:stop:step (default 0:3:0.01)");
  add_block(fidelity, o);
  fidelity->add_option("--states", o.states, "lowest states tracked");
  fidelity->add_option("--delta-r0", o.delta_r0, "finite-difference step");
  fidelity->add_option("--stop-after", o.stop_after, "compute at most N new points, then stop");
  add_adiabatic(fidelity, o);
  add_truncation(fidelity, o);
  add_out(fidelity, o);

  auto* acmap = app.add_subcommand("acmap", "avoided-crossing positions over a0");
  acmap->add_option("--a0-scan", o.a0_scan, "start:stop:step");
  acmap->add_option("--r0-scan", o.r0_scan, "start:stop:step (default 0:3:0.01)");
  add_block(acmap, o);
  acmap->add_option("--states", o.states, "lowest states tracked");
  acmap->add_option("--delta-r0", o.delta_r0, "finite-difference step");
  acmap->add_option("--stop-after", o.stop_after, "compute at most N new points, then stop");
  add_adiabatic(acmap, o);
  add_truncation(acmap, o);
  add_out(acmap, o);

  auto* density = app.add_subcommand("density", "density of one state");
  add_scattering(density, o);
  density->add_option("--r0", o.r0, "shell radius")->required();
  density->add_option("--state", o.state, "state index (0 = ground)");
  density->add_option("--kind", o.kind, "conditional | rR");
  density->add_option("--extent", o.extent, "conditional grid half-width (default r0 + 4)");
  density->add_option("--points", o.points, "conditional grid points per axis");
  add_block(density, o);
  add_truncation(density, o);
  add_out(density, o);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (const auto w = io::workers_from_env()) {
#ifdef _OPENMP
      omp_set_num_threads(*w);
#endif
    }
    if (*busch) return run_busch(o);
    if (*spectrum) return run_spectrum(o);
    if (*hyper) return run_hyper(o);
    if (*fidelity) return run_fidelity(o);
    if (*acmap) return run_acmap(o);
    if (*density) return run_density(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& i : e.issues())
      if (std::string(e.what()).find(i) == std::string::npos) std::cerr << "  " << i << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
