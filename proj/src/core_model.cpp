#include "shellcir/core_model.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace shellcir {

ScatteringLength ScatteringLength::from_length(double a0) {
  if (a0 == 0.0 || !std::isfinite(a0)) {
    throw ConfigError("scattering length a0 must be finite and nonzero (use inv_a0 = 0 for unitarity)");
  }
  return ScatteringLength(1.0 / a0);
}

ScatteringLength ScatteringLength::from_inverse(double inv_a0) {
  if (!std::isfinite(inv_a0)) throw ConfigError("inv_a0 must be finite");
  return ScatteringLength(inv_a0);
}

std::optional<double> ScatteringLength::length() const {
  if (inv_a0_ == 0.0) return std::nullopt;
  return 1.0 / inv_a0_;
}

std::vector<double> ScanSpec::values() const {
  std::vector<double> out;
  if (step <= 0.0 || stop < start) return out;
  // Index-based generation keeps grid points exact multiples of the step.
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  out.reserve(static_cast<std::size_t>(n + 1));
  for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

ScanSpec parse_scan(const std::string& text) {
  ScanSpec s;
  std::istringstream in(text);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
    throw ConfigError("scan must be start:stop:step, got '" + text + "'");
  }
  try {
    s.start = std::stod(a);
    s.stop = std::stod(b);
    s.step = std::stod(c);
  } catch (const std::exception&) {
    throw ConfigError("scan must be start:stop:step, got '" + text + "'");
  }
  if (!(s.step > 0.0) || s.stop < s.start) {
    throw ConfigError("scan '" + text + "' needs step > 0 and stop >= start");
  }
  return s;
}

double com_extent(const Truncation& trunc, double r0_max) {
  if (trunc.com_grid.extent > 0.0) return trunc.com_grid.extent;
  return std::max(12.0, r0_max + 8.0);
}

std::vector<Channel> enumerate_channels(const ModelParams& params, const Truncation& trunc) {
  std::vector<Channel> out;
  for (int l = 0; l <= trunc.l_max; l += 2) {
    for (int L = std::abs(l - params.J); L <= l + params.J; ++L) {
      const int parity = ((l + L) % 2 == 0) ? 1 : -1;
      if (parity != params.parity) continue;
      out.push_back({l, L});
    }
  }
  if (out.empty()) throw ConfigError("no admissible channels");
  return out;
}

namespace {

void check_grid(const GridSpec& g, const std::string& name, bool allow_auto_extent,
                std::vector<std::string>& issues) {
  if (!(g.extent > 0.0) && !(allow_auto_extent && g.extent <= 0.0)) {
    issues.push_back(name + ": extent must be positive");
  }
  if (g.elements < 1) issues.push_back(name + ": elements must be >= 1");
  if (g.order < 2) issues.push_back(name + ": order must be >= 2");
  if (g.origin_layers < 0) issues.push_back(name + ": origin_layers must be >= 0");
}

}  // namespace

CheckedConfig validate(const ModelParams& params, const Truncation& trunc,
                       std::optional<double> r0_scan_step) {
  std::vector<std::string> issues;
  if (!(params.r0 >= 0.0) || !std::isfinite(params.r0)) issues.push_back("r0 must be >= 0");
  if (!(params.delta_r0 > 0.0)) issues.push_back("delta_r0 must be > 0");
  if (r0_scan_step && params.delta_r0 > *r0_scan_step) {
    issues.push_back("delta_r0 must not exceed the r0 scan step");
  }
  if (params.J < 0) issues.push_back("J must be >= 0");
  if (std::abs(params.MJ) > params.J) issues.push_back("|MJ| must be <= J");
  if (params.parity != 1 && params.parity != -1) issues.push_back("parity must be +1 or -1");
  if (trunc.n_rel_max < 1 || trunc.n_com_max < 1) issues.push_back("basis sizes must be >= 1");
  if (trunc.l_max < 0) issues.push_back("l_max must be >= 0");
  if (trunc.k_max < 0) issues.push_back("k_max must be >= 0");
  check_grid(trunc.rel_grid, "relative grid", false, issues);
  check_grid(trunc.com_grid, "CoM grid", true, issues);
  check_grid(trunc.xi_grid, "hyperradial grid", true, issues);
  if (trunc.xi_points < 4) issues.push_back("xi grid needs >= 4 points");
  if (!(trunc.xi_margin > 0.0)) issues.push_back("xi margin must be positive");
  if (trunc.chi_elements < 1 || trunc.chi_order < 2) issues.push_back("chi grid must have >= 1 element of order >= 2");
  if (trunc.n_xi_max < 1 || trunc.n_chi_max < 1) issues.push_back("adiabatic counts must be >= 1");
  if (trunc.n_rel_max * 4 > trunc.rel_grid.points()) {
    issues.push_back("n_rel_max must be <= relative grid size / 4");
  }
  if (trunc.n_com_max * 4 > trunc.com_grid.points()) {
    issues.push_back("n_com_max must be <= CoM grid size / 4");
  }
  if (!issues.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& i : issues) msg += "\n  - " + i;
    throw ConfigError(msg, issues);
  }
  if (params.J >= 0 && (params.parity == 1 || params.parity == -1)) {
    (void)enumerate_channels(params, trunc);
  }
  return {params, trunc};
}

}  // namespace shellcir
