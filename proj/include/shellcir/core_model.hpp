#pragma once

// Oscillator units throughout: hbar = m = omega = 1, lengths in a_ho,
// energies in hbar*omega.

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shellcir {

/// Invalid user input. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  ConfigError(const std::string& what, std::vector<std::string> issues)
      : std::runtime_error(what), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// A solver could not produce a trustworthy result. The CLI maps this to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// s-wave scattering length stored through its inverse so that unitarity is
/// the finite value 0.
class ScatteringLength {
 public:
  static ScatteringLength from_length(double a0);
  static ScatteringLength from_inverse(double inv_a0);
  static ScatteringLength unitarity() { return from_inverse(0.0); }

  double inverse() const noexcept { return inv_a0_; }
  /// nullopt at unitarity.
  std::optional<double> length() const;
  bool is_unitary() const noexcept { return inv_a0_ == 0.0; }
  bool admits_bound_state() const noexcept { return inv_a0_ > 0.0; }

  auto operator<=>(const ScatteringLength&) const = default;

 private:
  explicit ScatteringLength(double inv) : inv_a0_(inv) {}
  double inv_a0_ = 0.0;
};

struct ModelParams {
  ScatteringLength scattering = ScatteringLength::from_length(0.53);
  double r0 = 0.0;
  double delta_r0 = 1e-3;
  int J = 0;
  int MJ = 0;
  int parity = +1;
};

/// Partial-wave channel: relative angular momentum l (even for identical
/// bosons) coupled with centre-of-mass angular momentum L to total J.
struct Channel {
  int l = 0;
  int L = 0;
  auto operator<=>(const Channel&) const = default;
};

/// Spectral-element grid on [0, extent]: `elements` equal elements of
/// polynomial order `order`, optionally refined geometrically toward the
/// origin by `origin_layers` extra elements.
struct GridSpec {
  double extent = 20.0;
  int elements = 32;
  int order = 10;
  int origin_layers = 0;

  int points() const { return (elements + origin_layers) * order + 1; }
  auto operator<=>(const GridSpec&) const = default;
};

struct Truncation {
  int n_rel_max = 20;
  int n_com_max = 20;
  int l_max = 6;
  int k_max = 16;
  GridSpec rel_grid{20.0, 32, 10, 0};
  /// extent <= 0 means "max(12, r0 + 8)" resolved against the largest r0 of a run.
  GridSpec com_grid{0.0, 24, 10, 0};

  int xi_points = 400;
  double xi_margin = 10.0;
  /// Hyperradial mesh; extent <= 0 means xi0 + xi_margin.
  GridSpec xi_grid{0.0, 40, 10, 8};
  int chi_elements = 16;
  int chi_order = 12;
  int n_xi_max = 8;
  int n_chi_max = 6;

  auto operator<=>(const Truncation&) const = default;
};

/// Inclusive arithmetic scan start:stop:step.
struct ScanSpec {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  std::vector<double> values() const;
  auto operator<=>(const ScanSpec&) const = default;
};

ScanSpec parse_scan(const std::string& text);

/// Resolved CoM grid extent for shell radii up to `r0_max`.
double com_extent(const Truncation& trunc, double r0_max);

/// Channels of the (J, parity) block, ordered by l then L.
std::vector<Channel> enumerate_channels(const ModelParams& params, const Truncation& trunc);

struct CheckedConfig {
  ModelParams params;
  Truncation trunc;
};

/// Throws ConfigError listing every problem found.
CheckedConfig validate(const ModelParams& params, const Truncation& trunc,
                       std::optional<double> r0_scan_step = std::nullopt);

}  // namespace shellcir
