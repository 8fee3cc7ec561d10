#pragma once

// Fidelity change along an r0 scan and avoided-crossing detection.
//
//   dF_n(r0) = (1 - |<n(r0)|n(r0 + d)>|) / d^2

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shellcir/coupled_channel.hpp"
#include "shellcir/hyperspherical.hpp"

namespace shellcir {

/// |<a|b>| of two states sampled on the same grids and channel set.
double state_overlap(const ChannelFunctions& a, const ChannelFunctions& b);

/// |<a_n|b_m>| from expansion coefficients. The relative bases must be shared;
/// the CoM bases may belong to different r0 on a common grid.
double state_overlap(const SpectrumResult& a, const ProductBasis& basis_a, int n, const SpectrumResult& b,
                     const ProductBasis& basis_b, int m);

struct FidelityPoint {
  double r0 = 0.0;
  Eigen::VectorXd energies;
  Eigen::VectorXd delta_f;
};

struct FidelityScan {
  double delta_r0 = 0.0;
  std::vector<double> r0;
  Eigen::MatrixXd energies;  // points x states
  Eigen::MatrixXd delta_f;   // points x states

  int states() const { return static_cast<int>(energies.cols()); }
};

FidelityPoint fidelity_point(const CoupledChannelSolver& solver, double r0, double delta_r0, int n_states);

/// Points are independent; computed in parallel and stored in grid order.
FidelityScan fidelity_scan(const CoupledChannelSolver& solver, std::span<const double> r0_grid, double delta_r0,
                           int n_states);

FidelityScan assemble_scan(std::vector<FidelityPoint> points, double delta_r0);

enum class AcClass { bound_trap, trap_trap, unclassified };
std::string to_string(AcClass c);

struct AvoidedCrossing {
  double r0_star = 0.0;
  double gap = 0.0;
  double fwhm = 0.0;
  double peak = 0.0;
  int lower = 0;
  int upper = 0;
  int peak_index = 0;
  std::optional<AdiabaticLevel> label_lower;  // label carried by `lower` before r0_star
  std::optional<AdiabaticLevel> label_upper;
  AcClass cls = AcClass::unclassified;

  std::string label_text() const;
};

struct UnpairedFeature {
  int state = 0;
  int index = 0;
  double r0 = 0.0;
  double height = 0.0;
};

struct DetectionOptions {
  double noise_factor = 10.0;
  int pair_window = 1;  // grid steps
};

struct Detection {
  std::vector<AvoidedCrossing> crossings;
  std::vector<UnpairedFeature> unpaired;
};

/// Peaks above noise_factor x median of each curve, paired between states
/// n and n+1 when their positions differ by at most pair_window steps.
/// r0_star: parabolic interpolation of the summed peak; gap: minimum of a
/// parabola through E_{n+1} - E_n squared; fwhm: half-maximum crossings of
/// the summed curve.
Detection detect_acs(std::span<const double> r0, const Eigen::MatrixXd& delta_f, const Eigen::MatrixXd& energies,
                     const DetectionOptions& options = {});

/// Bound-trap if exactly one branch is molecular (l = 0, n_chi = 0, a0 > 0),
/// trap-trap if neither is, unclassified if a label is missing.
AcClass classify_ac(const std::optional<AdiabaticLevel>& a, const std::optional<AdiabaticLevel>& b,
                    ScatteringLength scattering);

/// Attach labels and classes: states lower/upper are labeled against the
/// adiabatic spectrum on the grid points on either side of each crossing.
void label_crossings(Detection& detection, const FidelityScan& scan, const ModelParams& params,
                     const Truncation& trunc);

struct AcMapRow {
  double a0 = 0.0;
  AvoidedCrossing ac;
};

struct AcMap {
  std::vector<AcMapRow> rows;
  std::vector<std::string> failures;  // one entry per a0 that could not be scanned
};

/// Full scan + detection + labeling for every a0.
AcMap ac_map(std::span<const double> a0_grid, std::span<const double> r0_grid, const ModelParams& params,
             const Truncation& trunc, int n_states);

/// Rows grouped by (class, label pair), each sorted by a0.
struct AcLocus {
  AcClass cls = AcClass::unclassified;
  std::string labels;
  std::vector<double> a0;
  std::vector<double> r0_star;

  /// (max - min) / mean of r0_star.
  double relative_spread() const;
  bool strictly_increasing() const;
};
std::vector<AcLocus> group_loci(const AcMap& map);

/// Two-level model H = [[k (r0 - rc), g/2], [g/2, -k (r0 - rc)]].
struct TwoLevelModel {
  double rc = 0.0;
  double gap = 0.1;
  double slope = 1.0;

  /// Mixing angle theta in (0, pi): lower state (sin(theta/2), -cos(theta/2)).
  double mixing_angle(double r0) const;
  Eigen::Vector2d energies(double r0) const;
  Eigen::Matrix2d states(double r0) const;  // columns lower, upper

  /// Closed-form peak of dF at rc: (k/g)^2 / 2.
  double peak_height() const;
  /// Closed-form FWHM of the dF peak: (g/k) sqrt(sqrt(2) - 1).
  double fwhm() const;
};

/// dF and energies of the model on a grid, in the layout of FidelityScan.
FidelityScan two_level_scan(const TwoLevelModel& model, std::span<const double> r0, double delta_r0);

}  // namespace shellcir
