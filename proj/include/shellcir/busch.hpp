#pragma once

// Spectrum of two contact-interacting particles in an isotropic harmonic
// trap: the Gamma-ratio relation for the relative s-wave energy, its root
// ladder, and the small-a0 expansions of the molecular branch.

#include <optional>
#include <vector>

namespace shellcir {

/// Relative (hyperangular at r0 = 0) energy of branch n_chi.
struct BuschRoot {
  int n_chi = 0;
  double energy = 0.0;
};

/// sqrt(2) Gamma(3/4 - E/2) / Gamma(1/4 - E/2).
///
/// Exactly 0 at E = 2n + 1/2 (poles of the denominator). Returns nullopt at
/// E = 2n + 3/2 where the numerator has a pole. The function decreases
/// monotonically between consecutive numerator poles.
std::optional<double> busch_lhs(double energy);

/// The n_max lowest solutions of busch_lhs(E) = inv_a0, ascending.
///
/// Root n is bracketed between the numerator poles 2n - 1/2 and 2n + 3/2
/// (the lowest bracket extends down to -(inv_a0)^2 - 10) and bisected to
/// floating-point resolution. Throws NumericalError if a bracket has no
/// sign change.
std::vector<BuschRoot> solve_busch_roots(double inv_a0, int n_max);

/// -(1/a0)^2 + a0^2/8; valid for 0 < a0 < 1, otherwise ConfigError("series domain").
double series_small_a0_3d(double a0);

/// -(1/a0)^2 + a0^2/24, the thin-shell counterpart; same domain.
double series_large_r0(double a0);

struct LabeledLevel {
  int n_xi = 0;
  int n_chi = 0;
  double energy = 0.0;
};

/// All E_{n_chi} + 2 n_xi + 3/2 with n_xi < n_xi_max and n_chi < n_chi_max,
/// sorted ascending (ties broken by n_chi then n_xi).
std::vector<LabeledLevel> spectrum_r0_zero(double inv_a0, int n_xi_max, int n_chi_max);

}  // namespace shellcir
