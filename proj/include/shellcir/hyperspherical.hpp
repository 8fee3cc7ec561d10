#pragma once

// Adiabatic hyperspherical treatment.
//
// Hyperradius xi = sqrt(r^2/2 + 2R^2), hyperangle chi = atan(r / 2R),
// xi0 = sqrt(2) r0. With f = sin(2 chi) Psi the hyperangular problem at fixed
// xi reads
//   -f'' + [l(l+1)/sin^2 chi + L(L+1)/cos^2 chi + W_xi(chi)] f = (lambda + 4) f,
// with f'(0) = -sqrt(2) xi / a0 f(0) for l = 0, f(0) = 0 for l > 0 and
// f(pi/2) = 0. f is normalized with unit weight, i.e. Psi with weight sin^2(2 chi).
// The hyperradial equation for u = xi^{5/2} U is
//   -u''/2 + [(lambda(xi) + 15/4) / (2 xi^2) + (xi - xi0)^2 / 2] u = E u.

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shellcir/core_model.hpp"
#include "shellcir/spectral_mesh.hpp"

namespace shellcir {

/// Monopole part of the shell potential on the hypersphere (enters Lambda^2).
double w_potential(double xi, double chi, double r0);

/// Partial sum l = 1..l_terms of the neglected coupling V_c at angle cos(theta)
/// between rhat and Rhat.
double vc_coupling(double xi, double chi, double r0, double costheta, int l_terms);

/// Mesh on [0, pi/2] refined toward chi = 0 so that its first spacing
/// resolves the Bethe-Peierls layer a0 / (sqrt(2) xi_max).
SpectralMesh make_chi_mesh(const Truncation& trunc, ScatteringLength scattering, double xi_max);

struct HyperAngularSolution {
  double xi = 0.0;
  int L = 0;
  int l = 0;
  std::vector<double> lambda;  // ascending in n_chi
  Eigen::MatrixXd f;           // nodal values of f = sin(2 chi) V on the chi mesh
  std::shared_ptr<const SpectralMesh> mesh;

  int node_count(int n_chi) const;
};

/// Throws NumericalError("refine chi grid") if the mesh cannot resolve the
/// boundary layer at this xi.
HyperAngularSolution solve_hyperangular(double xi, ScatteringLength scattering, double r0, int L, int l,
                                        int n_chi_max, std::shared_ptr<const SpectralMesh> chi_mesh);

/// Sign changes of sampled values, ignoring entries below `rel_tol` * max|v|.
int count_sign_changes(std::span<const double> values, double rel_tol = 1e-7);

/// lambda(n_chi, L, l; xi) on a uniform xi grid.
struct AdiabaticCurve {
  int L = 0;
  int l = 0;
  int n_chi = 0;
  double xi_lo = 0.0;
  double xi_step = 0.0;
  std::vector<double> lambda;

  double xi_hi() const { return xi_lo + xi_step * static_cast<double>(lambda.size() - 1); }
};

/// Curves for each (L, l) pair on `xi_points` uniform points over [0, xi0 + xi_margin].
std::vector<AdiabaticCurve> hyperangular_curves(ScatteringLength scattering, double r0,
                                                const std::vector<Channel>& channels, const Truncation& trunc);

struct AdiabaticLevel {
  int n_xi = 0;
  int n_chi = 0;
  int L = 0;
  int l = 0;
  double energy = 0.0;

  std::string label() const;
};

struct AdiabaticSpectrum {
  double r0 = 0.0;
  double xi0 = 0.0;
  std::vector<AdiabaticCurve> curves;
  std::vector<AdiabaticLevel> levels;     // sorted by energy
  std::vector<Eigen::MatrixXd> radial;    // per curve: u(xi) nodal values, columns n_xi
  std::shared_ptr<const SpectralMesh> xi_mesh;
};

/// Hyperradial eigenpairs on every curve. Throws NumericalError if a curve
/// does not cover the hyperradial mesh.
AdiabaticSpectrum solve_hyperradial(std::vector<AdiabaticCurve> curves, double r0, int n_xi_max,
                                    const GridSpec& xi_grid);

/// Curves plus hyperradial solve for one shell radius.
AdiabaticSpectrum adiabatic_spectrum(const ModelParams& params, const Truncation& trunc, double r0);

struct StateLabel {
  std::optional<AdiabaticLevel> level;  // nullopt: mixed / unmatched
  double delta = 0.0;                   // exact - adiabatic
  bool mixed() const { return !level.has_value(); }
};

/// Order-preserving alignment of exact energies (ascending) to the adiabatic
/// levels minimizing total |dE|; matches with |dE| > tolerance are "mixed".
std::vector<StateLabel> label_exact_states(std::span<const double> exact, const AdiabaticSpectrum& adiabatic,
                                           double tolerance = 0.5);

}  // namespace shellcir
