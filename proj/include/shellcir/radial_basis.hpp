#pragma once

// The two radial families of the product basis.
//
// Relative motion (reduced mass 1/2):   -u'' + [l(l+1)/r^2 + r^2/4] u,
//   u'(0) = -u(0)/a0 for l = 0, u(0) = 0 for l > 0.
// Centre of mass (total mass 2):        -(1/4) w'' + [L(L+1)/(4R^2) + (R - r0)^2] w,
//   w(0) = 0.
// Both are expressed through u = r psi and live on spectral-element meshes
// whose nodes and weights are also the quadrature grid for matrix elements.

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "shellcir/core_model.hpp"
#include "shellcir/spectral_mesh.hpp"

namespace shellcir {

enum class BasisKind { relative, com };

struct RadialGrid {
  std::shared_ptr<const SpectralMesh> mesh;

  const std::vector<double>& points() const { return mesh->nodes(); }
  const std::vector<double>& weights() const { return mesh->weights(); }
  int size() const { return mesh->size(); }
};

RadialGrid make_grid(const GridSpec& spec, double extent_override = 0.0);

struct RadialBasisSet {
  BasisKind kind = BasisKind::relative;
  int angular = 0;  // l for relative, L for CoM
  RadialGrid grid;
  Eigen::MatrixXd functions;  // rows: grid nodes, cols: basis index; u(r) = r psi(r)
  std::vector<double> ref_energies;

  int size() const { return static_cast<int>(functions.cols()); }
  double value(int n, double x) const;
  double slope(int n, double x) const;
};

/// Lowest n_max eigenpairs of the relative reference operator. `energy_shift`
/// adds a constant to the reference potential (used to test split independence).
/// Throws NumericalError("refine grid near origin") when the molecular state's
/// half-width is below four grid spacings.
RadialBasisSet build_relative_basis(ScatteringLength scattering, int l, const RadialGrid& grid, int n_max,
                                    double energy_shift = 0.0);

/// Lowest n_max eigenpairs of the CoM reference operator for shell radius r0.
RadialBasisSet build_com_basis(double r0, int L, const RadialGrid& grid, int n_max);

/// Quadrature Gram matrix G(a, b) = sum_i w_i u_a(r_i) u_b(r_i).
Eigen::MatrixXd gram_matrix(const RadialBasisSet& basis);

/// Largest |G - 1| entry.
double gram_deviation(const RadialBasisSet& basis);

}  // namespace shellcir
