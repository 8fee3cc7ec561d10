#pragma once

// Non-separable part of the shell potential in (r, R, cos theta) and its
// Legendre expansion in the angle between r and R.
//
//   V0(r1) + V0(r2) = r^2/4 + (R - r0)^2 + dV,
//   dV = -r0 (|R + r/2| + |R - r/2| - 2R) <= 0.

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace shellcir {

/// dV(r, R, c) for shell radius r0.
double residual_potential(double r, double R, double costheta, double r0);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// v_k(r_i, R_j) for even k <= k_max.
class MultipoleTable {
 public:
  MultipoleTable() = default;
  MultipoleTable(double r0, int k_max, std::vector<Eigen::MatrixXd> even_terms);

  double r0() const noexcept { return r0_; }
  int k_max() const noexcept { return k_max_; }
  /// Zero matrix for odd k (never stored).
  Eigen::MatrixXd coefficient(int k) const;
  const Eigen::MatrixXd& even(int k) const { return terms_.at(static_cast<std::size_t>(k / 2)); }
  Eigen::Index rows() const { return terms_.empty() ? 0 : terms_.front().rows(); }
  Eigen::Index cols() const { return terms_.empty() ? 0 : terms_.front().cols(); }

  /// sum_k v_k(r_i, R_j) P_k(c).
  double reconstruct(Eigen::Index i, Eigen::Index j, double costheta) const;

  /// Same table for another shell radius (dV is linear in r0).
  MultipoleTable rescaled(double r0) const;

 private:
  double r0_ = 0.0;
  int k_max_ = 0;
  std::vector<Eigen::MatrixXd> terms_;
};

/// Project dV onto P_k with `gauss_nodes` Gauss-Legendre points in c
/// (0 selects max(2 k_max + 8, 96)).
MultipoleTable multipole_decompose(double r0, std::span<const double> grid_r, std::span<const double> grid_R,
                                   int k_max, int gauss_nodes = 0);

/// Odd-k projection, only for checking that it vanishes.
Eigen::MatrixXd project_multipole(double r0, std::span<const double> grid_r, std::span<const double> grid_R, int k,
                                  int gauss_nodes = 0);

}  // namespace shellcir
