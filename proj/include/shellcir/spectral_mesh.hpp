#pragma once

// Gauss-Lobatto-Legendre spectral-element mesh on an interval.
//
// Nodal values of a function double as its DVR coefficients: the lumped
// GLL mass matrix is diagonal (the quadrature weights), so a symmetric
// eigenproblem in the weight-scaled nodal basis yields eigenvectors whose
// nodal values u_i satisfy sum_i w_i u_i^2 = 1. Dirichlet conditions drop
// an endpoint node; Robin conditions enter the stiffness matrix as a
// boundary term (they are natural in the weak form).

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

namespace shellcir {

/// GLL nodes and weights on [-1, 1] for polynomial order p (p + 1 nodes).
struct GllRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  Eigen::MatrixXd derivative;  // D(i, j) = l_j'(x_i)
  std::vector<double> barycentric;
};

GllRule gll_rule(int order);

class SpectralMesh {
 public:
  /// `breaks` strictly increasing, at least two entries.
  SpectralMesh(std::vector<double> breaks, int order);

  /// `elements` equal elements on [lo, hi], plus `layers` geometrically
  /// shrinking elements (ratio `ratio`) carved out of the first element.
  static SpectralMesh uniform(double lo, double hi, int elements, int order, int layers = 0, double ratio = 0.25);

  int order() const noexcept { return order_; }
  int element_count() const noexcept { return static_cast<int>(breaks_.size()) - 1; }
  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& breaks() const noexcept { return breaks_; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double lo() const noexcept { return breaks_.front(); }
  double hi() const noexcept { return breaks_.back(); }

  /// Global stiffness matrix S(i, j) = integral of l_i' l_j' (exact under GLL).
  Eigen::MatrixXd stiffness() const;

  /// Value at x of the interpolant through nodal values (x outside the mesh gives 0).
  double interpolate(std::span<const double> values, double x) const;
  /// Derivative of the interpolant at x; at a shared break the right element is used.
  double derivative(std::span<const double> values, double x) const;
  /// Interpolation weights: f(x) = sum_k coeff[k] * values[first + k].
  void interpolation_row(double x, int& first, std::vector<double>& coeff) const;

  /// Mean node spacing inside the first element.
  double first_spacing() const { return (breaks_[1] - breaks_[0]) / order_; }

 private:
  int locate(double x) const;

  std::vector<double> breaks_;
  int order_;
  GllRule rule_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Lowest `count` eigenpairs of `h` using (-1) = all. Symmetric input (upper
/// triangle is read). Eigenvectors are normalized with the largest-magnitude
/// component positive. Throws NumericalError on LAPACK failure.
struct EigenPairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
EigenPairs lowest_eigenpairs(Eigen::MatrixXd h, int count);

/// Flip columns so each has its largest-magnitude entry positive.
void fix_signs(Eigen::MatrixXd& vectors);

/// Discretized 1D operator  -c d^2/dx^2 + V(x)  with boundary handling.
struct Operator1D {
  double kinetic = 1.0;
  /// nullopt: Dirichlet at the left end; value beta: u'(lo) = beta * u(lo).
  std::optional<double> left_log_derivative;
  bool dirichlet_right = true;
};

/// Solve the lowest `count` eigenpairs. Returns eigenvalues and nodal values
/// on all mesh nodes (Dirichlet nodes carry 0) normalized to sum w u^2 = 1.
EigenPairs solve_operator(const SpectralMesh& mesh, const Operator1D& op, std::span<const double> potential,
                          int count);

}  // namespace shellcir
