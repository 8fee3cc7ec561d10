#include "shellcir/radial_basis.hpp"

#include <cmath>
#include <span>

namespace shellcir {

RadialGrid make_grid(const GridSpec& spec, double extent_override) {
  const double extent = extent_override > 0.0 ? extent_override : spec.extent;
  if (!(extent > 0.0)) throw ConfigError("radial grid extent must be positive");
  return RadialGrid{std::make_shared<const SpectralMesh>(
      SpectralMesh::uniform(0.0, extent, spec.elements, spec.order, spec.origin_layers))};
}

double RadialBasisSet::value(int n, double x) const {
  const auto col = functions.col(n);
  return grid.mesh->interpolate(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), x);
}

double RadialBasisSet::slope(int n, double x) const {
  const auto col = functions.col(n);
  return grid.mesh->derivative(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), x);
}

namespace {

RadialBasisSet finish(BasisKind kind, int angular, const RadialGrid& grid, EigenPairs pairs) {
  RadialBasisSet set;
  set.kind = kind;
  set.angular = angular;
  set.grid = grid;
  set.functions = std::move(pairs.vectors);
  set.ref_energies.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());
  return set;
}

void check_size(const RadialGrid& grid, int n_max) {
  if (n_max < 1) throw ConfigError("basis size must be >= 1");
  if (4 * n_max > grid.size()) throw ConfigError("basis size exceeds grid size / 4");
}

}  // namespace

RadialBasisSet build_relative_basis(ScatteringLength scattering, int l, const RadialGrid& grid, int n_max,
                                    double energy_shift) {
  if (l < 0 || l % 2 != 0) throw ConfigError("relative angular momentum must be even and >= 0");
  check_size(grid, n_max);
  const auto& r = grid.points();
  std::vector<double> v(r.size());
  const double cent = l * (l + 1.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    v[i] = 0.25 * r[i] * r[i] + energy_shift;
    if (l > 0 && r[i] > 0.0) v[i] += cent / (r[i] * r[i]);
  }
  Operator1D op;
  op.kinetic = 1.0;
  if (l == 0) op.left_log_derivative = -scattering.inverse();
  auto pairs = solve_operator(*grid.mesh, op, v, n_max);

  if (l == 0 && scattering.admits_bound_state() && pairs.values(0) < 0.0) {
    // Molecular state ~ exp(-r/a0): half-width a0 ln 2 must span >= 4 spacings.
    const double half_width = std::log(2.0) / scattering.inverse();
    if (half_width < 4.0 * grid.mesh->first_spacing()) {
      throw NumericalError("refine grid near origin: molecular half-width " + std::to_string(half_width) +
                           " is below 4 grid spacings (" + std::to_string(grid.mesh->first_spacing()) +
                           "); raise origin_layers");
    }
  }
  return finish(BasisKind::relative, l, grid, std::move(pairs));
}

RadialBasisSet build_com_basis(double r0, int L, const RadialGrid& grid, int n_max) {
  if (L < 0) throw ConfigError("CoM angular momentum must be >= 0");
  check_size(grid, n_max);
  const auto& x = grid.points();
  std::vector<double> v(x.size());
  const double cent = 0.25 * L * (L + 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - r0;
    v[i] = d * d;
    if (L > 0 && x[i] > 0.0) v[i] += cent / (x[i] * x[i]);
  }
  Operator1D op;
  op.kinetic = 0.25;
  return finish(BasisKind::com, L, grid, solve_operator(*grid.mesh, op, v, n_max));
}

Eigen::MatrixXd gram_matrix(const RadialBasisSet& basis) {
  const auto& w = basis.grid.weights();
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  return basis.functions.transpose() * wv.asDiagonal() * basis.functions;
}

double gram_deviation(const RadialBasisSet& basis) {
  const Eigen::MatrixXd g = gram_matrix(basis);
  if (g.size() == 0) return 0.0;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace shellcir
