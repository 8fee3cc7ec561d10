#include "shellcir/hyperspherical.hpp"

#include <algorithm>
#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <tuple>
#include <utility>

#include "shellcir/angular.hpp"

namespace shellcir {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr double kHalfPi = std::numbers::pi / 2.0;

}  // namespace

double w_potential(double xi, double chi, double r0) {
  const double xi0 = std::numbers::sqrt2 * r0;
  const double d = std::abs(kQuarterPi - chi);
  const double bracket = 1.0 - (2.0 + std::sin(2.0 * d)) / (3.0 * std::cos(kQuarterPi - d));
  return 2.0 * xi * xi * xi * xi0 * bracket;
}

double vc_coupling(double xi, double chi, double r0, double costheta, int l_terms) {
  const double xi0 = std::numbers::sqrt2 * r0;
  const double alpha = kQuarterPi - std::abs(chi - kQuarterPi);
  const double s = std::sin(alpha);
  const double c = std::cos(alpha);
  const double t2 = (s * s) / (c * c);
  double pw = 1.0 / c;  // s^{2l} / c^{2l+1}
  double acc = 0.0;
  for (int l = 1; l <= l_terms; ++l) {
    pw *= t2;
    acc += pw * (s * s / (4.0 * l + 3.0) - c * c / (4.0 * l - 1.0)) * legendre(2 * l, costheta);
  }
  return -xi * xi0 * acc;
}

SpectralMesh make_chi_mesh(const Truncation& trunc, ScatteringLength scattering, double xi_max) {
  const double h = kHalfPi / trunc.chi_elements;
  int layers = 0;
  if (scattering.admits_bound_state() && xi_max > 0.0) {
    const double target = 1.0 / (scattering.inverse() * 10.0 * std::numbers::sqrt2 * xi_max);
    while (h * std::pow(0.25, layers) / trunc.chi_order >= target && layers < 30) ++layers;
  }
  return SpectralMesh::uniform(0.0, kHalfPi, trunc.chi_elements, trunc.chi_order, layers);
}

int count_sign_changes(std::span<const double> values, double rel_tol) {
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  const double floor = rel_tol * vmax;
  int changes = 0;
  int last = 0;
  for (double v : values) {
    if (std::abs(v) <= floor) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

int HyperAngularSolution::node_count(int n_chi) const {
  const auto col = f.col(n_chi);
  return count_sign_changes(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
}

HyperAngularSolution solve_hyperangular(double xi, ScatteringLength scattering, double r0, int L, int l,
                                        int n_chi_max, std::shared_ptr<const SpectralMesh> chi_mesh) {
  if (l < 0 || l % 2 != 0) throw ConfigError("relative angular momentum must be even and >= 0");
  if (L < 0) throw ConfigError("CoM angular momentum must be >= 0");
  const SpectralMesh& mesh = *chi_mesh;
  if (l == 0 && scattering.admits_bound_state() && xi > 0.0) {
    const double layer = 1.0 / (scattering.inverse() * std::numbers::sqrt2 * xi);
    if (mesh.first_spacing() >= 0.1 * layer) {
      throw NumericalError("refine chi grid: first spacing " + std::to_string(mesh.first_spacing()) +
                           " does not resolve the boundary layer " + std::to_string(layer));
    }
  }
  const auto& chi = mesh.nodes();
  std::vector<double> v(chi.size(), 0.0);
  for (std::size_t i = 0; i < chi.size(); ++i) {
    const double s = std::sin(chi[i]);
    const double c = std::cos(chi[i]);
    double pot = w_potential(xi, chi[i], r0);
    if (l > 0 && s > 0.0) pot += l * (l + 1.0) / (s * s);
    if (L > 0 && c > 1e-300) pot += L * (L + 1.0) / (c * c);
    // Endpoint values on Dirichlet nodes are never used.
    v[i] = std::isfinite(pot) ? pot : 0.0;
  }
  Operator1D op;
  op.kinetic = 1.0;
  if (l == 0) op.left_log_derivative = -std::numbers::sqrt2 * xi * scattering.inverse();
  EigenPairs eig = solve_operator(mesh, op, v, n_chi_max);
  HyperAngularSolution out;
  out.xi = xi;
  out.L = L;
  out.l = l;
  out.mesh = std::move(chi_mesh);
  for (Eigen::Index n = 0; n < eig.values.size(); ++n) out.lambda.push_back(eig.values(n) - 4.0);
  out.f = std::move(eig.vectors);
  return out;
}

std::vector<AdiabaticCurve> hyperangular_curves(ScatteringLength scattering, double r0,
                                                const std::vector<Channel>& channels, const Truncation& trunc) {
  const double xi_hi = std::numbers::sqrt2 * r0 + trunc.xi_margin;
  const int npts = trunc.xi_points;
  const double step = xi_hi / (npts - 1);
  auto mesh = std::make_shared<const SpectralMesh>(make_chi_mesh(trunc, scattering, xi_hi));

  std::set<std::pair<int, int>> pairs;
  for (const auto& ch : channels) pairs.insert({ch.L, ch.l});
  std::vector<AdiabaticCurve> curves;
  for (const auto& [L, l] : pairs) {
    std::vector<std::vector<double>> table(static_cast<std::size_t>(npts));
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < npts; ++k) {
      try {
        table[k] = solve_hyperangular(step * k, scattering, r0, L, l, trunc.n_chi_max, mesh).lambda;
      } catch (const std::exception& e) {
#pragma omp critical
        failure = e.what();
      }
    }
    if (!failure.empty()) throw NumericalError(failure);
    for (int n = 0; n < trunc.n_chi_max; ++n) {
      AdiabaticCurve c;
      c.L = L;
      c.l = l;
      c.n_chi = n;
      c.xi_lo = 0.0;
      c.xi_step = step;
      c.lambda.resize(static_cast<std::size_t>(npts));
      for (int k = 0; k < npts; ++k) c.lambda[k] = table[k][n];
      curves.push_back(std::move(c));
    }
  }
  return curves;
}

std::string AdiabaticLevel::label() const {
  std::string s = std::to_string(n_xi) + "xi" + std::to_string(n_chi) + "chi";
  if (L != 0 || l != 0) s += "_L" + std::to_string(L) + "l" + std::to_string(l);
  return s;
}

AdiabaticSpectrum solve_hyperradial(std::vector<AdiabaticCurve> curves, double r0, int n_xi_max,
                                    const GridSpec& xi_grid) {
  AdiabaticSpectrum out;
  out.r0 = r0;
  out.xi0 = std::numbers::sqrt2 * r0;
  if (curves.empty()) return out;
  double extent = xi_grid.extent;
  if (!(extent > 0.0)) {
    extent = curves.front().xi_hi();
    for (const auto& c : curves) extent = std::min(extent, c.xi_hi());
  }
  for (const auto& c : curves) {
    if (c.xi_lo > 0.0 || c.xi_hi() < extent * (1.0 - 1e-12)) {
      throw NumericalError("interpolation range: lambda curve covers [" + std::to_string(c.xi_lo) + ", " +
                           std::to_string(c.xi_hi()) + "], hyperradial grid needs [0, " + std::to_string(extent) +
                           "]");
    }
  }
  out.xi_mesh = std::make_shared<const SpectralMesh>(
      SpectralMesh::uniform(0.0, extent, xi_grid.elements, xi_grid.order, xi_grid.origin_layers));
  const auto& x = out.xi_mesh->nodes();
  out.radial.resize(curves.size());
  std::vector<std::vector<AdiabaticLevel>> per_curve(curves.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const auto& c = curves[ci];
    boost::math::interpolators::cardinal_cubic_b_spline<double> spline(c.lambda.begin(), c.lambda.end(), c.xi_lo,
                                                                        c.xi_step);
    std::vector<double> v(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double xi = std::min(x[i], c.xi_hi());
      const double d = x[i] - out.xi0;
      v[i] = (spline(xi) + 3.75) / (2.0 * x[i] * x[i]) + 0.5 * d * d;
    }
    Operator1D op;
    op.kinetic = 0.5;
    EigenPairs eig = solve_operator(*out.xi_mesh, op, v, n_xi_max);
    for (Eigen::Index n = 0; n < eig.values.size(); ++n) {
      per_curve[ci].push_back(AdiabaticLevel{static_cast<int>(n), c.n_chi, c.L, c.l, eig.values(n)});
    }
    out.radial[ci] = std::move(eig.vectors);
  }
  for (const auto& lv : per_curve) out.levels.insert(out.levels.end(), lv.begin(), lv.end());
  std::sort(out.levels.begin(), out.levels.end(), [](const AdiabaticLevel& a, const AdiabaticLevel& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return std::tie(a.L, a.l, a.n_chi, a.n_xi) < std::tie(b.L, b.l, b.n_chi, b.n_xi);
  });
  out.curves = std::move(curves);
  return out;
}

AdiabaticSpectrum adiabatic_spectrum(const ModelParams& params, const Truncation& trunc, double r0) {
  auto curves = hyperangular_curves(params.scattering, r0, enumerate_channels(params, trunc), trunc);
  return solve_hyperradial(std::move(curves), r0, trunc.n_xi_max, trunc.xi_grid);
}

std::vector<StateLabel> label_exact_states(std::span<const double> exact, const AdiabaticSpectrum& adiabatic,
                                           double tolerance) {
  const std::size_t n = exact.size();
  const std::size_t m = adiabatic.levels.size();
  const double skip = tolerance;
  const double inf = std::numeric_limits<double>::infinity();
  // d(i, j): best cost aligning the first i exact states with the first j levels.
  std::vector<std::vector<double>> d(n + 1, std::vector<double>(m + 1, inf));
  std::vector<std::vector<char>> move(n + 1, std::vector<char>(m + 1, 0));
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    d[i][0] = d[i - 1][0] + skip;
    move[i][0] = 'u';
    for (std::size_t j = 1; j <= m; ++j) {
      const double match = d[i - 1][j - 1] + std::abs(exact[i - 1] - adiabatic.levels[j - 1].energy);
      const double drop_exact = d[i - 1][j] + skip;
      const double drop_level = d[i][j - 1];
      if (match <= drop_exact && match <= drop_level) {
        d[i][j] = match;
        move[i][j] = 'm';
      } else if (drop_level <= drop_exact) {
        d[i][j] = drop_level;
        move[i][j] = 'l';
      } else {
        d[i][j] = drop_exact;
        move[i][j] = 'u';
      }
    }
  }
  std::vector<StateLabel> out(n);
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0) {
    const char mv = move[i][j];
    if (mv == 'm') {
      const auto& lv = adiabatic.levels[j - 1];
      const double delta = exact[i - 1] - lv.energy;
      out[i - 1].delta = delta;
      if (std::abs(delta) <= tolerance) out[i - 1].level = lv;
      --i;
      --j;
    } else if (mv == 'l') {
      --j;
    } else {
      out[i - 1].delta = std::numeric_limits<double>::quiet_NaN();
      --i;
    }
  }
  return out;
}

}  // namespace shellcir
