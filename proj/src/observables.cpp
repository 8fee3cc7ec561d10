#include "shellcir/observables.hpp"

#include <algorithm>
#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "shellcir/angular.hpp"
#include "shellcir/hyperspherical.hpp"

namespace shellcir {

namespace {

constexpr double kTiny = 1e-12;

std::complex<double> ylm(int l, int m, const Eigen::Vector3d& v) {
  const double n = v.norm();
  const double theta = n > 0.0 ? std::acos(std::clamp(v.z() / n, -1.0, 1.0)) : 0.0;
  const double phi = std::atan2(v.y(), v.x());
  return boost::math::spherical_harmonic<double>(static_cast<unsigned>(l), m, theta, phi);
}

// Interpolation weights of one basis family at x: row vector over the basis.
Eigen::VectorXd basis_values(const RadialBasisSet& set, double x) {
  const SpectralMesh& mesh = *set.grid.mesh;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(set.size());
  if (x < mesh.lo() || x > mesh.hi()) return out;
  int first = 0;
  std::vector<double> coeff;
  mesh.interpolation_row(x, first, coeff);
  for (std::size_t k = 0; k < coeff.size(); ++k) out += coeff[k] * set.functions.row(first + static_cast<int>(k)).transpose();
  return out;
}

Eigen::VectorXd basis_slopes(const RadialBasisSet& set, double x) {
  Eigen::VectorXd out(set.size());
  for (int a = 0; a < set.size(); ++a) out(a) = set.slope(a, x);
  return out;
}

double interpolate_2d(const ChannelFunctions& s, int ch, double r, double R) {
  const SpectralMesh& mr = *s.rel_grid.mesh;
  const SpectralMesh& mR = *s.com_grid.mesh;
  if (r < mr.lo() || r > mr.hi() || R < mR.lo() || R > mR.hi()) return 0.0;
  int fr = 0;
  int fR = 0;
  std::vector<double> cr;
  std::vector<double> cR;
  mr.interpolation_row(r, fr, cr);
  mR.interpolation_row(R, fR, cR);
  double acc = 0.0;
  for (std::size_t i = 0; i < cr.size(); ++i) {
    for (std::size_t j = 0; j < cR.size(); ++j) acc += cr[i] * cR[j] * s.u[ch](fr + static_cast<int>(i), fR + static_cast<int>(j));
  }
  return acc;
}

Eigen::Map<const Eigen::VectorXd> weights_of(const RadialGrid& g) {
  return {g.weights().data(), static_cast<Eigen::Index>(g.weights().size())};
}

}  // namespace

StateEvaluator::StateEvaluator(const SpectrumResult& spectrum, int n, const ProductBasis& basis, int J, int M)
    : basis_(&basis), J_(J), M_(M) {
  if (n < 0 || n >= spectrum.size()) throw std::out_of_range("state index outside spectrum");
  if (std::abs(M) > J) throw ConfigError("|M| must be <= J");
  for (std::size_t ch = 0; ch < basis.channels.size(); ++ch) {
    Eigen::MatrixXd c(basis.n_rel, basis.n_com);
    for (int a = 0; a < basis.n_rel; ++a) {
      for (int b = 0; b < basis.n_com; ++b) c(a, b) = spectrum.coeffs(basis.index(static_cast<int>(ch), a, b), n);
    }
    coeffs_.push_back(std::move(c));
  }
}

Eigen::VectorXd StateEvaluator::radial_over_x(const RadialBasisSet& set, double x) const {
  if (x > kTiny) return basis_values(set, x) / x;
  // u(x)/x -> u'(0) when u(0) = 0. For the Bethe-Peierls channel u(0) != 0 and
  // the regular part of u/x, i.e. u'(0), is used.
  return basis_slopes(set, 0.0);
}

std::complex<double> StateEvaluator::at(const Eigen::Vector3d& r, const Eigen::Vector3d& R) const {
  const double rn = r.norm();
  const double Rn = R.norm();
  std::complex<double> psi = 0.0;
  for (std::size_t ch = 0; ch < basis_->channels.size(); ++ch) {
    const auto [l, L] = basis_->channels[ch];
    if ((l > 0 && rn <= kTiny) || (L > 0 && Rn <= kTiny)) continue;
    const Eigen::VectorXd fr = radial_over_x(*basis_->rel[ch], rn);
    const Eigen::VectorXd fR = radial_over_x(basis_->com[ch], Rn);
    const double radial = fr.dot(coeffs_[ch] * fR);
    if (radial == 0.0) continue;
    std::complex<double> ang = 0.0;
    for (int m = -l; m <= l; ++m) {
      const int mL = M_ - m;
      if (std::abs(mL) > L) continue;
      const double cg = clebsch_gordan(l, m, L, mL, J_, M_);
      if (cg == 0.0) continue;
      ang += cg * ylm(l, m, r) * ylm(L, mL, R);
    }
    psi += radial * ang;
  }
  return psi;
}

std::complex<double> StateEvaluator::operator()(const Eigen::Vector3d& r1, const Eigen::Vector3d& r2) const {
  return at(r1 - r2, 0.5 * (r1 + r2));
}

DensityGrid conditional_density(const SpectrumResult& spectrum, int n, const ProductBasis& basis,
                                const ModelParams& params, std::span<const double> rho2, std::span<const double> z2) {
  const StateEvaluator psi(spectrum, n, basis, params.J, params.MJ);
  DensityGrid d;
  d.x_name = "rho2";
  d.y_name = "z2";
  d.x.assign(rho2.begin(), rho2.end());
  d.y.assign(z2.begin(), z2.end());
  d.state = n;
  d.r0 = basis.r0;
  d.inv_a0 = params.scattering.inverse();
  d.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rho2.size()), static_cast<Eigen::Index>(z2.size()));
  const Eigen::Vector3d r1(0.0, 0.0, basis.r0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < rho2.size(); ++i) {
    if (rho2[i] == 0.0) continue;  // explicit 2 pi rho factor
    for (std::size_t j = 0; j < z2.size(); ++j) {
      const std::complex<double> v = psi(r1, Eigen::Vector3d(rho2[i], 0.0, z2[j]));
      d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          2.0 * std::numbers::pi * rho2[i] * std::norm(v);
    }
  }
  return d;
}

DensityGrid rR_density(const ChannelFunctions& state) {
  DensityGrid d;
  d.x_name = "r";
  d.y_name = "R";
  d.x = state.rel_grid.points();
  d.y = state.com_grid.points();
  d.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d.x.size()), static_cast<Eigen::Index>(d.y.size()));
  for (const auto& u : state.u) d.values += u.cwiseAbs2();
  return d;
}

double rR_integral(const DensityGrid& density, const ChannelFunctions& state) {
  return weights_of(state.rel_grid).transpose() * density.values * weights_of(state.com_grid);
}

double mass_fraction_near(const DensityGrid& density, double rho, double z, double radius) {
  const auto cell = [](const std::vector<double>& g, std::size_t i) {
    const double lo = i > 0 ? 0.5 * (g[i] - g[i - 1]) : 0.0;
    const double hi = i + 1 < g.size() ? 0.5 * (g[i + 1] - g[i]) : 0.0;
    return lo + hi;
  };
  double total = 0.0;
  double near = 0.0;
  for (std::size_t i = 0; i < density.x.size(); ++i) {
    for (std::size_t j = 0; j < density.y.size(); ++j) {
      const double m = density.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                       cell(density.x, i) * cell(density.y, j);
      total += m;
      if (std::hypot(density.x[i] - rho, density.y[j] - z) < radius) near += m;
    }
  }
  return total > 0.0 ? near / total : 0.0;
}

double mean_relative_distance(const ChannelFunctions& state) {
  const auto& r = state.rel_grid.points();
  const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(r.size()));
  const Eigen::VectorXd wr = weights_of(state.rel_grid).cwiseProduct(rv);
  double acc = 0.0;
  for (const auto& u : state.u) acc += wr.transpose() * u.cwiseAbs2() * weights_of(state.com_grid);
  return acc;
}

double norm_beyond(const ChannelFunctions& state, double r_cut) {
  const auto& r = state.rel_grid.points();
  Eigen::VectorXd wr = weights_of(state.rel_grid);
  for (Eigen::Index i = 0; i < wr.size(); ++i) {
    if (r[i] <= r_cut) wr(i) = 0.0;
  }
  double acc = 0.0;
  for (const auto& u : state.u) acc += wr.transpose() * u.cwiseAbs2() * weights_of(state.com_grid);
  return acc;
}

int polar_nodes(const StateEvaluator& psi, double r0, int samples) {
  const Eigen::Vector3d r1(0.0, 0.0, r0);
  std::vector<double> v;
  for (int i = 1; i < samples; ++i) {
    const double theta = std::numbers::pi * i / (samples - 1);
    v.push_back(psi(r1, Eigen::Vector3d(r0 * std::sin(theta), 0.0, r0 * std::cos(theta))).real());
  }
  return count_sign_changes(v, 1e-4);
}

int hyperradial_nodes(const ChannelFunctions& state, int channel, int samples) {
  if (channel < 0 || channel >= static_cast<int>(state.u.size())) throw std::out_of_range("channel index");
  const auto& u = state.u[channel];
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  u.cwiseAbs().maxCoeff(&i, &j);
  const double r = state.rel_grid.points()[i];
  const double R = state.com_grid.points()[j];
  const double chi = std::atan2(r, 2.0 * R);
  const double s = std::sin(chi);
  const double c = std::cos(chi);
  // Stay inside both grids.
  double xi_max = std::numeric_limits<double>::infinity();
  if (s > 0.0) xi_max = std::min(xi_max, state.rel_grid.mesh->hi() / (std::numbers::sqrt2 * s));
  if (c > 0.0) xi_max = std::min(xi_max, state.com_grid.mesh->hi() * std::numbers::sqrt2 / c);
  std::vector<double> v;
  for (int k = 1; k < samples; ++k) {
    const double xi = xi_max * k / (samples - 1);
    v.push_back(interpolate_2d(state, channel, std::numbers::sqrt2 * xi * s, xi * c / std::numbers::sqrt2));
  }
  return count_sign_changes(v, 1e-3);
}

}  // namespace shellcir
