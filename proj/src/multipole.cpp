#include "shellcir/multipole.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "shellcir/angular.hpp"
#include "shellcir/core_model.hpp"

namespace shellcir {

double residual_potential(double r, double R, double costheta, double r0) {
  const double base = R * R + 0.25 * r * r;
  const double cross = R * r * costheta;
  const double r1 = std::sqrt(std::max(0.0, base + cross));
  const double r2 = std::sqrt(std::max(0.0, base - cross));
  return -r0 * (r1 + r2 - 2.0 * R);
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

MultipoleTable::MultipoleTable(double r0, int k_max, std::vector<Eigen::MatrixXd> even_terms)
    : r0_(r0), k_max_(k_max), terms_(std::move(even_terms)) {}

Eigen::MatrixXd MultipoleTable::coefficient(int k) const {
  if (k < 0 || k > k_max_) throw std::out_of_range("multipole order outside table");
  if (k % 2 != 0) return Eigen::MatrixXd::Zero(rows(), cols());
  return even(k);
}

double MultipoleTable::reconstruct(Eigen::Index i, Eigen::Index j, double costheta) const {
  double acc = 0.0;
  for (std::size_t q = 0; q < terms_.size(); ++q) acc += terms_[q](i, j) * legendre(static_cast<int>(2 * q), costheta);
  return acc;
}

MultipoleTable MultipoleTable::rescaled(double r0) const {
  if (r0_ == 0.0) throw std::logic_error("cannot rescale a table built at r0 = 0");
  std::vector<Eigen::MatrixXd> t;
  t.reserve(terms_.size());
  const double f = r0 / r0_;
  for (const auto& m : terms_) t.push_back(f * m);
  return MultipoleTable(r0, k_max_, std::move(t));
}

namespace {

int resolve_nodes(int k_max, int gauss_nodes) {
  return gauss_nodes > 0 ? gauss_nodes : std::max(2 * k_max + 8, 96);
}

// Projections of dV onto every order in `orders`, sharing the angular samples.
std::vector<Eigen::MatrixXd> project(double r0, std::span<const double> grid_r, std::span<const double> grid_R,
                                     const std::vector<int>& orders, int nodes) {
  const GaussRule g = gauss_legendre(nodes);
  const auto nr = static_cast<Eigen::Index>(grid_r.size());
  const auto nR = static_cast<Eigen::Index>(grid_R.size());
  // pw(q, m) = (2k+1)/2 w_m P_k(c_m)
  Eigen::MatrixXd pw(static_cast<Eigen::Index>(orders.size()), nodes);
  for (std::size_t q = 0; q < orders.size(); ++q) {
    for (int m = 0; m < nodes; ++m) {
      pw(static_cast<Eigen::Index>(q), m) = 0.5 * (2.0 * orders[q] + 1.0) * g.weights[m] * legendre(orders[q], g.nodes[m]);
    }
  }
  std::vector<Eigen::MatrixXd> out(orders.size(), Eigen::MatrixXd::Zero(nr, nR));
#pragma omp parallel
  {
    Eigen::VectorXd samples(nodes);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < nr; ++i) {
      for (Eigen::Index j = 0; j < nR; ++j) {
        for (int m = 0; m < nodes; ++m) samples(m) = residual_potential(grid_r[i], grid_R[j], g.nodes[m], r0);
        const Eigen::VectorXd proj = pw * samples;
        for (std::size_t q = 0; q < orders.size(); ++q) out[q](i, j) = proj(static_cast<Eigen::Index>(q));
      }
    }
  }
  return out;
}

}  // namespace

MultipoleTable multipole_decompose(double r0, std::span<const double> grid_r, std::span<const double> grid_R,
                                   int k_max, int gauss_nodes) {
  if (k_max < 0) throw ConfigError("k_max must be >= 0");
  std::vector<int> orders;
  for (int k = 0; k <= k_max; k += 2) orders.push_back(k);
  return MultipoleTable(r0, k_max, project(r0, grid_r, grid_R, orders, resolve_nodes(k_max, gauss_nodes)));
}

Eigen::MatrixXd project_multipole(double r0, std::span<const double> grid_r, std::span<const double> grid_R, int k,
                                  int gauss_nodes) {
  return project(r0, grid_r, grid_R, {k}, resolve_nodes(k, gauss_nodes)).front();
}

}  // namespace shellcir
