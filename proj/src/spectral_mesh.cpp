#include "shellcir/spectral_mesh.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "shellcir/core_model.hpp"

namespace shellcir {

GllRule gll_rule(int order) {
  if (order < 1) throw std::invalid_argument("gll_rule: order must be >= 1");
  const int p = order;
  const int n = p + 1;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = std::cos(std::numbers::pi * i / p);
  Eigen::MatrixXd leg(n, n);
  std::vector<double> xold(n, 2.0);
  for (int it = 0; it < 100; ++it) {
    double change = 0.0;
    for (int i = 0; i < n; ++i) change = std::max(change, std::abs(x[i] - xold[i]));
    if (change <= 1e-15) break;
    xold = x;
    for (int i = 0; i < n; ++i) {
      leg(i, 0) = 1.0;
      leg(i, 1) = x[i];
      for (int k = 2; k <= p; ++k) {
        leg(i, k) = ((2.0 * k - 1.0) * x[i] * leg(i, k - 1) - (k - 1.0) * leg(i, k - 2)) / k;
      }
      x[i] = xold[i] - (x[i] * leg(i, p) - leg(i, p - 1)) / (n * leg(i, p));
    }
  }
  // Final Legendre values at converged nodes.
  for (int i = 0; i < n; ++i) {
    leg(i, 0) = 1.0;
    if (p >= 1) leg(i, 1) = x[i];
    for (int k = 2; k <= p; ++k) {
      leg(i, k) = ((2.0 * k - 1.0) * x[i] * leg(i, k - 1) - (k - 1.0) * leg(i, k - 2)) / k;
    }
  }
  GllRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  std::vector<double> pp(n);
  for (int i = 0; i < n; ++i) {
    const int src = n - 1 - i;  // ascending order
    rule.nodes[i] = x[src];
    pp[i] = leg(src, p);
    rule.weights[i] = 2.0 / (p * (p + 1.0) * pp[i] * pp[i]);
  }
  rule.nodes.front() = -1.0;
  rule.nodes.back() = 1.0;
  rule.derivative = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) rule.derivative(i, j) = pp[i] / (pp[j] * (rule.nodes[i] - rule.nodes[j]));
    }
  }
  rule.derivative(0, 0) = -p * (p + 1.0) / 4.0;
  rule.derivative(p, p) = p * (p + 1.0) / 4.0;
  rule.barycentric.resize(n);
  for (int j = 0; j < n; ++j) {
    double prod = 1.0;
    for (int k = 0; k < n; ++k) {
      if (k != j) prod *= rule.nodes[j] - rule.nodes[k];
    }
    rule.barycentric[j] = 1.0 / prod;
  }
  return rule;
}

SpectralMesh::SpectralMesh(std::vector<double> breaks, int order)
    : breaks_(std::move(breaks)), order_(order), rule_(gll_rule(order)) {
  if (breaks_.size() < 2) throw std::invalid_argument("SpectralMesh: need at least one element");
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    if (!(breaks_[i] > breaks_[i - 1])) throw std::invalid_argument("SpectralMesh: breaks must increase");
  }
  const int ne = element_count();
  nodes_.assign(static_cast<std::size_t>(ne * order_ + 1), 0.0);
  weights_.assign(nodes_.size(), 0.0);
  for (int e = 0; e < ne; ++e) {
    const double a = breaks_[e];
    const double b = breaks_[e + 1];
    const double half = 0.5 * (b - a);
    for (int j = 0; j <= order_; ++j) {
      const int g = e * order_ + j;
      nodes_[g] = a + half * (rule_.nodes[j] + 1.0);
      weights_[g] += half * rule_.weights[j];
    }
    nodes_[e * order_] = a;
    nodes_[(e + 1) * order_] = b;
  }
}

SpectralMesh SpectralMesh::uniform(double lo, double hi, int elements, int order, int layers, double ratio) {
  std::vector<double> breaks;
  const double h = (hi - lo) / elements;
  breaks.push_back(lo);
  if (layers > 0) {
    std::vector<double> inner;
    double w = h;
    for (int k = 0; k < layers; ++k) {
      w *= ratio;
      inner.push_back(lo + w);
    }
    std::reverse(inner.begin(), inner.end());
    breaks.insert(breaks.end(), inner.begin(), inner.end());
  }
  for (int e = 1; e <= elements; ++e) breaks.push_back(e == elements ? hi : lo + e * h);
  return SpectralMesh(std::move(breaks), order);
}

Eigen::MatrixXd SpectralMesh::stiffness() const {
  const int n = size();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  const int p = order_;
  for (int e = 0; e < element_count(); ++e) {
    const double scale = 2.0 / (breaks_[e + 1] - breaks_[e]);
    for (int i = 0; i <= p; ++i) {
      for (int j = 0; j <= p; ++j) {
        double acc = 0.0;
        for (int q = 0; q <= p; ++q) acc += rule_.weights[q] * rule_.derivative(q, i) * rule_.derivative(q, j);
        s(e * p + i, e * p + j) += scale * acc;
      }
    }
  }
  return s;
}

int SpectralMesh::locate(double x) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  int e = static_cast<int>(it - breaks_.begin()) - 1;
  return std::clamp(e, 0, element_count() - 1);
}

void SpectralMesh::interpolation_row(double x, int& first, std::vector<double>& coeff) const {
  coeff.assign(static_cast<std::size_t>(order_ + 1), 0.0);
  const int e = locate(x);
  first = e * order_;
  const double a = breaks_[e];
  const double b = breaks_[e + 1];
  const double t = 2.0 * (x - a) / (b - a) - 1.0;
  double denom = 0.0;
  for (int j = 0; j <= order_; ++j) {
    const double d = t - rule_.nodes[j];
    if (d == 0.0) {
      std::fill(coeff.begin(), coeff.end(), 0.0);
      coeff[j] = 1.0;
      return;
    }
    coeff[j] = rule_.barycentric[j] / d;
    denom += coeff[j];
  }
  for (auto& c : coeff) c /= denom;
}

double SpectralMesh::interpolate(std::span<const double> values, double x) const {
  if (x < lo() || x > hi()) return 0.0;
  int first = 0;
  std::vector<double> coeff;
  interpolation_row(x, first, coeff);
  double acc = 0.0;
  for (std::size_t k = 0; k < coeff.size(); ++k) acc += coeff[k] * values[first + k];
  return acc;
}

double SpectralMesh::derivative(std::span<const double> values, double x) const {
  if (x < lo() || x > hi()) return 0.0;
  const int e = locate(x);
  const int first = e * order_;
  const double a = breaks_[e];
  const double b = breaks_[e + 1];
  const double scale = 2.0 / (b - a);
  const double t = 2.0 * (x - a) / (b - a) - 1.0;
  for (int j = 0; j <= order_; ++j) {
    if (t == rule_.nodes[j]) {
      double acc = 0.0;
      for (int k = 0; k <= order_; ++k) acc += rule_.derivative(j, k) * values[first + k];
      return scale * acc;
    }
  }
  double s = 0.0;
  double num = 0.0;
  for (int j = 0; j <= order_; ++j) {
    const double d = t - rule_.nodes[j];
    s += rule_.barycentric[j] / d;
    num += rule_.barycentric[j] * values[first + j] / d;
  }
  const double p = num / s;
  double dnum = 0.0;
  for (int j = 0; j <= order_; ++j) {
    const double d = t - rule_.nodes[j];
    dnum += rule_.barycentric[j] * (p - values[first + j]) / (d * d);
  }
  return scale * dnum / s;
}

void fix_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      const double m = std::abs(vectors(r, c));
      // Strict comparison with a relative margin keeps the pick stable
      // when two entries are equal up to rounding.
      if (m > best * (1.0 + 1e-10)) {
        best = m;
        imax = r;
      }
    }
    if (vectors(imax, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

EigenPairs lowest_eigenpairs(Eigen::MatrixXd h, int count) {
  const auto n = static_cast<lapack_int>(h.rows());
  if (h.cols() != h.rows()) throw std::invalid_argument("lowest_eigenpairs: matrix must be square");
  EigenPairs out;
  if (n == 0) {
    out.values.resize(0);
    out.vectors.resize(0, 0);
    return out;
  }
  const lapack_int m_req = (count < 0 || count >= n) ? n : static_cast<lapack_int>(count);
  // Householder tridiagonalization (Eigen) followed by MRRR on the
  // tridiagonal matrix for the requested lowest pairs.
  h.triangularView<Eigen::StrictlyLower>() = h.transpose().triangularView<Eigen::StrictlyLower>();
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(h);
  Eigen::VectorXd d = tri.diagonal();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  if (n > 1) e.head(n - 1) = tri.subDiagonal();
  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, m_req);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(m_req));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  const lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', m_req == n ? 'A' : 'I', n, d.data(), e.data(), 0.0,
                                         0.0, 1, m_req, &found, w.data(), z.data(), n, m_req, support.data(), &tryrac);
  if (info != 0 || found != m_req) {
    throw NumericalError("symmetric eigensolver failed (info=" + std::to_string(info) + ", found " +
                         std::to_string(found) + " of " + std::to_string(m_req) + ", dim " + std::to_string(n) + ")");
  }
  out.values = w.head(m_req);
  out.vectors = tri.matrixQ() * z;
  fix_signs(out.vectors);
  return out;
}

EigenPairs solve_operator(const SpectralMesh& mesh, const Operator1D& op, std::span<const double> potential,
                          int count) {
  const int n = mesh.size();
  const int first = op.left_log_derivative ? 0 : 1;
  const int last = op.dirichlet_right ? n - 2 : n - 1;
  const int dof = last - first + 1;
  if (dof < 1) throw ConfigError("spectral mesh too small for the boundary conditions");
  const Eigen::MatrixXd s = mesh.stiffness();
  const auto& w = mesh.weights();
  Eigen::MatrixXd h(dof, dof);
  for (int i = 0; i < dof; ++i) {
    for (int j = 0; j < dof; ++j) {
      const int gi = first + i;
      const int gj = first + j;
      h(i, j) = op.kinetic * s(gi, gj) / std::sqrt(w[gi] * w[gj]);
    }
    h(i, i) += potential[first + i];
  }
  if (op.left_log_derivative) h(0, 0) += op.kinetic * (*op.left_log_derivative) / w[0];
  EigenPairs reduced = lowest_eigenpairs(std::move(h), count);
  EigenPairs out;
  out.values = reduced.values;
  out.vectors = Eigen::MatrixXd::Zero(n, reduced.vectors.cols());
  for (int i = 0; i < dof; ++i) {
    out.vectors.row(first + i) = reduced.vectors.row(i) / std::sqrt(w[first + i]);
  }
  return out;
}

}  // namespace shellcir
