#include "shellcir/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "shellcir/busch.hpp"

namespace shellcir {

namespace {

bool same_mesh(const RadialGrid& a, const RadialGrid& b) {
  if (a.mesh == b.mesh) return true;
  if (!a.mesh || !b.mesh) return false;
  return a.points() == b.points();
}

}  // namespace

double state_overlap(const ChannelFunctions& a, const ChannelFunctions& b) {
  if (a.u.size() != b.u.size()) throw std::invalid_argument("state_overlap: channel sets differ");
  if (a.u.empty()) return 0.0;
  if (!same_mesh(a.rel_grid, b.rel_grid) || !same_mesh(a.com_grid, b.com_grid)) {
    throw std::invalid_argument("state_overlap: states live on different grids");
  }
  const auto& w = a.rel_grid.weights();
  const auto& W = a.com_grid.weights();
  const Eigen::Map<const Eigen::VectorXd> wr(w.data(), static_cast<Eigen::Index>(w.size()));
  const Eigen::Map<const Eigen::VectorXd> wR(W.data(), static_cast<Eigen::Index>(W.size()));
  double acc = 0.0;
  for (std::size_t ch = 0; ch < a.u.size(); ++ch) {
    if (a.u[ch].rows() != b.u[ch].rows() || a.u[ch].cols() != b.u[ch].cols()) {
      throw std::invalid_argument("state_overlap: grid sizes differ");
    }
    acc += wr.transpose() * a.u[ch].cwiseProduct(b.u[ch]) * wR;
  }
  return std::abs(acc);
}

double state_overlap(const SpectrumResult& a, const ProductBasis& basis_a, int n, const SpectrumResult& b,
                     const ProductBasis& basis_b, int m) {
  if (basis_a.channels != basis_b.channels || basis_a.n_rel != basis_b.n_rel || basis_a.n_com != basis_b.n_com) {
    throw std::invalid_argument("state_overlap: product bases differ in shape");
  }
  if (n < 0 || n >= a.size() || m < 0 || m >= b.size()) throw std::out_of_range("state_overlap: state index");
  const int nr = basis_a.n_rel;
  const int nc = basis_a.n_com;
  double acc = 0.0;
  for (std::size_t ch = 0; ch < basis_a.channels.size(); ++ch) {
    if (basis_a.rel[ch] != basis_b.rel[ch]) throw std::invalid_argument("state_overlap: relative bases differ");
    const auto& ca = basis_a.com[ch];
    const auto& cb = basis_b.com[ch];
    if (!same_mesh(ca.grid, cb.grid)) throw std::invalid_argument("state_overlap: CoM grids differ");
    const auto& w = ca.grid.weights();
    const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
    const Eigen::MatrixXd o = ca.functions.transpose() * wv.asDiagonal() * cb.functions;
    const int off = basis_a.offset(static_cast<int>(ch));
    const Eigen::Map<const Eigen::MatrixXd, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>> x(
        a.coeffs.col(n).data() + off, nr, nc, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(1, nc));
    const Eigen::Map<const Eigen::MatrixXd, 0, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>> y(
        b.coeffs.col(m).data() + off, nr, nc, Eigen::Stride<Eigen::Dynamic, Eigen::Dynamic>(1, nc));
    acc += (x * o).cwiseProduct(y).sum();
  }
  return std::abs(acc);
}

FidelityPoint fidelity_point(const CoupledChannelSolver& solver, double r0, double delta_r0, int n_states) {
  if (!(delta_r0 > 0.0)) throw ConfigError("delta_r0 must be > 0");
  ProductBasis b0;
  ProductBasis b1;
  const SpectrumResult s0 = solver.solve(r0, n_states, &b0);
  const SpectrumResult s1 = solver.solve(r0 + delta_r0, n_states, &b1);
  FidelityPoint p;
  p.r0 = r0;
  p.energies = s0.energies;
  p.delta_f.resize(s0.size());
  for (int n = 0; n < s0.size(); ++n) {
    const double ov = state_overlap(s0, b0, n, s1, b1, n);
    p.delta_f(n) = std::max(0.0, 1.0 - ov) / (delta_r0 * delta_r0);
  }
  return p;
}

FidelityScan assemble_scan(std::vector<FidelityPoint> points, double delta_r0) {
  std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.r0 < b.r0; });
  FidelityScan scan;
  scan.delta_r0 = delta_r0;
  if (points.empty()) return scan;
  const auto ns = points.front().energies.size();
  scan.energies.resize(static_cast<Eigen::Index>(points.size()), ns);
  scan.delta_f.resize(static_cast<Eigen::Index>(points.size()), ns);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].energies.size() != ns) throw std::invalid_argument("scan points disagree on state count");
    scan.r0.push_back(points[i].r0);
    scan.energies.row(static_cast<Eigen::Index>(i)) = points[i].energies.transpose();
    scan.delta_f.row(static_cast<Eigen::Index>(i)) = points[i].delta_f.transpose();
  }
  return scan;
}

FidelityScan fidelity_scan(const CoupledChannelSolver& solver, std::span<const double> r0_grid, double delta_r0,
                           int n_states) {
  std::vector<FidelityPoint> points(r0_grid.size());
  std::string failure;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < r0_grid.size(); ++i) {
    try {
      points[i] = fidelity_point(solver, r0_grid[i], delta_r0, n_states);
    } catch (const std::exception& e) {
#pragma omp critical
      failure = e.what();
    }
  }
  if (!failure.empty()) throw NumericalError(failure);
  return assemble_scan(std::move(points), delta_r0);
}

std::string to_string(AcClass c) {
  switch (c) {
    case AcClass::bound_trap:
      return "bound-trap";
    case AcClass::trap_trap:
      return "trap-trap";
    case AcClass::unclassified:
      break;
  }
  return "unclassified";
}

std::string AvoidedCrossing::label_text() const {
  const auto text = [](const std::optional<AdiabaticLevel>& l) { return l ? l->label() : std::string("mixed"); };
  return text(label_lower) + "/" + text(label_upper);
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Vertex of the parabola through (x[i-1..i+1], y[i-1..i+1]).
std::pair<double, double> parabola_vertex(std::span<const double> x, const std::vector<double>& y, std::size_t i) {
  const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
  const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double a = (d12 - d01) / (x2 - x0);
  if (a == 0.0) return {x1, y1};
  const double b = d01 - a * (x0 + x1);
  const double xv = -b / (2.0 * a);
  const double yv = y1 + (xv - x1) * (d01 + a * (xv - x0));
  if (xv < x0 || xv > x2) return {x1, y1};
  return {xv, yv};
}

}  // namespace

Detection detect_acs(std::span<const double> r0, const Eigen::MatrixXd& delta_f, const Eigen::MatrixXd& energies,
                     const DetectionOptions& options) {
  Detection out;
  const auto np = static_cast<int>(r0.size());
  const auto ns = static_cast<int>(delta_f.cols());
  if (np < 3 || ns < 2) return out;
  if (delta_f.rows() != np || energies.rows() != np || energies.cols() != ns) {
    throw std::invalid_argument("detect_acs: curve and energy tables disagree");
  }
  std::vector<std::vector<int>> peaks(static_cast<std::size_t>(ns));
  for (int n = 0; n < ns; ++n) {
    std::vector<double> curve(delta_f.col(n).data(), delta_f.col(n).data() + np);
    const double floor = options.noise_factor * median(curve);
    for (int i = 1; i + 1 < np; ++i) {
      if (curve[i] > curve[i - 1] && curve[i] >= curve[i + 1] && curve[i] > floor) peaks[n].push_back(i);
    }
  }
  std::vector<std::vector<bool>> used(static_cast<std::size_t>(ns));
  for (int n = 0; n < ns; ++n) used[n].assign(peaks[n].size(), false);

  for (int n = 0; n + 1 < ns; ++n) {
    for (std::size_t pi = 0; pi < peaks[n].size(); ++pi) {
      if (used[n][pi]) continue;
      const int p = peaks[n][pi];
      int best = -1;
      for (std::size_t qi = 0; qi < peaks[n + 1].size(); ++qi) {
        if (used[n + 1][qi]) continue;
        const int d = std::abs(peaks[n + 1][qi] - p);
        if (d <= options.pair_window && (best < 0 || d < std::abs(peaks[n + 1][best] - p))) best = static_cast<int>(qi);
      }
      if (best < 0) continue;
      used[n][pi] = true;
      used[n + 1][best] = true;
      const int q = peaks[n + 1][best];

      std::vector<double> sum(static_cast<std::size_t>(np));
      for (int i = 0; i < np; ++i) sum[i] = delta_f(i, n) + delta_f(i, n + 1);
      int m = std::min(p, q);
      for (int i = std::max(1, std::min(p, q) - 1); i <= std::min(np - 2, std::max(p, q) + 1); ++i) {
        if (sum[i] > sum[m]) m = i;
      }
      AvoidedCrossing ac;
      ac.lower = n;
      ac.upper = n + 1;
      ac.peak_index = m;
      const auto [xv, yv] = parabola_vertex(r0, sum, static_cast<std::size_t>(m));
      ac.r0_star = xv;
      ac.peak = 0.5 * yv;

      // Full width at half maximum of the summed curve.
      const double half = 0.5 * yv;
      double left = std::numeric_limits<double>::quiet_NaN();
      double right = left;
      for (int i = m; i > 0; --i) {
        if (sum[i - 1] < half) {
          left = r0[i - 1] + (half - sum[i - 1]) / (sum[i] - sum[i - 1]) * (r0[i] - r0[i - 1]);
          break;
        }
      }
      for (int i = m; i + 1 < np; ++i) {
        if (sum[i + 1] < half) {
          right = r0[i] + (sum[i] - half) / (sum[i] - sum[i + 1]) * (r0[i + 1] - r0[i]);
          break;
        }
      }
      ac.fwhm = right - left;

      // Gap: minimum of the splitting near the peak; its square is a
      // parabola for two coupled linear levels.
      const double h = r0[1] - r0[0];
      const int reach = std::max(3, std::isfinite(ac.fwhm) ? static_cast<int>(std::ceil(ac.fwhm / h)) : 3);
      std::vector<double> gap2(static_cast<std::size_t>(np));
      for (int i = 0; i < np; ++i) {
        const double d = energies(i, n + 1) - energies(i, n);
        gap2[i] = d * d;
      }
      int j = m;
      for (int i = std::max(0, m - reach); i <= std::min(np - 1, m + reach); ++i) {
        if (gap2[i] < gap2[j]) j = i;
      }
      double g2 = gap2[j];
      if (j > 0 && j + 1 < np) {
        const auto [gx, gy] = parabola_vertex(r0, gap2, static_cast<std::size_t>(j));
        (void)gx;
        if (gy > 0.0 && gy <= g2) g2 = gy;
      }
      ac.gap = std::sqrt(g2);
      out.crossings.push_back(ac);
    }
  }
  for (int n = 0; n < ns; ++n) {
    for (std::size_t pi = 0; pi < peaks[n].size(); ++pi) {
      if (used[n][pi]) continue;
      const int i = peaks[n][pi];
      out.unpaired.push_back(UnpairedFeature{n, i, r0[i], delta_f(i, n)});
    }
  }
  std::sort(out.crossings.begin(), out.crossings.end(), [](const auto& a, const auto& b) {
    return std::tie(a.r0_star, a.lower) < std::tie(b.r0_star, b.lower);
  });
  return out;
}

AcClass classify_ac(const std::optional<AdiabaticLevel>& a, const std::optional<AdiabaticLevel>& b,
                    ScatteringLength scattering) {
  if (!a || !b) return AcClass::unclassified;
  bool molecular_branch = false;
  if (scattering.admits_bound_state()) molecular_branch = solve_busch_roots(scattering.inverse(), 1)[0].energy < 0.0;
  const auto molecular = [&](const AdiabaticLevel& lv) { return molecular_branch && lv.l == 0 && lv.n_chi == 0; };
  const int count = static_cast<int>(molecular(*a)) + static_cast<int>(molecular(*b));
  if (count == 1) return AcClass::bound_trap;
  if (count == 0) return AcClass::trap_trap;
  return AcClass::unclassified;
}

void label_crossings(Detection& detection, const FidelityScan& scan, const ModelParams& params,
                     const Truncation& trunc) {
  const int np = static_cast<int>(scan.r0.size());
  if (np < 2) return;
  std::map<int, std::vector<StateLabel>> cache;
  const auto labels_at = [&](int i) -> const std::vector<StateLabel>& {
    auto it = cache.find(i);
    if (it != cache.end()) return it->second;
    const AdiabaticSpectrum ad = adiabatic_spectrum(params, trunc, scan.r0[i]);
    const Eigen::VectorXd e = scan.energies.row(i).transpose();
    return cache.emplace(i, label_exact_states(std::span<const double>(e.data(), e.size()), ad)).first->second;
  };
  const double h = scan.r0[1] - scan.r0[0];
  for (auto& ac : detection.crossings) {
    const int offs = std::max(2, std::isfinite(ac.fwhm) ? static_cast<int>(std::ceil(ac.fwhm / h)) : 2);
    const int before = std::max(0, ac.peak_index - offs);
    const int after = std::min(np - 1, ac.peak_index + offs);
    const auto& lb = labels_at(before);
    if (lb[ac.lower].level && lb[ac.upper].level) {
      ac.label_lower = lb[ac.lower].level;
      ac.label_upper = lb[ac.upper].level;
    } else {
      const auto& la = labels_at(after);
      ac.label_lower = la[ac.upper].level;
      ac.label_upper = la[ac.lower].level;
    }
    ac.cls = classify_ac(ac.label_lower, ac.label_upper, params.scattering);
  }
}

AcMap ac_map(std::span<const double> a0_grid, std::span<const double> r0_grid, const ModelParams& params,
             const Truncation& trunc, int n_states) {
  AcMap map;
  if (a0_grid.empty() || r0_grid.empty()) return map;
  const double r0_max = *std::max_element(r0_grid.begin(), r0_grid.end()) + params.delta_r0;
  for (double a0 : a0_grid) {
    try {
      ModelParams p = params;
      p.scattering = ScatteringLength::from_length(a0);
      const CoupledChannelSolver solver(p, trunc, r0_max);
      const FidelityScan scan = fidelity_scan(solver, r0_grid, p.delta_r0, n_states);
      Detection det = detect_acs(scan.r0, scan.delta_f, scan.energies);
      label_crossings(det, scan, p, trunc);
      for (const auto& ac : det.crossings) map.rows.push_back(AcMapRow{a0, ac});
    } catch (const std::exception& e) {
      map.failures.push_back("a0=" + std::to_string(a0) + ": " + e.what());
    }
  }
  return map;
}

double AcLocus::relative_spread() const {
  if (r0_star.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(r0_star.begin(), r0_star.end());
  const double mean = std::accumulate(r0_star.begin(), r0_star.end(), 0.0) / static_cast<double>(r0_star.size());
  return (*hi - *lo) / mean;
}

bool AcLocus::strictly_increasing() const {
  for (std::size_t i = 1; i < r0_star.size(); ++i) {
    if (!(r0_star[i] > r0_star[i - 1])) return false;
  }
  return true;
}

std::vector<AcLocus> group_loci(const AcMap& map) {
  std::map<std::pair<int, std::string>, AcLocus> groups;
  for (const auto& row : map.rows) {
    std::string a = row.ac.label_lower ? row.ac.label_lower->label() : "mixed";
    std::string b = row.ac.label_upper ? row.ac.label_upper->label() : "mixed";
    if (b < a) std::swap(a, b);
    const std::string key = a + "/" + b;
    auto& locus = groups[{static_cast<int>(row.ac.cls), key}];
    locus.cls = row.ac.cls;
    locus.labels = key;
    if (!locus.a0.empty() && locus.a0.back() == row.a0) continue;  // keep the first hit per a0
    locus.a0.push_back(row.a0);
    locus.r0_star.push_back(row.ac.r0_star);
  }
  std::vector<AcLocus> out;
  for (auto& [key, locus] : groups) {
    std::vector<std::size_t> order(locus.a0.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return locus.a0[i] < locus.a0[j]; });
    AcLocus sorted;
    sorted.cls = locus.cls;
    sorted.labels = locus.labels;
    for (auto i : order) {
      sorted.a0.push_back(locus.a0[i]);
      sorted.r0_star.push_back(locus.r0_star[i]);
    }
    out.push_back(std::move(sorted));
  }
  return out;
}

double TwoLevelModel::mixing_angle(double r0) const { return std::atan2(0.5 * gap, slope * (r0 - rc)); }

Eigen::Vector2d TwoLevelModel::energies(double r0) const {
  const double x = slope * (r0 - rc);
  const double rho = std::sqrt(x * x + 0.25 * gap * gap);
  return {-rho, rho};
}

Eigen::Matrix2d TwoLevelModel::states(double r0) const {
  const double t = 0.5 * mixing_angle(r0);
  Eigen::Matrix2d v;
  v << std::sin(t), std::cos(t), -std::cos(t), std::sin(t);
  return v;
}

double TwoLevelModel::peak_height() const { return 0.5 * (slope / gap) * (slope / gap); }

double TwoLevelModel::fwhm() const { return (gap / std::abs(slope)) * std::sqrt(std::sqrt(2.0) - 1.0); }

FidelityScan two_level_scan(const TwoLevelModel& model, std::span<const double> r0, double delta_r0) {
  std::vector<FidelityPoint> points;
  for (double x : r0) {
    FidelityPoint p;
    p.r0 = x;
    p.energies = model.energies(x);
    const Eigen::Matrix2d a = model.states(x);
    const Eigen::Matrix2d b = model.states(x + delta_r0);
    p.delta_f.resize(2);
    for (int n = 0; n < 2; ++n) {
      p.delta_f(n) = std::max(0.0, 1.0 - std::abs(a.col(n).dot(b.col(n)))) / (delta_r0 * delta_r0);
    }
    points.push_back(std::move(p));
  }
  return assemble_scan(std::move(points), delta_r0);
}

}  // namespace shellcir
