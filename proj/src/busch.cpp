#include "shellcir/busch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shellcir/core_model.hpp"

namespace shellcir {
namespace {

double log_gamma_positive(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

/// sin(pi x) with exact argument reduction about the nearest integer.
double sin_pi(double x) {
  const double n = std::nearbyint(x);
  const double f = x - n;
  const double s = std::sin(std::numbers::pi * f);
  return (std::fmod(std::abs(n), 2.0) == 1.0) ? -s : s;
}

struct LogGamma {
  double log_abs;
  int sign;
};

/// log|Gamma(x)| and its sign; x must not be a nonpositive integer.
LogGamma log_gamma(double x) {
  if (x > 0.0) return {log_gamma_positive(x), 1};
  // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
  const double s = sin_pi(x);
  return {std::log(std::numbers::pi) - std::log(std::abs(s)) - log_gamma_positive(1.0 - x), s > 0 ? 1 : -1};
}

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

}  // namespace

std::optional<double> busch_lhs(double energy) {
  const double a = 0.75 - 0.5 * energy;
  const double b = 0.25 - 0.5 * energy;
  if (is_nonpositive_integer(a)) return std::nullopt;
  if (is_nonpositive_integer(b)) return 0.0;
  const LogGamma ga = log_gamma(a);
  const LogGamma gb = log_gamma(b);
  return std::numbers::sqrt2 * ga.sign * gb.sign * std::exp(ga.log_abs - gb.log_abs);
}

std::vector<BuschRoot> solve_busch_roots(double inv_a0, int n_max) {
  if (n_max < 1) throw ConfigError("solve_busch_roots: n_max must be >= 1");
  std::vector<BuschRoot> roots;
  roots.reserve(static_cast<std::size_t>(n_max));
  for (int n = 0; n < n_max; ++n) {
    double hi = 2.0 * n + 1.5;
    double lo = (n == 0) ? -(inv_a0 * inv_a0) - 10.0 : 2.0 * n - 0.5;
    // Step off the poles; g = lhs - inv_a0 runs from +inf (lo) to -inf (hi).
    lo = std::nextafter(lo, hi);
    hi = std::nextafter(hi, lo);
    auto g = [&](double e) { return *busch_lhs(e) - inv_a0; };
    double glo = g(lo);
    double ghi = g(hi);
    if (n == 0) {
      for (int expand = 0; expand < 60 && glo < 0.0; ++expand) {
        lo = 2.0 * lo - 1.0;
        glo = g(lo);
      }
    }
    if (!(glo > 0.0) || !(ghi < 0.0)) {
      throw NumericalError("busch root " + std::to_string(n) + ": no sign change on [" + std::to_string(lo) +
                           ", " + std::to_string(hi) + "]");
    }
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double gm = g(mid);
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      (gm > 0.0 ? lo : hi) = mid;
    }
    const double root = (std::abs(g(lo)) <= std::abs(g(hi))) ? lo : hi;
    roots.push_back({n, root});
  }
  return roots;
}

namespace {
void check_series_domain(double a0) {
  if (!(a0 > 0.0 && a0 < 1.0)) throw ConfigError("series domain: requires 0 < a0 < 1, got " + std::to_string(a0));
}
}  // namespace

double series_small_a0_3d(double a0) {
  check_series_domain(a0);
  return -1.0 / (a0 * a0) + a0 * a0 / 8.0;
}

double series_large_r0(double a0) {
  check_series_domain(a0);
  return -1.0 / (a0 * a0) + a0 * a0 / 24.0;
}

std::vector<LabeledLevel> spectrum_r0_zero(double inv_a0, int n_xi_max, int n_chi_max) {
  const auto roots = solve_busch_roots(inv_a0, n_chi_max);
  std::vector<LabeledLevel> out;
  for (const auto& root : roots) {
    for (int n_xi = 0; n_xi < n_xi_max; ++n_xi) {
      out.push_back({n_xi, root.n_chi, root.energy + 2.0 * n_xi + 1.5});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const LabeledLevel& x, const LabeledLevel& y) {
    if (x.energy != y.energy) return x.energy < y.energy;
    if (x.n_chi != y.n_chi) return x.n_chi < y.n_chi;
    return x.n_xi < y.n_xi;
  });
  return out;
}

}  // namespace shellcir
