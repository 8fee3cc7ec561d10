#include "shellcir/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

namespace shellcir {
namespace {

constexpr int kMaxFactorial = 400;

const std::array<long double, kMaxFactorial + 1>& factorials() {
  static const auto table = [] {
    std::array<long double, kMaxFactorial + 1> t{};
    t[0] = 1.0L;
    for (int i = 1; i <= kMaxFactorial; ++i) t[i] = t[i - 1] * static_cast<long double>(i);
    return t;
  }();
  return table;
}

long double fact(int n) { return factorials().at(static_cast<std::size_t>(n)); }

bool triangle(int a, int b, int c) { return c >= std::abs(a - b) && c <= a + b && a >= 0 && b >= 0 && c >= 0; }

/// Triangle coefficient Delta(abc).
long double delta(int a, int b, int c) {
  return std::sqrt(fact(a + b - c) * fact(a - b + c) * fact(-a + b + c) / fact(a + b + c + 1));
}

int parity_sign(int n) { return (n % 2 == 0) ? 1 : -1; }

}  // namespace

double wigner_3j(int j1, int j2, int j3, int m1, int m2, int m3) {
  if (m1 + m2 + m3 != 0) return 0.0;
  if (!triangle(j1, j2, j3)) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
  const int kmin = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
  const int kmax = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    const long double den = fact(k) * fact(j1 + j2 - j3 - k) * fact(j1 - m1 - k) * fact(j2 + m2 - k) *
                            fact(j3 - j2 + m1 + k) * fact(j3 - j1 - m2 + k);
    sum += parity_sign(k) / den;
  }
  const long double pre = delta(j1, j2, j3) * std::sqrt(fact(j1 + m1) * fact(j1 - m1) * fact(j2 + m2) *
                                                        fact(j2 - m2) * fact(j3 + m3) * fact(j3 - m3));
  return static_cast<double>(parity_sign(j1 - j2 - m3) * pre * sum);
}

double wigner_6j(int j1, int j2, int j3, int j4, int j5, int j6) {
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) || !triangle(j4, j5, j3)) return 0.0;
  const int a1 = j1 + j2 + j3;
  const int a2 = j1 + j5 + j6;
  const int a3 = j4 + j2 + j6;
  const int a4 = j4 + j5 + j3;
  const int b1 = j1 + j2 + j4 + j5;
  const int b2 = j2 + j3 + j5 + j6;
  const int b3 = j3 + j1 + j6 + j4;
  const int tmin = std::max({a1, a2, a3, a4});
  const int tmax = std::min({b1, b2, b3});
  long double sum = 0.0L;
  for (int t = tmin; t <= tmax; ++t) {
    const long double den =
        fact(t - a1) * fact(t - a2) * fact(t - a3) * fact(t - a4) * fact(b1 - t) * fact(b2 - t) * fact(b3 - t);
    sum += parity_sign(t) * fact(t + 1) / den;
  }
  return static_cast<double>(delta(j1, j2, j3) * delta(j1, j5, j6) * delta(j4, j2, j6) * delta(j4, j5, j3) * sum);
}

double clebsch_gordan(int j1, int m1, int j2, int m2, int J, int M) {
  return parity_sign(j1 - j2 + M) * std::sqrt(2.0 * J + 1.0) * wigner_3j(j1, j2, J, m1, m2, -M);
}

double reduced_ck(int l_bra, int k, int l_ket) {
  return parity_sign(l_bra) * std::sqrt((2.0 * l_bra + 1.0) * (2.0 * l_ket + 1.0)) *
         wigner_3j(l_bra, k, l_ket, 0, 0, 0);
}

double angular_coupling(int l, int L, int l2, int L2, int J, int k) {
  if (!triangle(l, L, J) || !triangle(l2, L2, J)) return 0.0;
  if (!triangle(l, l2, k) || !triangle(L, L2, k)) return 0.0;
  // Scalar product of two rank-k tensors acting on different subsystems.
  return parity_sign(l + L2 + J) * wigner_6j(J, L2, l2, k, l, L) * reduced_ck(l2, k, l) * reduced_ck(L2, k, L);
}

double legendre(int k, double x) {
  if (k == 0) return 1.0;
  double p0 = 1.0;
  double p1 = x;
  for (int n = 2; n <= k; ++n) {
    const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

}  // namespace shellcir
