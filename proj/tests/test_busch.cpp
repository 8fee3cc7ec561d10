#include <doctest.h>

#include <cmath>

#include "shellcir/busch.hpp"
#include "shellcir/core_model.hpp"

using namespace shellcir;

namespace {

// Independent oracle: the Busch left-hand side straight from std::tgamma.
double lhs_tgamma(double e) { return std::sqrt(2.0) * std::tgamma(0.75 - 0.5 * e) / std::tgamma(0.25 - 0.5 * e); }

}  // namespace

TEST_SUITE("busch") {
  TEST_CASE("left-hand side") {
    REQUIRE(busch_lhs(0.5).has_value());
    CHECK(*busch_lhs(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    REQUIRE(busch_lhs(0.0).has_value());
    CHECK(*busch_lhs(0.0) == doctest::Approx(0.477988797486125).epsilon(1e-12));
    CHECK_FALSE(busch_lhs(1.5).has_value());
    for (double e : {-7.3, -1.0, 0.3, 1.1, 2.9, 6.2, 11.7}) CHECK(*busch_lhs(e) == doctest::Approx(lhs_tgamma(e)).epsilon(1e-12));
  }

  TEST_CASE("unitarity ladder") {
    const auto roots = solve_busch_roots(0.0, 6);
    REQUIRE(roots.size() == 6);
    for (int n = 0; n < 6; ++n) CHECK(std::abs(roots[n].energy - (0.5 + 2.0 * n)) < 1e-10);
  }

  TEST_CASE("non-interacting limit approaches the s-wave ladder") {
    const auto roots = solve_busch_roots(-1e8, 4);
    for (int n = 0; n < 4; ++n) CHECK(std::abs(roots[n].energy - (1.5 + 2.0 * n)) < 1e-6);
  }

  TEST_CASE("roots solve the transcendental equation") {
    for (double a0 : {0.1, 0.53, 1.0, 3.0, -0.4, -2.0}) {
      const auto roots = solve_busch_roots(1.0 / a0, 5);
      for (std::size_t n = 0; n < roots.size(); ++n) {
        CAPTURE(a0);
        CAPTURE(n);
        const double e = roots[n].energy;
        CHECK(lhs_tgamma(e) == doctest::Approx(1.0 / a0).epsilon(1e-9));
        if (n > 0) CHECK(e > roots[n - 1].energy);
        // One root between consecutive numerator poles 3/2 + 2n.
        CHECK(e < 1.5 + 2.0 * static_cast<double>(n));
        if (n > 0) CHECK(e > 1.5 + 2.0 * static_cast<double>(n - 1));
      }
    }
  }

  TEST_CASE("bound root at a0 = 0.53") {
    const double e0 = solve_busch_roots(1.0 / 0.53, 1)[0].energy;
    // 30-digit root of the gamma-function equation (mpmath findroot).
    CHECK(e0 == doctest::Approx(-3.5259279562699488).epsilon(1e-10));
    // The small-a0 series agrees to O(a0^6).
    CHECK(std::abs(e0 - series_small_a0_3d(0.53)) < std::pow(0.53, 6));
  }

  TEST_CASE("series formulas") {
    CHECK(series_small_a0_3d(0.1) == doctest::Approx(-99.99875).epsilon(1e-12));
    CHECK(std::abs(series_small_a0_3d(0.53) - (-3.52487)) < 1e-5);
    CHECK(series_large_r0(0.1) == doctest::Approx(-99.9995833333).epsilon(1e-12));
    // -1/0.53^2 + 0.53^2/24 = -3.5482816; the quoted five decimals are truncated.
    CHECK(std::abs(series_large_r0(0.53) - (-3.54827)) < 2e-5);
    CHECK_THROWS_AS(series_small_a0_3d(1.5), ConfigError);
    CHECK_THROWS_AS(series_large_r0(0.0), ConfigError);
  }

  TEST_CASE("a0 = 0.1 bound root matches the series") {
    const double e0 = solve_busch_roots(10.0, 1)[0].energy;
    CHECK(std::abs(e0 - series_small_a0_3d(0.1)) < 1e-4);
  }

  TEST_CASE("r0 = 0 two-particle spectrum") {
    CHECK(spectrum_r0_zero(0.0, 3, 3).front().energy == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(spectrum_r0_zero(-1e8, 3, 3).front().energy == doctest::Approx(3.0).epsilon(1e-7));
    const auto s = spectrum_r0_zero(1.0 / 0.53, 4, 4);
    CHECK(s.front().energy == doctest::Approx(-3.5259279562699488 + 1.5).epsilon(1e-10));
    CHECK(s.front().n_xi == 0);
    CHECK(s.front().n_chi == 0);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].energy >= s[i - 1].energy);
  }

  TEST_CASE("invalid count") { CHECK_THROWS_AS(solve_busch_roots(0.0, 0), ConfigError); }
}
