#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "common.hpp"
#include "shellcir/coupled_channel.hpp"
#include "shellcir/hyperspherical.hpp"

using namespace shellcir;
using shellcir::test::params_at;

namespace {

constexpr double kPi = std::numbers::pi;

// Shell potential minus the hyperradial oscillator, as a function of c = rhat.Rhat.
double angular_part(double xi, double chi, double r0, double c) {
  const double r = std::numbers::sqrt2 * xi * std::sin(chi);
  const double R = xi * std::cos(chi) / std::numbers::sqrt2;
  const double a = std::sqrt(std::max(0.0, R * R + r * r / 4.0 + R * r * c));
  const double b = std::sqrt(std::max(0.0, R * R + r * r / 4.0 - R * r * c));
  return -r0 * (a + b) + std::numbers::sqrt2 * r0 * xi;
}

double monopole(double xi, double chi, double r0) {
  const int n = 20000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += angular_part(xi, chi, r0, -1.0 + (i + 0.5) * 2.0 / n);
  return s / n;
}

HyperAngularSolution angular(double xi, ScatteringLength a, double r0, int L, int l, int n) {
  Truncation t;
  auto mesh = std::make_shared<const SpectralMesh>(make_chi_mesh(t, a, xi));
  return solve_hyperangular(xi, a, r0, L, l, n, mesh);
}

}  // namespace

TEST_SUITE("hyperspherical") {
  TEST_CASE("W examples and symmetry") {
    CHECK(w_potential(1.3, 0.0, 0.8) == doctest::Approx(0.0).scale(1.0));
    CHECK(w_potential(1.0, kPi / 4.0, 1.0 / std::numbers::sqrt2) == doctest::Approx(2.0 * (1.0 - 2.0 * std::numbers::sqrt2 / 3.0)).epsilon(1e-14));
    CHECK(w_potential(1.0, kPi / 4.0, 1.0 / std::numbers::sqrt2) == doctest::Approx(0.114382).epsilon(1e-5));
    for (double chi : {0.1, 0.4, 0.7}) CHECK(w_potential(2.1, chi, 1.7) == doctest::Approx(w_potential(2.1, kPi / 2.0 - chi, 1.7)).epsilon(1e-13));
  }

  TEST_CASE("W is 2 xi^2 times the angular monopole of the shell potential") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ux(0.1, 6.0), uc(0.0, kPi / 2.0), ur(0.0, 3.0);
    for (int i = 0; i < 50; ++i) {
      const double xi = ux(rng), chi = uc(rng), r0 = ur(rng);
      CHECK(w_potential(xi, chi, r0) == doctest::Approx(2.0 * xi * xi * monopole(xi, chi, r0)).epsilon(1e-7).scale(1.0));
    }
  }

  TEST_CASE("V_c is the higher-multipole remainder of the shell potential") {
    CHECK(vc_coupling(1.5, 0.0, 1.0, 0.3, 12) == 0.0);
    CHECK(std::abs(vc_coupling(1.5, kPi / 2.0, 1.0, 0.3, 12)) < 1e-12);
    for (double chi : {0.2, 0.5, 1.1}) {
      for (double c : {-0.7, 0.0, 0.4}) {
        const double exact = angular_part(1.7, chi, 1.2, c) - monopole(1.7, chi, 1.2);
        CHECK(vc_coupling(1.7, chi, 1.2, c, 60) == doctest::Approx(exact).epsilon(1e-8).scale(1.0));
      }
    }
    // Diagnostic ratio at r0 = 2, xi = xi0 (no pass/fail).
    const double xi0 = 2.0 * std::numbers::sqrt2;
    const double w = w_potential(xi0, 0.6, 2.0) / (xi0 * xi0);
    MESSAGE("|V_c| / |W/xi^2| at r0 = 2, xi = xi0, chi = 0.6, c = 1: " << std::abs(vc_coupling(xi0, 0.6, 2.0, 1.0, 20)) / std::abs(w));
  }

  TEST_CASE("closed-form eigenvalues at r0 = 0") {
    for (double xi : {0.5, 2.0, 7.0}) {
      const auto u = angular(xi, ScatteringLength::unitarity(), 0.0, 0, 0, 3);
      CHECK(u.lambda[0] == doctest::Approx(-3.0).epsilon(1e-8).scale(1.0));
      CHECK(u.lambda[1] == doctest::Approx(5.0).epsilon(1e-8));
      CHECK(u.lambda[2] == doctest::Approx(21.0).epsilon(1e-8));
      const auto n = angular(xi, ScatteringLength::from_inverse(-1e9), 0.0, 0, 0, 3);
      CHECK(n.lambda[0] == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
      CHECK(n.lambda[1] == doctest::Approx(12.0).epsilon(1e-7));
      CHECK(n.lambda[2] == doctest::Approx(32.0).epsilon(1e-7));
      for (double a0 : {0.53, -1.0}) {
        const auto d = angular(xi, ScatteringLength::from_length(a0), 0.0, 2, 2, 3);
        for (int k = 0; k < 3; ++k) {
          const double K = 2.0 * k + 4.0;
          CHECK(d.lambda[k] == doctest::Approx(K * (K + 4.0)).epsilon(1e-8));
        }
      }
    }
  }

  TEST_CASE("n_chi counts nodes of the trap states") {
    const auto s = angular(3.0, ScatteringLength::from_length(-1.0), 1.0, 0, 0, 4);
    for (int n = 0; n < 4; ++n) CHECK(s.node_count(n) == n);
  }

  TEST_CASE("adiabatic ladders at r0 = 0") {
    Truncation t;
    ModelParams p;
    p.scattering = ScatteringLength::unitarity();
    const AdiabaticSpectrum u = adiabatic_spectrum(p, t, 0.0);
    int checked = 0;
    for (const auto& lv : u.levels) {
      if (lv.l != 0 || lv.n_chi != 0) continue;
      CHECK(std::abs(lv.energy - (2.0 * lv.n_xi + 2.0)) < 1e-5);
      ++checked;
    }
    CHECK(checked == t.n_xi_max);

    p.scattering = ScatteringLength::from_inverse(-1e9);
    const AdiabaticSpectrum n = adiabatic_spectrum(p, t, 0.0);
    for (const auto& lv : n.levels)
      if (lv.l == 0 && lv.n_chi == 0) CHECK(std::abs(lv.energy - (2.0 * lv.n_xi + 3.0)) < 1e-5);
  }

  TEST_CASE("sign changes") {
    const std::vector<double> v{1.0, 0.5, -0.2, -1.0, 1e-12, -0.5, 0.3};
    CHECK(count_sign_changes(v) == 2);  // 1e-12 is below the threshold and skipped
    const std::vector<double> z{0.0, 0.0};
    CHECK(count_sign_changes(z) == 0);
  }

  TEST_CASE("labels at r0 = 0 and before AC A") {
    const Truncation t;
    const ModelParams p = params_at(0.53);
    {
      const AdiabaticSpectrum a = adiabatic_spectrum(p, t, 0.0);
      const std::vector<double> exact{a.levels[0].energy + 1e-3};
      const auto lab = label_exact_states(exact, a);
      REQUIRE(lab[0].level.has_value());
      CHECK(lab[0].level->label() == "0xi0chi");
    }
    const CoupledChannelSolver s(p, t, 2.0);
    const SpectrumResult r = s.solve(2.0, 8);
    const AdiabaticSpectrum a = adiabatic_spectrum(p, t, 2.0);
    const std::vector<double> e(r.energies.data(), r.energies.data() + r.size());
    const auto lab = label_exact_states(e, a);
    REQUIRE(lab[4].level.has_value());
    REQUIRE(lab[5].level.has_value());
    CHECK(lab[4].level->label() == "0xi1chi");
    CHECK(lab[5].level->label() == "4xi0chi");
    // Adiabatic and exact energies stay within 0.3 for the matched low states.
    for (int n = 0; n < 8; ++n) CHECK(std::abs(lab[n].delta) < 0.3);
  }

  TEST_CASE("labeling leaves far-off states unmatched") {
    const AdiabaticSpectrum a = adiabatic_spectrum(params_at(0.53), Truncation{}, 0.0);
    const std::vector<double> exact{a.levels[0].energy, a.levels[1].energy + 0.9};
    const auto lab = label_exact_states(exact, a);
    CHECK_FALSE(lab[0].mixed());
    CHECK(lab[1].mixed());
  }
}
