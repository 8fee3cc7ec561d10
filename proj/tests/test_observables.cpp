#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>

#include "common.hpp"
#include "shellcir/hyperspherical.hpp"
#include "shellcir/observables.hpp"

using namespace shellcir;
using shellcir::test::params_at;
using shellcir::test::small_truncation;

namespace {

// a0 = 0.53, r0 = 2.6 (past the bound-trap crossing near 2.2), default truncation.
struct Past {
  ModelParams params = params_at(0.53, 2.6);
  Truncation trunc;
  ProductBasis basis;
  SpectrumResult spectrum;
  std::vector<StateLabel> labels;

  Past() {
    const CoupledChannelSolver solver(params, trunc, params.r0);
    spectrum = solver.solve(params.r0, 16, &basis);
    const std::vector<double> e(spectrum.energies.data(), spectrum.energies.data() + spectrum.size());
    labels = label_exact_states(e, adiabatic_spectrum(params, trunc, params.r0));
  }

  int find(const std::string& label) const {
    for (std::size_t n = 0; n < labels.size(); ++n)
      if (labels[n].level && labels[n].level->label() == label) return static_cast<int>(n);
    return -1;
  }
};

const Past& past() {
  static const Past p;
  return p;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return v;
}

}  // namespace

TEST_SUITE("observables") {
  TEST_CASE("conditional density: zero on the axis, non-negative, finite") {
    const auto p = params_at(0.53, 1.0);
    const CoupledChannelSolver solver(p, small_truncation(), 1.0);
    ProductBasis b;
    const SpectrumResult s = solver.solve(1.0, 3, &b);
    const auto rho = linspace(0.0, 4.0, 21);
    const auto z = linspace(-4.0, 4.0, 41);
    for (int n = 0; n < 3; ++n) {
      const DensityGrid d = conditional_density(s, n, b, p, rho, z);
      CHECK(d.values.rows() == 21);
      CHECK(d.values.cols() == 41);
      CHECK(d.values.row(0).cwiseAbs().maxCoeff() == 0.0);
      CHECK(d.values.allFinite());
      CHECK(d.values.minCoeff() >= 0.0);
      CHECK(d.values.maxCoeff() > 0.0);
    }
  }

  TEST_CASE("rR density integrates to one") {
    const auto& p = past();
    for (int n : {0, 4, 5, 9}) {
      const ChannelFunctions f = wavefunction_on_grid(p.spectrum, n, p.basis);
      CHECK(rR_integral(rR_density(f), f) == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  TEST_CASE("reconstructed wave function is exchange symmetric and rotation invariant") {
    const auto& p = past();
    std::mt19937 rng(11);
    std::normal_distribution<double> g(0.0, 1.5);
    for (int n : {0, 5, 9}) {
      const StateEvaluator psi(p.spectrum, n, p.basis, 0);
      for (int t = 0; t < 20; ++t) {
        const Eigen::Vector3d r1(g(rng), g(rng), g(rng) + 2.0);
        const Eigen::Vector3d r2(g(rng), g(rng), g(rng));
        const auto v = psi(r1, r2);
        const double scale = std::max(1e-6, std::abs(v));
        CHECK(std::abs(psi(r2, r1) - v) < 1e-10 * scale + 1e-14);
        const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.7, Eigen::Vector3d(0.3, -1.0, 0.5).normalized()).toRotationMatrix();
        CHECK(std::abs(psi(rot * r1, rot * r2) - v) < 1e-9 * scale + 1e-14);
      }
    }
  }

  TEST_CASE("molecular state past the bound-trap crossing") {
    const auto& p = past();
    const int n = p.find("4xi0chi");
    REQUIRE(n == 4);
    const ChannelFunctions f = wavefunction_on_grid(p.spectrum, n, p.basis);
    CHECK(mean_relative_distance(f) < 1.5);
    CHECK(norm_beyond(f, 3.0 * 0.53) < 0.01);
    const auto rho = linspace(0.0, 6.6, 67);
    const auto z = linspace(-6.6, 6.6, 133);
    const DensityGrid d = conditional_density(p.spectrum, n, p.basis, p.params, rho, z);
    CHECK(mass_fraction_near(d, 0.0, 2.6, 1.5) > 0.5);
    // The trap partner is spread over the shell.
    const int m = p.find("0xi1chi");
    REQUIRE(m == 5);
    CHECK(mean_relative_distance(wavefunction_on_grid(p.spectrum, m, p.basis)) > 1.5);
  }

  TEST_CASE("hyperradial nodes of molecular states equal n_xi") {
    const auto& p = past();
    for (int nx = 0; nx <= 4; ++nx) {
      const int n = p.find(std::to_string(nx) + "xi0chi");
      REQUIRE(n >= 0);
      CHECK(hyperradial_nodes(wavefunction_on_grid(p.spectrum, n, p.basis)) == nx);
    }
  }

  TEST_CASE("polar nodes of low hyperangular trap states equal n_chi") {
    const auto& p = past();
    for (int nc = 1; nc <= 3; ++nc) {
      const int n = p.find("0xi" + std::to_string(nc) + "chi");
      REQUIRE(n >= 0);
      CHECK(polar_nodes(StateEvaluator(p.spectrum, n, p.basis, 0), 2.6) == nc);
    }
  }

  TEST_CASE("polar nodes of the (0 xi, 4 chi) trap state" * doctest::should_fail()) {
    const auto& p = past();
    const int n = p.find("0xi4chi");
    REQUIRE(n >= 0);
    const int nodes = polar_nodes(StateEvaluator(p.spectrum, n, p.basis, 0), 2.6);
    MESSAGE("0xi4chi polar nodes at r0 = 2.6: " << nodes);
    CHECK(nodes == 4);
  }

  TEST_CASE("mass fraction on a hand-made grid") {
    DensityGrid d;
    d.x = linspace(0.0, 2.0, 21);
    d.y = linspace(-2.0, 2.0, 41);
    d.values = Eigen::MatrixXd::Zero(21, 41);
    d.values(1, 20) = 1.0;  // rho = 0.1, z = 0
    CHECK(mass_fraction_near(d, 0.0, 0.0, 0.5) == doctest::Approx(1.0));
    CHECK(mass_fraction_near(d, 0.0, 1.5, 0.5) == doctest::Approx(0.0));
  }
}
