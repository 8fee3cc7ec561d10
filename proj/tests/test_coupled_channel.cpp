#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "shellcir/busch.hpp"
#include "shellcir/coupled_channel.hpp"

using namespace shellcir;
using shellcir::test::params_at;
using shellcir::test::small_truncation;

TEST_SUITE("coupled_channel") {
  TEST_CASE("parallel assembly equals the serial reference") {
    for (int J : {0, 1}) {
      ModelParams p = params_at(0.53, 1.0);
      p.J = J;
      p.parity = J == 0 ? 1 : -1;
      const Truncation t = small_truncation();
      const CoupledChannelSolver s(p, t, 2.0);
      for (double r0 : {0.0, 1.0, 2.0}) {
        const ProductBasis b = s.basis(r0);
        const MultipoleTable mp = s.multipoles(r0);
        const Eigen::MatrixXd fast = assemble(b, mp, s.angular());
        const Eigen::MatrixXd ref = assemble_reference(b, mp, s.angular());
        CHECK((fast - ref).cwiseAbs().maxCoeff() < 1e-12);
      }
    }
  }

  TEST_CASE("Hamiltonian is symmetric and dV lowers every diagonal element") {
    const CoupledChannelSolver s(params_at(0.53, 1.0), small_truncation(), 1.0);
    const ProductBasis b = s.basis(1.0);
    const Eigen::MatrixXd h = s.hamiltonian(b);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t ch = 0; ch < b.channels.size(); ++ch)
      for (int a = 0; a < b.n_rel; ++a)
        for (int c = 0; c < b.n_com; ++c) {
          const int i = b.index(static_cast<int>(ch), a, c);
          CHECK(h(i, i) - (b.rel[ch]->ref_energies[a] + b.com[ch].ref_energies[c]) <= 1e-14);
        }
  }

  TEST_CASE("r0 = 0 decouples the channels") {
    const CoupledChannelSolver s(params_at(0.53), small_truncation(), 0.0);
    const ProductBasis b = s.basis(0.0);
    const Eigen::MatrixXd h = s.hamiltonian(b);
    const int block = b.n_rel * b.n_com;
    for (std::size_t c1 = 0; c1 < b.channels.size(); ++c1)
      for (std::size_t c2 = 0; c2 < b.channels.size(); ++c2) {
        if (c1 == c2) continue;
        CHECK(h.block(b.offset(static_cast<int>(c1)), b.offset(static_cast<int>(c2)), block, block).cwiseAbs().maxCoeff() < 1e-12);
      }
  }

  TEST_CASE("r0 = 0 reproduces the separable spectrum") {
    const Truncation t = small_truncation();
    const CoupledChannelSolver s(params_at(0.53), t, 0.0);
    const SpectrumResult r = s.solve(0.0, 10);
    const auto ref = spectrum_r0_zero(1.0 / 0.53, 6, 6);
    // Match (0,0)-dominated states in order.
    std::size_t k = 0;
    for (int n = 0; n < r.size(); ++n) {
      if (r.channel_weights(n, 0) < 0.5) continue;
      CHECK(std::abs(r.energies(n) - ref[k].energy) < 1e-5);
      ++k;
    }
    CHECK(k >= 6);

    const CoupledChannelSolver u(ModelParams{ScatteringLength::unitarity()}, t, 0.0);
    CHECK(std::abs(u.solve(0.0, 1).energies(0) - 2.0) < 1e-6);
  }

  TEST_CASE("shifting the reference split leaves the spectrum unchanged") {
    const Truncation t = small_truncation();
    const CoupledChannelSolver a(params_at(0.53), t, 1.5);
    const CoupledChannelSolver b(params_at(0.53), t, 1.5, 0.37);
    for (double r0 : {0.0, 1.5}) {
      const Eigen::VectorXd ea = a.solve(r0, 8).energies;
      const Eigen::VectorXd eb = b.solve(r0, 8).energies;
      CHECK((ea - eb).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  TEST_CASE("eigenvalues decrease monotonically as the basis grows") {
    Truncation t = small_truncation();
    Eigen::VectorXd prev;
    for (int n : {4, 6, 8, 10}) {
      t.n_rel_max = n;
      t.n_com_max = n;
      const CoupledChannelSolver s(params_at(0.53), t, 1.5);
      const Eigen::VectorXd e = s.solve(1.5, 8).energies;
      if (prev.size()) CHECK((e - prev).maxCoeff() <= 1e-12);
      prev = e;
    }
    t.n_rel_max = t.n_com_max = 8;
    prev.resize(0);
    for (int lmax : {0, 2, 4}) {
      t.l_max = lmax;
      const CoupledChannelSolver s(params_at(0.53), t, 1.5);
      const Eigen::VectorXd e = s.solve(1.5, 8).energies;
      if (prev.size()) CHECK((e - prev).maxCoeff() <= 1e-12);
      prev = e;
    }
  }

  TEST_CASE("J blocks are independent") {
    const Truncation t = small_truncation();
    const CoupledChannelSolver j0(params_at(0.53, 1.0), t, 1.0);
    const Eigen::VectorXd before = j0.solve(1.0, 6).energies;
    ModelParams p1 = params_at(0.53, 1.0);
    p1.J = 1;
    p1.parity = -1;
    const CoupledChannelSolver j1(p1, t, 1.0);
    (void)j1.solve(1.0, 6);
    const Eigen::VectorXd after = j0.solve(1.0, 6).energies;
    CHECK((before - after).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("energies are continuous in r0") {
    const CoupledChannelSolver s(params_at(0.53), small_truncation(), 3.0);
    const double d = 1e-3;
    for (double r0 = 0.0; r0 < 3.0; r0 += 0.25) {
      const Eigen::VectorXd a = s.solve(r0, 8).energies;
      const Eigen::VectorXd b = s.solve(r0 + d, 8).energies;
      CHECK((a - b).cwiseAbs().maxCoeff() <= 10.0 * d);
    }
  }

  TEST_CASE("states are normalized on the grid and basis products come out exactly") {
    const CoupledChannelSolver s(params_at(0.53), small_truncation(), 1.0);
    ProductBasis b;
    const SpectrumResult r = s.solve(1.0, 4, &b);
    for (int n = 0; n < 4; ++n) CHECK(wavefunction_on_grid(r, n, b).norm() == doctest::Approx(1.0).epsilon(1e-8));

    SpectrumResult unit;
    unit.energies = Eigen::VectorXd::Zero(1);
    unit.coeffs = Eigen::MatrixXd::Zero(b.dimension(), 1);
    unit.coeffs(b.index(0, 2, 3), 0) = 1.0;
    const ChannelFunctions f = wavefunction_on_grid(unit, 0, b);
    const Eigen::MatrixXd expect = b.rel[0]->functions.col(2) * b.com[0].functions.col(3).transpose();
    CHECK((f.u[0] - expect).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("oversized truncation is refused") {
    Truncation t;
    t.l_max = 12;
    t.n_rel_max = 60;
    t.n_com_max = 60;
    t.rel_grid.elements = 30;
    t.com_grid.elements = 30;
    CHECK_THROWS_WITH_AS(CoupledChannelSolver(params_at(0.53), t, 1.0), doctest::Contains("reduce truncation"), ConfigError);
  }

  TEST_CASE("doubling k_max from 8 to 16 changes the lowest 10 levels by < 1e-7" * doctest::should_fail()) {
    // With l_max = 6 the couplings extend to k = 12, so k = 10 and 12 still
    // contribute; the observed change is about 6e-7.
    Truncation t;
    t.k_max = 8;
    const Eigen::VectorXd e8 = CoupledChannelSolver(params_at(0.53), t, 1.0).solve(1.0, 10).energies;
    t.k_max = 16;
    const Eigen::VectorXd e16 = CoupledChannelSolver(params_at(0.53), t, 1.0).solve(1.0, 10).energies;
    const double change = (e8 - e16).cwiseAbs().maxCoeff();
    MESSAGE("k_max 8 -> 16 change: " << change);
    CHECK(change < 1e-7);
  }

  TEST_CASE("k_max beyond 2 l_max changes nothing") {
    Truncation t = small_truncation();
    t.k_max = 4;
    const Eigen::VectorXd a = CoupledChannelSolver(params_at(0.53), t, 1.0).solve(1.0, 8).energies;
    t.k_max = 10;
    const Eigen::VectorXd b = CoupledChannelSolver(params_at(0.53), t, 1.0).solve(1.0, 8).energies;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}
