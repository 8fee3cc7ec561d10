#pragma once

// Full two-particle Hamiltonian of one (J, parity) block in the product basis
//   |ch, a, b> = u_a^{(l)}(r) w_b^{(L)}(R) |(l L) J M>,
// with reference energies on the diagonal and dV coupling channels through
// its Legendre multipoles.

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <vector>

#include "shellcir/core_model.hpp"
#include "shellcir/multipole.hpp"
#include "shellcir/radial_basis.hpp"

namespace shellcir {

/// Largest admissible matrix dimension.
inline constexpr int kMaxDimension = 20000;

/// Bases of every channel at one shell radius.
struct ProductBasis {
  double r0 = 0.0;
  std::vector<Channel> channels;
  std::vector<std::shared_ptr<const RadialBasisSet>> rel;  // per channel
  std::vector<RadialBasisSet> com;                         // per channel
  int n_rel = 0;
  int n_com = 0;

  int dimension() const { return static_cast<int>(channels.size()) * n_rel * n_com; }
  int offset(int ch) const { return ch * n_rel * n_com; }
  int index(int ch, int a, int b) const { return offset(ch) + a * n_com + b; }
};

/// Largest component of a state.
struct DominantComponent {
  int channel = 0;
  int n_rel = 0;
  int n_com = 0;
};

struct SpectrumResult {
  double r0 = 0.0;
  Eigen::VectorXd energies;         // ascending
  Eigen::MatrixXd coeffs;           // dimension x states
  Eigen::MatrixXd channel_weights;  // states x channels
  std::vector<DominantComponent> dominant;

  int size() const { return static_cast<int>(energies.size()); }
};

/// u_ch(r_i, R_j) of one state on the relative x CoM quadrature grid.
struct ChannelFunctions {
  std::vector<Eigen::MatrixXd> u;  // per channel, rows r_i, cols R_j
  RadialGrid rel_grid;
  RadialGrid com_grid;

  /// sum_ch sum_ij w_i W_j u^2.
  double norm() const;
};

/// <ch2|P_k|ch> for all channel pairs and even k <= k_max; [ch2][ch][k/2].
using AngularTable = std::vector<std::vector<std::vector<double>>>;
AngularTable angular_table(const std::vector<Channel>& channels, int J, int k_max);

/// OpenMP-parallel assembly (channel-pair blocks via two GEMMs each).
/// `split_shift` is subtracted from dV to compensate a shifted relative
/// reference potential. Throws ConfigError("reduce truncation") above kMaxDimension.
Eigen::MatrixXd assemble(const ProductBasis& basis, const MultipoleTable& multipoles, const AngularTable& angular,
                         double split_shift = 0.0);

/// Serial element-by-element reference assembly; slow, for testing.
Eigen::MatrixXd assemble_reference(const ProductBasis& basis, const MultipoleTable& multipoles,
                                   const AngularTable& angular, double split_shift = 0.0);

/// Lowest `count` eigenpairs (-1 for all) with channel weights and dominant components.
SpectrumResult diagonalize_block(const Eigen::MatrixXd& h, const ProductBasis& basis, int count);

/// Channel amplitudes of state `n`.
ChannelFunctions wavefunction_on_grid(const SpectrumResult& spectrum, int n, const ProductBasis& basis);

/// Solver for one (a0, J, parity) block across a range of shell radii.
///
/// The relative bases, the CoM grid (sized for `r0_max`) and the dV multipole
/// shape are built once; each r0 only needs new CoM bases and an assembly.
class CoupledChannelSolver {
 public:
  CoupledChannelSolver(const ModelParams& params, const Truncation& trunc, double r0_max,
                       double split_shift = 0.0);

  const std::vector<Channel>& channels() const noexcept { return channels_; }
  const Truncation& truncation() const noexcept { return trunc_; }
  const ModelParams& params() const noexcept { return params_; }
  int dimension() const;
  const RadialGrid& rel_grid() const noexcept { return rel_grid_; }
  const RadialGrid& com_grid() const noexcept { return com_grid_; }
  const AngularTable& angular() const noexcept { return angular_; }

  ProductBasis basis(double r0) const;
  MultipoleTable multipoles(double r0) const;
  Eigen::MatrixXd hamiltonian(const ProductBasis& basis) const;
  /// Lowest `count` states at r0.
  SpectrumResult solve(double r0, int count, ProductBasis* basis_out = nullptr) const;

 private:
  ModelParams params_;
  Truncation trunc_;
  double split_shift_;
  std::vector<Channel> channels_;
  RadialGrid rel_grid_;
  RadialGrid com_grid_;
  std::map<int, std::shared_ptr<const RadialBasisSet>> rel_by_l_;
  MultipoleTable shape_;  // dV at r0 = 1
  AngularTable angular_;
};

}  // namespace shellcir
