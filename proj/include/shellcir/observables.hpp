#pragma once

// Densities built from coupled-channel states.

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include "shellcir/coupled_channel.hpp"

namespace shellcir {

/// Values on a tensor grid; rows follow `x`, columns follow `y`.
struct DensityGrid {
  std::string x_name;
  std::string y_name;
  std::vector<double> x;
  std::vector<double> y;
  Eigen::MatrixXd values;
  int state = 0;
  double r0 = 0.0;
  double inv_a0 = 0.0;
};

/// Two-particle wave function Psi(r1, r2) of one state (any J, given M).
class StateEvaluator {
 public:
  StateEvaluator(const SpectrumResult& spectrum, int n, const ProductBasis& basis, int J, int M = 0);

  std::complex<double> operator()(const Eigen::Vector3d& r1, const Eigen::Vector3d& r2) const;
  /// Psi(r, R) in relative / CoM coordinates.
  std::complex<double> at(const Eigen::Vector3d& r, const Eigen::Vector3d& R) const;

 private:
  // f_a(x) = u_a(x) / x, with the finite limit at x = 0.
  Eigen::VectorXd radial_over_x(const RadialBasisSet& set, double x) const;

  const ProductBasis* basis_;
  int J_;
  int M_;
  std::vector<Eigen::MatrixXd> coeffs_;  // per channel n_rel x n_com
};

/// 2 pi rho2 |Psi(r1 = (0, 0, r0), r2 = (rho2, 0, z2))|^2.
DensityGrid conditional_density(const SpectrumResult& spectrum, int n, const ProductBasis& basis,
                                const ModelParams& params, std::span<const double> rho2, std::span<const double> z2);

/// sum_ch |u_ch(r, R)|^2 on the quadrature grids.
DensityGrid rR_density(const ChannelFunctions& state);

/// Quadrature integral of an rR_density.
double rR_integral(const DensityGrid& density, const ChannelFunctions& state);

/// Fraction of a conditional density's grid mass within `radius` of (rho, z)
/// (trapezoidal cell weights).
double mass_fraction_near(const DensityGrid& density, double rho, double z, double radius);

/// <r> of a state.
double mean_relative_distance(const ChannelFunctions& state);

/// Fraction of the norm with r > r_cut.
double norm_beyond(const ChannelFunctions& state, double r_cut);

/// Sign changes of Psi with particle 1 at the north pole and particle 2
/// moved along the shell |r2| = r0 from the north to the south pole.
int polar_nodes(const StateEvaluator& psi, double r0, int samples = 721);

/// Sign changes of u_ch along the hyperradius at the hyperangle where |u_ch| peaks.
int hyperradial_nodes(const ChannelFunctions& state, int channel = 0, int samples = 801);

}  // namespace shellcir
