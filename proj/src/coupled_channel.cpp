#include "shellcir/coupled_channel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "shellcir/angular.hpp"

namespace shellcir {

double ChannelFunctions::norm() const {
  const auto& w = rel_grid.weights();
  const auto& W = com_grid.weights();
  const Eigen::Map<const Eigen::VectorXd> wr(w.data(), static_cast<Eigen::Index>(w.size()));
  const Eigen::Map<const Eigen::VectorXd> wR(W.data(), static_cast<Eigen::Index>(W.size()));
  double acc = 0.0;
  for (const auto& m : u) acc += wr.transpose() * m.cwiseAbs2() * wR;
  return acc;
}

AngularTable angular_table(const std::vector<Channel>& channels, int J, int k_max) {
  const std::size_t n = channels.size();
  AngularTable t(n, std::vector<std::vector<double>>(n));
  for (std::size_t c2 = 0; c2 < n; ++c2) {
    for (std::size_t c1 = 0; c1 < n; ++c1) {
      for (int k = 0; k <= k_max; k += 2) {
        t[c2][c1].push_back(
            angular_coupling(channels[c1].l, channels[c1].L, channels[c2].l, channels[c2].L, J, k));
      }
    }
  }
  return t;
}

namespace {

void check_dimension(const ProductBasis& basis) {
  const long long dim = static_cast<long long>(basis.channels.size()) * basis.n_rel * basis.n_com;
  if (dim > kMaxDimension) {
    throw ConfigError("reduce truncation: basis dimension " + std::to_string(dim) + " exceeds " +
                      std::to_string(kMaxDimension));
  }
}

void add_reference_energies(const ProductBasis& basis, Eigen::MatrixXd& h) {
  for (std::size_t ch = 0; ch < basis.channels.size(); ++ch) {
    for (int a = 0; a < basis.n_rel; ++a) {
      for (int b = 0; b < basis.n_com; ++b) {
        const int i = basis.index(static_cast<int>(ch), a, b);
        h(i, i) += basis.rel[ch]->ref_energies[a] + basis.com[ch].ref_energies[b];
      }
    }
  }
}

// sum_k A_k v_k for one channel pair, or an empty matrix if every A_k vanishes.
Eigen::MatrixXd pair_potential(const MultipoleTable& mp, const std::vector<double>& coupling, bool same_channel,
                               double split_shift) {
  Eigen::MatrixXd v;
  for (std::size_t q = 0; q < coupling.size(); ++q) {
    const double a = coupling[q];
    if (a == 0.0) continue;
    const int k = static_cast<int>(2 * q);
    if (k > mp.k_max()) break;
    if (v.size() == 0) v = Eigen::MatrixXd::Zero(mp.rows(), mp.cols());
    v += a * mp.even(k);
  }
  if (same_channel && split_shift != 0.0) {
    if (v.size() == 0) v = Eigen::MatrixXd::Zero(mp.rows(), mp.cols());
    v.array() -= split_shift;
  }
  return v;
}

void check_table(const ProductBasis& basis, const MultipoleTable& mp) {
  if (basis.channels.empty()) return;
  if (mp.rows() != basis.rel.front()->grid.size() || mp.cols() != basis.com.front().grid.size()) {
    throw std::invalid_argument("multipole table does not match the basis grids");
  }
}

}  // namespace

Eigen::MatrixXd assemble(const ProductBasis& basis, const MultipoleTable& multipoles, const AngularTable& angular,
                         double split_shift) {
  check_dimension(basis);
  check_table(basis, multipoles);
  const int dim = basis.dimension();
  const int nch = static_cast<int>(basis.channels.size());
  const int nr = basis.n_rel;
  const int nc = basis.n_com;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  if (nch == 0) return h;

  const auto& wr_vec = basis.rel.front()->grid.weights();
  const auto& wc_vec = basis.com.front().grid.weights();
  const Eigen::Map<const Eigen::ArrayXd> wr(wr_vec.data(), static_cast<Eigen::Index>(wr_vec.size()));
  const Eigen::Map<const Eigen::ArrayXd> wc(wc_vec.data(), static_cast<Eigen::Index>(wc_vec.size()));

  std::vector<std::pair<int, int>> pairs;
  for (int c1 = 0; c1 < nch; ++c1) {
    for (int c2 = c1; c2 < nch; ++c2) pairs.emplace_back(c1, c2);
  }

#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [c1, c2] = pairs[p];
    const Eigen::MatrixXd v = pair_potential(multipoles, angular[c1][c2], c1 == c2, split_shift);
    if (v.size() == 0) continue;
    const Eigen::MatrixXd& u1 = basis.rel[c1]->functions;
    const Eigen::MatrixXd& u2 = basis.rel[c2]->functions;
    const Eigen::MatrixXd& w1 = basis.com[c1].functions;
    const Eigen::MatrixXd& w2 = basis.com[c2].functions;
    // P((a,c), i) = w_i u1_a(r_i) u2_c(r_i);  Q((b,d), j) = W_j w1_b(R_j) w2_d(R_j)
    Eigen::MatrixXd pm(nr * nr, u1.rows());
    for (int a = 0; a < nr; ++a) {
      pm.middleRows(a * nr, nr) = (u2.array().colwise() * (wr * u1.col(a).array())).matrix().transpose();
    }
    Eigen::MatrixXd qm(nc * nc, w1.rows());
    for (int b = 0; b < nc; ++b) {
      qm.middleRows(b * nc, nc) = (w2.array().colwise() * (wc * w1.col(b).array())).matrix().transpose();
    }
    const Eigen::MatrixXd m = (pm * v) * qm.transpose();
    const int o1 = basis.offset(c1);
    const int o2 = basis.offset(c2);
    for (int a = 0; a < nr; ++a) {
      for (int b = 0; b < nc; ++b) {
        for (int c = 0; c < nr; ++c) {
          for (int d = 0; d < nc; ++d) h(o1 + a * nc + b, o2 + c * nc + d) = m(a * nr + c, b * nc + d);
        }
      }
    }
  }
  // Blocks were written for c1 <= c2; the upper triangle is authoritative.
  h.triangularView<Eigen::StrictlyLower>() = h.transpose().triangularView<Eigen::StrictlyLower>();
  add_reference_energies(basis, h);
  return h;
}

Eigen::MatrixXd assemble_reference(const ProductBasis& basis, const MultipoleTable& multipoles,
                                   const AngularTable& angular, double split_shift) {
  check_dimension(basis);
  check_table(basis, multipoles);
  const int dim = basis.dimension();
  const int nch = static_cast<int>(basis.channels.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  if (nch == 0) return h;
  const auto& wr = basis.rel.front()->grid.weights();
  const auto& wc = basis.com.front().grid.weights();
  const Eigen::Index npr = multipoles.rows();
  const Eigen::Index npc = multipoles.cols();
  for (int c1 = 0; c1 < nch; ++c1) {
    for (int c2 = 0; c2 < nch; ++c2) {
      const auto& coupling = angular[c1][c2];
      for (int a = 0; a < basis.n_rel; ++a) {
        for (int b = 0; b < basis.n_com; ++b) {
          for (int c = 0; c < basis.n_rel; ++c) {
            for (int d = 0; d < basis.n_com; ++d) {
              double acc = 0.0;
              for (Eigen::Index i = 0; i < npr; ++i) {
                const double ui = wr[i] * basis.rel[c1]->functions(i, a) * basis.rel[c2]->functions(i, c);
                if (ui == 0.0) continue;
                for (Eigen::Index j = 0; j < npc; ++j) {
                  double v = 0.0;
                  for (int k = 0; k <= multipoles.k_max(); k += 2) v += coupling[k / 2] * multipoles.even(k)(i, j);
                  if (c1 == c2) v -= split_shift;
                  acc += ui * v * wc[j] * basis.com[c1].functions(j, b) * basis.com[c2].functions(j, d);
                }
              }
              h(basis.index(c1, a, b), basis.index(c2, c, d)) = acc;
            }
          }
        }
      }
    }
  }
  h = 0.5 * (h + h.transpose()).eval();
  add_reference_energies(basis, h);
  return h;
}

SpectrumResult diagonalize_block(const Eigen::MatrixXd& h, const ProductBasis& basis, int count) {
  if (h.rows() != basis.dimension()) throw std::invalid_argument("matrix does not match the product basis");
  EigenPairs eig = lowest_eigenpairs(h, count);
  SpectrumResult out;
  out.r0 = basis.r0;
  out.energies = std::move(eig.values);
  out.coeffs = std::move(eig.vectors);
  const int nch = static_cast<int>(basis.channels.size());
  const int block = basis.n_rel * basis.n_com;
  out.channel_weights.resize(out.size(), nch);
  out.dominant.resize(static_cast<std::size_t>(out.size()));
  for (int s = 0; s < out.size(); ++s) {
    for (int ch = 0; ch < nch; ++ch) {
      out.channel_weights(s, ch) = out.coeffs.col(s).segment(basis.offset(ch), block).squaredNorm();
    }
    Eigen::Index imax = 0;
    out.coeffs.col(s).cwiseAbs().maxCoeff(&imax);
    const int idx = static_cast<int>(imax);
    out.dominant[s] = DominantComponent{idx / block, (idx % block) / basis.n_com, idx % basis.n_com};
  }
  return out;
}

ChannelFunctions wavefunction_on_grid(const SpectrumResult& spectrum, int n, const ProductBasis& basis) {
  if (n < 0 || n >= spectrum.size()) throw std::out_of_range("state index outside spectrum");
  ChannelFunctions f;
  if (basis.channels.empty()) return f;
  f.rel_grid = basis.rel.front()->grid;
  f.com_grid = basis.com.front().grid;
  for (std::size_t ch = 0; ch < basis.channels.size(); ++ch) {
    Eigen::MatrixXd c(basis.n_rel, basis.n_com);
    for (int a = 0; a < basis.n_rel; ++a) {
      for (int b = 0; b < basis.n_com; ++b) c(a, b) = spectrum.coeffs(basis.index(static_cast<int>(ch), a, b), n);
    }
    f.u.push_back(basis.rel[ch]->functions * c * basis.com[ch].functions.transpose());
  }
  return f;
}

CoupledChannelSolver::CoupledChannelSolver(const ModelParams& params, const Truncation& trunc, double r0_max,
                                           double split_shift)
    : params_(params), trunc_(trunc), split_shift_(split_shift) {
  channels_ = enumerate_channels(params_, trunc_);
  const long long dim = static_cast<long long>(channels_.size()) * trunc_.n_rel_max * trunc_.n_com_max;
  if (dim > kMaxDimension) {
    throw ConfigError("reduce truncation: basis dimension " + std::to_string(dim) + " exceeds " +
                      std::to_string(kMaxDimension));
  }
  rel_grid_ = make_grid(trunc_.rel_grid);
  com_grid_ = make_grid(trunc_.com_grid, com_extent(trunc_, r0_max));
  std::set<int> ls;
  for (const auto& ch : channels_) ls.insert(ch.l);
  for (int l : ls) {
    rel_by_l_[l] = std::make_shared<const RadialBasisSet>(
        build_relative_basis(params_.scattering, l, rel_grid_, trunc_.n_rel_max, split_shift_));
  }
  shape_ = multipole_decompose(1.0, rel_grid_.points(), com_grid_.points(), trunc_.k_max);
  angular_ = angular_table(channels_, params_.J, trunc_.k_max);
}

int CoupledChannelSolver::dimension() const {
  return static_cast<int>(channels_.size()) * trunc_.n_rel_max * trunc_.n_com_max;
}

ProductBasis CoupledChannelSolver::basis(double r0) const {
  if (r0 < 0.0) throw ConfigError("r0 must be >= 0");
  ProductBasis b;
  b.r0 = r0;
  b.channels = channels_;
  b.n_rel = trunc_.n_rel_max;
  b.n_com = trunc_.n_com_max;
  std::map<int, RadialBasisSet> com_by_L;
  for (const auto& ch : channels_) {
    if (!com_by_L.contains(ch.L)) com_by_L.emplace(ch.L, build_com_basis(r0, ch.L, com_grid_, trunc_.n_com_max));
  }
  for (const auto& ch : channels_) {
    b.rel.push_back(rel_by_l_.at(ch.l));
    b.com.push_back(com_by_L.at(ch.L));
  }
  return b;
}

MultipoleTable CoupledChannelSolver::multipoles(double r0) const { return shape_.rescaled(r0); }

Eigen::MatrixXd CoupledChannelSolver::hamiltonian(const ProductBasis& basis) const {
  return assemble(basis, multipoles(basis.r0), angular_, split_shift_);
}

SpectrumResult CoupledChannelSolver::solve(double r0, int count, ProductBasis* basis_out) const {
  ProductBasis b = basis(r0);
  SpectrumResult s = diagonalize_block(hamiltonian(b), b, count);
  if (basis_out) *basis_out = std::move(b);
  return s;
}

}  // namespace shellcir
