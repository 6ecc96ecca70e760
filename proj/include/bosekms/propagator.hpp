#pragma once

// Free thermal propagator on the periodic lattice, in momentum and position space.

#include "bosekms/model.hpp"

#include <Eigen/Dense>

namespace bosekms {

struct BoseFactors {
  double minus;  // 1/(1 - e^{-beta K}), the u -> 0+ limit
  double plus;   // 1/(e^{beta K} - 1), the u -> beta- limit
};
BoseFactors bose_factors(double k_val, double beta);

/// Multiplier e^{-uK(p)}/(1 - e^{-beta K(p)}) with K(p) = p^2/2m - mu_eff,
/// tabulated on the momentum grid at u = j*dt, j = 0..M-1 (j = 0 is 0+).
class PropagatorKernel {
 public:
  PropagatorKernel(const ModelParams& params, const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  double beta() const { return grid_.beta(); }
  double mu_eff() const { return mu_eff_; }
  double mass() const { return mass_; }

  const Eigen::VectorXd& dispersion() const { return K_; }
  /// (momentum index, slice) table.
  const Eigen::MatrixXd& multiplier() const { return table_; }
  /// Multiplier at arbitrary u, reduced mod beta; u = 0 means 0+.
  double value(std::size_t q, double u) const;
  double value_minus_side(std::size_t q) const { return bose_factors(K_(q), beta()).plus; }

  /// Spatial kernel P_u(x, y) = L^{-d} sum_p e^{ip(x-y)} multiplier(u, p) as a function of
  /// the site displacement, one entry per site (displacement site - origin).
  Eigen::VectorXd spatial_row(double u, bool before_jump = false) const;
  /// Dense operator matrix a^d P_u(x_i - x_j); `before_jump` selects u = beta- at u = 0.
  Eigen::MatrixXd spatial_operator(double u, bool before_jump = false) const;
  /// e^{-t K} as an operator on lattice functions (t >= 0).
  Eigen::MatrixXd evolution(double t) const;
  /// Any function of K applied as an operator: F(K) with F given per momentum.
  Eigen::MatrixXd momentum_operator(const Eigen::VectorXd& f_of_p) const;

 private:
  GridSpec grid_;
  double mu_eff_, mass_;
  Eigen::VectorXd K_;
  Eigen::MatrixXd table_;
  Eigen::MatrixXd phase_;  // cos(p_q . x_s), q rows, s columns
};

PropagatorKernel build_kernel(const ModelParams& params, const GridSpec& grid);

/// Winding-number number of terms so that e^{beta mu n_max} < 1e-12.
int default_winding_cutoff(double beta, double mu);

/// Heat-kernel image sum of the thermal propagator between sites x and y at separation u
/// (u = 0 is the 0+ side, where the n = 0 term is the lattice delta).
double position_kernel(const PropagatorKernel& kernel, std::size_t x, std::size_t y, double u, int n_max);

/// Same quantity by direct inverse transform of the multiplier.
double position_kernel_spectral(const PropagatorKernel& kernel, std::size_t x, std::size_t y, double u);

/// Periodized normalized heat kernel prod_k sum_w (2 pi t/m)^{-1/2} exp(-m (r_k + wL)^2 / 2t).
double heat_kernel(const Coord& r, double t, double mass, int dim, double box_length);

/// c_beta = (2 pi m / beta)^{d/2} Li_{d/2}(e^{beta mu}); with `with_measure` the
/// momentum measure d^dp/(2 pi)^d is used instead of d^dp.
double wick_constant(const ModelParams& params, int dim, bool with_measure = false);

/// sum_{n>=1} e^{beta mu_rr n} (2 pi beta n)^{-d/2} = (2 pi beta)^{-d/2} Li_{d/2}(e^{beta mu_rr}).
double weight_sum(const ModelParams& params, int dim);

}  // namespace bosekms
