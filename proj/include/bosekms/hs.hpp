#pragma once

// Hubbard-Stratonovich layer: the covariance form vtilde, the Gaussian average
// e^Gamma in its exact (pairing) and sampled forms, and the estimators for Z
// and the interacting two-point function built on W_A.
//
// Sign convention: for A ~ N(0, coupling v(x-x') delta(u-u')),
//   E[e^{-<A>_b}] = e^{+vtilde(b,b)/2}, while gamma_exponentials gives e^{-vtilde/2}.
// Sampled averages of det(1 + D gA)^{-1} therefore realise the quartic theory with
// coupling -> -coupling; order-n coupling coefficients differ by (-1)^n.

#include "bosekms/dyson.hpp"
#include "bosekms/entropy.hpp"
#include "bosekms/pathint.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace bosekms {

/// sum_u du sum_{x,x'} b1(x,u) v(x-x') b2(x',u) a^{2d}.
double vtilde(const GridSpec& grid, const Potential& v, const LatticeField& b1, const LatticeField& b2);

/// e^{-1/2 sum_{i,j} vtilde(b_i, b_j)}.
double gamma_exponentials(const GridSpec& grid, const Potential& v, const std::vector<LatticeField>& bs);

/// Sum over perfect pairings of prod vtilde(b_a, b_b); zero for odd degree.
double gamma_polynomial(const GridSpec& grid, const Potential& v, const std::vector<LatticeField>& factors);

/// Realises coupling * v(x-x') delta_{uu'} / du on the grid.
class GaussianCovariance {
 public:
  GaussianCovariance(const GridSpec& grid, const Potential& v, double coupling);
  const GridSpec& grid() const { return grid_; }
  double coupling() const { return coupling_; }
  /// Dense covariance over slice-major sites (desk-scale checks only).
  Eigen::MatrixXd matrix() const;
  /// One draw of A; `spatial_factor * z / sqrt(du)` per slice.
  LatticeField sample(CounterRng& rng) const;

 private:
  GridSpec grid_;
  double coupling_;
  Eigen::MatrixXd factor_;  // F F^T = coupling * v(x_i - x_j)
};

struct PartitionOptions {
  int workers = 1;
  double max_rejection = 0.10;
};

struct PartitionEstimate {
  McEstimate z;
  long rejected = 0;
  double rejection_fraction = 0.0;
  // Coupling expansion of the sampled average, E[e^{W(sqrt(c) A_1)}] = 1 + c1 c + c2 c^2 + ...
  double c1_sampled = 0, c1_error = 0, c2_sampled = 0, c2_error = 0;
  // The same in the physical (repulsive) convention: c_n (-1)^n.
  double c1_physical = 0, c2_physical = 0;
};

/// Z = E_A[e^{W_A}] over A ~ N(0, coupling v delta), with the beta ||gA|| < 1 guard per sample.
PartitionEstimate partition_mc(const PropagatorKernel& free, const Potential& v, const Cutoff& cutoff,
                               double coupling, double phi0, long samples, std::uint64_t seed,
                               const PartitionOptions& options = {});

struct QuarticCoefficients {
  double c0 = 1.0, c1 = 0.0, c2 = 0.0;  // physical convention
};

/// Coupling expansion of omega(U(i beta)) for the lattice quartic interaction
/// V_u = 1/2 sum_{x,y} a^{2d} coupling g g v n n, by permanents of free-kernel values.
QuarticCoefficients quartic_series(const PropagatorKernel& free, const Potential& v, const Cutoff& cutoff,
                                   double coupling, int order);

/// <f, S h> = E[(<f, Omega h> + one_point(f) one_point*(h)) e^{W}] / E[e^{W}], jackknife errors.
McEstimate interacting_two_point_mc(const Eigen::VectorXd& f, const Eigen::VectorXd& h, const PropagatorKernel& free,
                                    const Potential& v, const Cutoff& cutoff, double coupling, double phi0,
                                    long samples, std::uint64_t seed, const PartitionOptions& options = {});

}  // namespace bosekms
