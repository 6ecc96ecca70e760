#pragma once

// Brownian-bridge Feynman-Kac estimators for free, externally driven and
// HS-averaged thermal kernels. Winding numbers and periodic images are
// stratified with exact weights; only the bridge expectation is sampled.

#include "bosekms/model.hpp"
#include "bosekms/propagator.hpp"

#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

namespace bosekms {

/// Counter-based generator: every (seed, stream, index) triple gives an
/// independent SplitMix64 sequence, so results never depend on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

 private:
  std::uint64_t state_;
};

struct BridgePath {
  std::vector<double> times;
  std::vector<Coord> positions;  // covering-space coordinates
};

/// Bridge from x at time 0 to y at time t with per-axis variance s(t-s)/(t m).
BridgePath sample_bridge(const Coord& x, const Coord& y, double t, int n_steps, std::uint64_t seed, int dim,
                         double mass = 1.0, std::uint64_t stream = 0);

struct StratumRow {
  int winding = 0;
  std::vector<int> image;  // per-axis box shifts
  double weight = 0.0;     // e^{t mu} * heat kernel, exact
  double mean = 0.0;       // bridge expectation
  double std_error = 0.0;
  long n_samples = 0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<StratumRow> strata;
  double tail_bound = 0.0;  // dropped windings n > n_max
  double max_sample_weight = 0.0;
  long weight_violations = 0;  // HS samples with weight > 1
};

struct PathOptions {
  int steps_per_beta = 64;
  int workers = 1;
};

/// Omega(x, y) under the external field A: sum over windings 0..n_max of
/// e^{beta n mu} E_bridge[exp(-int_0^{n beta} A(s mod beta, omega(s)) ds)].
McEstimate mc_two_point_external(std::size_t x, std::size_t y, const LatticeField& A, const PropagatorKernel& free,
                                 int n_max, long samples, std::uint64_t seed, const PathOptions& options = {});

/// Same strata with the HS weight exp(-1/2 coupling sum_{i,j} int g v g) along the windings.
McEstimate mc_two_point_hs(std::size_t x, std::size_t y, const Potential& v, const Cutoff& cutoff, double coupling,
                           const PropagatorKernel& free, int n_max, long samples, std::uint64_t seed,
                           const PathOptions& options = {});

/// Kernel value Delta^{beta A}(x, u_j; y, u_i) from paths of length u_j - u_i + n beta,
/// n >= 0 when j > i (direct branch) and n >= 1 otherwise.
McEstimate mc_interacting_propagator(std::size_t x, int j, std::size_t y, int i, const LatticeField& A,
                                     const PropagatorKernel& free, int n_max, long samples, std::uint64_t seed,
                                     const PathOptions& options = {});

/// Trigonometric interpolation in space, linear in time, periodic in both.
class FieldInterpolator {
 public:
  FieldInterpolator(const GridSpec& grid, const LatticeField& A);
  double operator()(const Coord& x, double u) const;

 private:
  double spatial(int slice, const std::vector<std::complex<double>>& phase) const;
  std::vector<std::complex<double>> phases(const Coord& x) const;
  GridSpec grid_;
  std::vector<std::vector<double>> re_, im_;  // per slice, per momentum
  std::vector<MultiIndex> labels_;            // momentum labels shifted to 0..n-1
  bool constant_ = false;
  double constant_value_ = 0.0;
};

}  // namespace bosekms
