#pragma once

// Interacting thermal propagator under an external field A(x,u): truncated
// Dyson series and the time-sliced ordered exponential.
//
// Slice-space vectors are slice-major (GridSpec::slice_index). Operators carry
// the quadrature weight a^d du on the column index, so traces of operator
// matrices are operator traces and products are compositions.

#include "bosekms/model.hpp"
#include "bosekms/propagator.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace bosekms {

/// How a slice of A enters the series.
///  slice_exact: vertex (1 - e^{-du A})/du dressed by e^{-du A/2} on both ends; the
///    series then sums to the Strang-sliced ordered exponential and constant A gives
///    the shifted-chemical-potential closed form exactly.
///  trapezoid: vertex A itself; Gaussian averages over A of log det(1 + D A)
///    reproduce the lattice quartic theory exactly.
enum class VertexRule { slice_exact, trapezoid };

enum class Provenance { dyson, sliced, resolvent };

struct InteractingKernel {
  explicit InteractingKernel(const GridSpec& g, Eigen::MatrixXd m = {}) : grid(g), op(std::move(m)) {}

  GridSpec grid;
  Eigen::MatrixXd op;  // (slice-major) x (slice-major)
  Provenance provenance = Provenance::resolvent;
  VertexRule rule = VertexRule::slice_exact;
  int order = -1;  // Dyson truncation, -1 when summed exactly
  LatticeField field;

  // diagnostics
  double beta_sup_a = 0.0;
  bool hypothesis_warning = false;  // beta ||A||_inf >= 1
  std::vector<double> term_norms;   // ||n-th Dyson term||_inf
  double ratio_bound = 0.0;         // ||D vertex||_inf, bounds every term ratio
  double tail_bound = 0.0;          // geometric estimate of the dropped tail

  /// Block (slice j, slice i) as an operator (weights a^d du included).
  Eigen::MatrixXd block(int j, int i) const;
  /// Kernel value Delta^{beta A}(x, u_j; y, u_i).
  double value(std::size_t x, int j, std::size_t y, int i) const;
};

/// Free discrete kernel D with coincident slices on the beta- side (theta(0) = 0).
Eigen::MatrixXd free_slice_operator(const PropagatorKernel& free);

InteractingKernel dyson_kernel(const PropagatorKernel& free, const LatticeField& A, int order,
                               VertexRule rule = VertexRule::slice_exact);
/// Strang-sliced two-branch formula with the (1 - T_full)^{-1} factor.
InteractingKernel sliced_kernel(const PropagatorKernel& free, const LatticeField& A);
/// Dyson series summed exactly: (1 + D vertex)^{-1} D.
InteractingKernel resolvent_kernel(const PropagatorKernel& free, const LatticeField& A,
                                   VertexRule rule = VertexRule::trapezoid);

/// Omega: the 0+ equal-time operator (u_bar = 0, u -> 0+).
Eigen::MatrixXd truncated_two_point(const InteractingKernel& kernel);

struct OnePoint {
  double value = 0.0;     // -sum_u du <f, G(0,u) gA(u) phi0>
  double by_parts = 0.0;  // -<f, chi phi0> + sum_u du <f, G(0,u) K_du chi phi0>
  double discrepancy = 0.0;
};
/// omega^{beta A}(Psi(f)) for a trapezoid-rule kernel built on the dressed field gA.
/// K_du = (e^{du K} - 1)/du is the lattice generator that inverts D exactly.
OnePoint one_point(const Eigen::VectorXd& f, const InteractingKernel& kernel, const PropagatorKernel& free,
                   const Cutoff& cutoff, double phi0, double tolerance = 1e-9);

/// (e^{du K} - 1)/du as a spatial operator.
Eigen::MatrixXd lattice_generator(const PropagatorKernel& free);

/// Slice-space inner product sum_{x,u} f h a^d du.
double slice_inner(const GridSpec& grid, const Eigen::VectorXd& f, const Eigen::VectorXd& h);

std::string to_string(Provenance p);

}  // namespace bosekms
