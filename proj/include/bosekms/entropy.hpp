#pragma once

// Relative-entropy pieces T0, T1, T2 of the auxiliary state on the lattice,
// each with its alternative forms evaluated side by side.
//
// All functions take the dressed field gA (LatticeField::dressed) and use the
// trapezoid vertex rule, so that W_A = -log det(1 + D gA) + T1 exactly.

#include "bosekms/dyson.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace bosekms {

/// Gauss-Legendre nodes and weights on [0, 1] (Golub-Welsch).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre_unit(int n);

/// M = D diag(gA): the slice-space operator whose powers build every trace below.
Eigen::MatrixXd vertex_operator(const PropagatorKernel& free, const LatticeField& gA);

/// -sum_{x,u} rho(x) gA(x,u) a^d du with rho the equal-time density (B+ diagonal).
double t0_free_expectation(const PropagatorKernel& free, const LatticeField& gA);

struct SeriesValue {
  double value = 0.0;
  double tail_bound = 0.0;  // bound on the dropped orders
  int terms = 0;
};

/// sum_{n=2}^{n_trunc} (-1)^n/n Tr((D gA)^n chi).
SeriesValue s0_series(const PropagatorKernel& free, const LatticeField& gA, const Eigen::VectorXd& chi,
                      int n_trunc = 40);
/// Tr(gA int_0^1 dlambda (D - G_lambda) chi) with G_lambda = (1 + lambda D gA)^{-1} D.
double s0_lambda(const PropagatorKernel& free, const LatticeField& gA, const Eigen::VectorXd& chi, int n_lambda = 8);
/// Closed form -log det(1 + D gA) + Tr(D gA).
double s0_exact(const PropagatorKernel& free, const LatticeField& gA);

struct CondensateTerm {
  double primary = 0.0;         // <phi0 gA, G phi0 gA>
  double by_parts = 0.0;        // <gA phi1, phi2> - <phi1, K_du phi2> + <K_du phi1, G K_du phi2>
  double by_parts_plain = 0.0;  // same with the continuum K in place of K_du (diagnostic)
  double discrepancy = 0.0;     // |primary - by_parts|
};
CondensateTerm t1_condensate(const PropagatorKernel& free, const LatticeField& gA, double phi0, const Cutoff& cutoff);

struct EntropyBreakdown {
  double t0 = 0, t1 = 0, t2 = 0, w_a = 0;
  double s0_series = 0, s0_series_tail = 0, s0_lambda = 0, s0_discrepancy = 0;
  CondensateTerm t1_forms;
  double beta_sup_a = 0;
  bool hypothesis_warning = false;
};

struct EntropyOptions {
  int n_trunc = 40;
  int n_lambda = 8;
  double s0_tolerance = 1e-8;
  double t1_tolerance = 1e-6;
};

/// Assembles W_A = t0 + t1 + t2 with t2 = S0 in closed form and checks the alternative forms.
EntropyBreakdown w_a(const PropagatorKernel& free, const LatticeField& gA, double phi0, const Cutoff& cutoff,
                     const EntropyOptions& options = {});

}  // namespace bosekms
