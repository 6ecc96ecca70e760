#pragma once

// Convergence-region estimates: the E bound, the condensate bound, the
// Gaussian-moment and Stirling inequalities, the region predicate and beta_0.

#include "bosekms/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace bosekms {

struct EBound {
  double value = 0.0;
  bool convergent = false;  // strict E < ln 2
};
/// E = c_tilde sqrt(v0) ||g||_1 xi / beta.
EBound e_bound(double beta, double v0, double g_l1, double xi, double c_tilde);

struct MomentCheck {
  int k = 0;
  double lhs_mc = 0.0, lhs_error = 0.0;  // E[prod |X_j|], X ~ N(0, eta)
  double rhs = 0.0;                      // pi^{k/2} k^{-k/2} Gamma(k)/Gamma(k/2) (beta v0)^{k/2}
  bool pass = false;                     // lhs_mc <= rhs + 3 sigma
  double det_eta = 0.0, prod_diag = 0.0;
  bool hadamard = false;  // det eta <= prod eta_jj
};
MomentCheck gaussian_moment_lemma_check(const Eigen::MatrixXd& eta, double beta_v0, long trials, std::uint64_t seed);

struct StirlingRow {
  int k;
  double lhs, rhs;  // Gamma(k)/(k^{k/2} Gamma(k/2)) and (2/e)^{k/2}
  bool holds;
};
std::vector<StirlingRow> stirling_ratio_check(int k_max);

struct CondensateBound {
  double chi_form = 1.0;  // exp(2 beta phi0^2 ||K chi1|| ||chi2|| xi)
  double eps_form = 1.0;  // exp(2 beta phi0^2 eps xi)
  double lower = 1.0;     // 1 + e^{-beta vtilde phi0^2 / 2} - eps_form
};
CondensateBound condensate_bound(double beta, double phi0, double epsilon, double xi, double norm_kchi1,
                                 double norm_chi2, double vtilde_gg);

enum class GNorm { l1, l2, sup };
std::string to_string(GNorm n);

struct RegionInputs {
  double beta = 1, phi0 = 0, v0 = 0, g_l1 = 1, vtilde_gg = 0, epsilon = 1, c_tilde = 1;
  double g_norm = 1;  // the norm of g entering R (selected by g_norm_kind)
  GNorm g_norm_kind = GNorm::l1;
};

struct RegionPoint {
  RegionInputs in;
  double R = 0, margin = 0;
  bool convergent = false;
  double gamma = 0, intro_margin = 0;  // gamma = beta v0 ||g||_1^2
  bool intro_convergent = false;
};
/// margin = 1 + e^{-beta phi0^4 vtilde/2} - e^R, R = eps beta phi0^2 ||g|| + sqrt(v0) ||g||_1 c_tilde / beta.
RegionPoint region(const RegionInputs& in);

/// Intro-form verdict with gamma held fixed: sqrt(gamma) c/beta^{3/2} < log(1 + e^{-gamma phi0^4/2}).
double intro_margin(double beta, double gamma, double phi0, double c_tilde);

struct Beta0 {
  double bisection = 0;  // root of the intro inequality
  double closed = 0;     // (sqrt(gamma) c / log(1 + e^{-gamma phi0^4/2}))^{2/3}
  double printed = 0;    // ((gamma / c) log(1 + e^{-gamma phi0^4/2}))^{3/2}, reported only
};
Beta0 beta0(double gamma, double phi0, double c_tilde, double rel_tol = 1e-12);

/// Interval of beta (inside [lo, hi]) where the region predicate holds; empty when none.
struct BetaInterval {
  bool found = false;
  double beta_lo = 0, beta_hi = 0;
};
BetaInterval convergence_interval(RegionInputs in, double lo, double hi, int sweep = 400);

struct CtildeEstimate {
  double constant = 0;        // (2 pi)^{-d/2}
  double polylog_value = 0;   // Li_{d/2}(e^{beta mu_rr})
  double c_tilde = 0;         // constant * polylog_value
  double lemma_factor = 0;    // sqrt(pi)/sqrt(2 pi) from the k = 1 moment normalisation
  double stirling_factor = 0; // sqrt(2/e)
  double rescaled = 0;        // c_tilde * lemma_factor * stirling_factor
};
CtildeEstimate estimate_ctilde(const ModelParams& params, int dim);

}  // namespace bosekms
