#include "bosekms/bounds.hpp"

#include "bosekms/pathint.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <random>

namespace bosekms {

EBound e_bound(double beta, double v0, double g_l1, double xi, double c_tilde) {
  if (!(beta > 0) || !(g_l1 > 0) || !(v0 >= 0) || !(c_tilde >= 0))
    throw DomainError("e_bound: beta, ||g||_1 > 0 and v0, c_tilde >= 0 required");
  if (!(xi > 0) || xi > 1) throw DomainError("e_bound: 0 < xi <= 1");
  EBound e;
  e.value = c_tilde * std::sqrt(v0) * g_l1 * xi / beta;
  e.convergent = e.value < std::numbers::ln2;
  return e;
}

MomentCheck gaussian_moment_lemma_check(const Eigen::MatrixXd& eta, double beta_v0, long trials, std::uint64_t seed) {
  const auto k = eta.rows();
  if (k < 1 || k > 8 || eta.cols() != k) throw DomainError("gaussian_moment_lemma_check: square eta with k <= 8");
  if ((eta - eta.transpose()).cwiseAbs().maxCoeff() > 1e-12 * eta.cwiseAbs().maxCoeff())
    throw DomainError("gaussian_moment_lemma_check: eta must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(eta);
  if (llt.info() != Eigen::Success) throw DomainError("gaussian_moment_lemma_check: eta must be positive definite");
  if (eta.diagonal().maxCoeff() > beta_v0 * (1 + 1e-12))
    throw DomainError("gaussian_moment_lemma_check: eta_jj <= beta v0 required");
  if (trials < 2) throw DomainError("trials >= 2");

  MomentCheck out;
  out.k = static_cast<int>(k);
  const Eigen::MatrixXd Lc = llt.matrixL();
  std::normal_distribution<double> normal(0.0, 1.0);
  double sum = 0, sq = 0;
  Eigen::VectorXd z(k);
  for (long t = 0; t < trials; ++t) {
    CounterRng rng(seed, 7, t);
    for (Eigen::Index i = 0; i < k; ++i) z(i) = normal(rng);
    const double p = (Lc * z).cwiseAbs().prod();
    sum += p;
    sq += p * p;
  }
  out.lhs_mc = sum / trials;
  out.lhs_error = std::sqrt(std::max(0.0, sq / trials - out.lhs_mc * out.lhs_mc) / (trials - 1));
  const double kk = static_cast<double>(k);
  out.rhs = std::exp(0.5 * kk * std::log(std::numbers::pi) - 0.5 * kk * std::log(kk) + std::lgamma(kk) -
                     std::lgamma(0.5 * kk) + 0.5 * kk * std::log(beta_v0));
  out.pass = out.lhs_mc <= out.rhs + 3 * out.lhs_error;
  out.det_eta = eta.determinant();
  out.prod_diag = eta.diagonal().prod();
  out.hadamard = out.det_eta <= out.prod_diag * (1 + 1e-12);
  return out;
}

std::vector<StirlingRow> stirling_ratio_check(int k_max) {
  if (k_max < 1 || k_max > 200) throw LimitError("stirling_ratio_check: 1 <= k_max <= 200");
  std::vector<StirlingRow> rows;
  for (int k = 1; k <= k_max; ++k) {
    const double lhs = std::exp(std::lgamma(k) - 0.5 * k * std::log(k) - std::lgamma(0.5 * k));
    const double rhs = std::pow(2.0 / std::numbers::e, 0.5 * k);
    rows.push_back({k, lhs, rhs, lhs <= rhs});
  }
  return rows;
}

CondensateBound condensate_bound(double beta, double phi0, double epsilon, double xi, double norm_kchi1,
                                 double norm_chi2, double vtilde_gg) {
  if (!(beta > 0) || phi0 < 0 || !(epsilon > 0) || xi < 0 || norm_kchi1 < 0 || norm_chi2 < 0 || vtilde_gg < 0)
    throw DomainError("condensate_bound: inputs must be nonnegative (beta, epsilon positive)");
  CondensateBound b;
  const double p2 = phi0 * phi0;
  b.chi_form = std::exp(2 * beta * p2 * norm_kchi1 * norm_chi2 * xi);
  b.eps_form = std::exp(2 * beta * p2 * epsilon * xi);
  b.lower = 1 + std::exp(-0.5 * beta * vtilde_gg * p2) - b.eps_form;
  return b;
}

std::string to_string(GNorm n) {
  switch (n) {
    case GNorm::l1: return "l1";
    case GNorm::l2: return "l2";
    case GNorm::sup: return "sup";
  }
  return "l1";
}

RegionPoint region(const RegionInputs& in) {
  if (!(in.beta > 0) || in.phi0 < 0 || in.v0 < 0 || !(in.g_l1 > 0) || in.vtilde_gg < 0 || !(in.epsilon > 0) ||
      in.c_tilde < 0 || in.g_norm < 0)
    throw DomainError("region: physical inputs out of range");
  RegionPoint p;
  p.in = in;
  const double p2 = in.phi0 * in.phi0;
  p.R = in.epsilon * in.beta * p2 * in.g_norm + std::sqrt(in.v0) * in.g_l1 * in.c_tilde / in.beta;
  p.margin = 1 + std::exp(-0.5 * in.beta * p2 * p2 * in.vtilde_gg) - std::exp(p.R);
  p.convergent = p.margin > 0;
  p.gamma = in.beta * in.v0 * in.g_l1 * in.g_l1;
  p.intro_margin = intro_margin(in.beta, p.gamma, in.phi0, in.c_tilde);
  p.intro_convergent = p.intro_margin > 0;
  return p;
}

double intro_margin(double beta, double gamma, double phi0, double c_tilde) {
  return std::log1p(std::exp(-0.5 * gamma * std::pow(phi0, 4))) - std::sqrt(gamma) * c_tilde / std::pow(beta, 1.5);
}

Beta0 beta0(double gamma, double phi0, double c_tilde, double rel_tol) {
  if (!(gamma > 0) || !(c_tilde > 0) || phi0 < 0) throw DomainError("beta0: gamma, c_tilde > 0 and phi0 >= 0");
  Beta0 b;
  const double lg = std::log1p(std::exp(-0.5 * gamma * std::pow(phi0, 4)));
  b.closed = std::pow(std::sqrt(gamma) * c_tilde / lg, 2.0 / 3.0);
  b.printed = std::pow(gamma / c_tilde * lg, 1.5);
  // the margin increases with beta; bracket the sign change and bisect
  double lo = b.closed / 2, hi = b.closed * 2;
  while (intro_margin(lo, gamma, phi0, c_tilde) > 0) lo /= 2;
  while (intro_margin(hi, gamma, phi0, c_tilde) <= 0) hi *= 2;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (intro_margin(mid, gamma, phi0, c_tilde) > 0 ? hi : lo) = mid;
  }
  b.bisection = 0.5 * (lo + hi);
  return b;
}

BetaInterval convergence_interval(RegionInputs in, double lo, double hi, int sweep) {
  BetaInterval out;
  auto ok = [&](double beta) {
    in.beta = beta;
    return region(in).convergent;
  };
  double first = -1, last = -1;
  for (int i = 0; i <= sweep; ++i) {
    const double beta = lo * std::pow(hi / lo, static_cast<double>(i) / sweep);
    if (ok(beta)) {
      if (first < 0) first = beta;
      last = beta;
    }
  }
  if (first < 0) return out;
  auto refine = [&](double a, double b) {  // ok(a) != ok(b)
    const bool fa = ok(a);
    for (int it = 0; it < 200 && std::abs(b - a) > 1e-13 * std::abs(b); ++it) {
      const double m = 0.5 * (a + b);
      (ok(m) == fa ? a : b) = m;
    }
    return 0.5 * (a + b);
  };
  const double step = std::pow(hi / lo, 1.0 / sweep);
  out.found = true;
  out.beta_lo = first > lo ? refine(first / step, first) : lo;
  out.beta_hi = last < hi ? refine(last, last * step) : hi;
  return out;
}

CtildeEstimate estimate_ctilde(const ModelParams& params, int dim) {
  const double mu_rr = params.mu_rr();
  if (!(mu_rr < 0)) throw DomainError("estimate_ctilde: mu_rr < 0 required");
  CtildeEstimate c;
  c.constant = std::pow(2.0 * std::numbers::pi, -0.5 * dim);
  c.polylog_value = polylog(0.5 * dim, std::exp(params.beta * mu_rr));
  c.c_tilde = c.constant * c.polylog_value;
  c.lemma_factor = std::sqrt(std::numbers::pi) / std::sqrt(2.0 * std::numbers::pi);
  c.stirling_factor = std::sqrt(2.0 / std::numbers::e);
  c.rescaled = c.c_tilde * c.lemma_factor * c.stirling_factor;
  return c;
}

}  // namespace bosekms
