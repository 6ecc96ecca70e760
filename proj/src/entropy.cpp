#include "bosekms/entropy.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace bosekms {

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre_unit(int n) {
  if (n < 1 || n > 200) throw LimitError("gauss_legendre_unit: 1 <= n <= 200");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd x = (es.eigenvalues().array() + 1.0) / 2.0;
  Eigen::VectorXd w = es.eigenvectors().row(0).transpose().array().square();  // sums to 1 on [0,1]
  return {x, w};
}

namespace {

void check(const PropagatorKernel& free, const LatticeField& gA) {
  gA.check_shape(free.grid());
  if (free.grid().n_slice_space() > 4096) throw LimitError("dense slice-space operators capped at 4096 rows");
}

Eigen::VectorXd broadcast(const GridSpec& g, const Eigen::VectorXd& spatial) {
  const auto N = static_cast<Eigen::Index>(g.n_spatial());
  Eigen::VectorXd out(N * g.n_time());
  for (int j = 0; j < g.n_time(); ++j) out.segment(j * N, N) = spatial;
  return out;
}

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

Eigen::MatrixXd vertex_operator(const PropagatorKernel& free, const LatticeField& gA) {
  check(free, gA);
  return free_slice_operator(free) * gA.flat().asDiagonal();
}

double t0_free_expectation(const PropagatorKernel& free, const LatticeField& gA) {
  check(free, gA);
  const auto& g = free.grid();
  const Eigen::VectorXd rho = free.spatial_row(0.0, true);  // B+ kernel, rho(x) = row(0)
  return -rho(0) * gA.values.sum() * g.cell_volume() * g.dt();
}

SeriesValue s0_series(const PropagatorKernel& free, const LatticeField& gA, const Eigen::VectorXd& chi, int n_trunc) {
  if (n_trunc < 2) throw DomainError("s0_series: n_trunc >= 2");
  const Eigen::MatrixXd M = vertex_operator(free, gA);
  const Eigen::VectorXd chi_all = broadcast(free.grid(), chi);
  SeriesValue out;
  Eigen::MatrixXd P = M;
  for (int n = 2; n <= n_trunc; ++n) {
    P = P * M;
    const double tr = (P.diagonal().array() * chi_all.array()).sum();
    out.value += ((n % 2) ? -1.0 : 1.0) * tr / n;
  }
  out.terms = n_trunc - 1;
  const double r = inf_norm(M);
  out.tail_bound = r < 1 ? M.rows() * std::pow(r, n_trunc + 1) / ((n_trunc + 1) * (1 - r))
                         : std::numeric_limits<double>::infinity();
  return out;
}

double s0_lambda(const PropagatorKernel& free, const LatticeField& gA, const Eigen::VectorXd& chi, int n_lambda) {
  check(free, gA);
  const Eigen::MatrixXd D = free_slice_operator(free);
  const Eigen::VectorXd a = gA.flat();
  const Eigen::VectorXd chi_all = broadcast(free.grid(), chi);
  const Eigen::MatrixXd X = D * a.asDiagonal();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(D.rows(), D.cols());
  const auto [x, w] = gauss_legendre_unit(n_lambda);
  double total = 0.0;
  for (int k = 0; k < n_lambda; ++k) {
    const Eigen::MatrixXd G = Eigen::PartialPivLU<Eigen::MatrixXd>(I + x(k) * X).solve(D);
    // Tr(diag(a) (D - G) diag(chi))
    const Eigen::VectorXd diag = (D - G).diagonal();
    total += w(k) * (a.array() * diag.array() * chi_all.array()).sum();
  }
  return total;
}

double s0_exact(const PropagatorKernel& free, const LatticeField& gA) {
  const Eigen::MatrixXd M = vertex_operator(free, gA);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(M.rows(), M.cols()) + M);
  const Eigen::VectorXd d = lu.matrixLU().diagonal();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) != 0)) throw InvariantError("1 + D gA invertible", "singular slice operator");
    logdet += std::log(std::abs(d(i)));
  }
  if (lu.determinant() <= 0) throw InvariantError("det(1 + D gA) > 0", "determinant changed sign");
  return -logdet + M.trace();
}

CondensateTerm t1_condensate(const PropagatorKernel& free, const LatticeField& gA, double phi0, const Cutoff& cutoff) {
  check(free, gA);
  CondensateTerm out;
  if (phi0 == 0.0) return out;
  const auto& g = free.grid();
  const InteractingKernel G = resolvent_kernel(free, gA, VertexRule::trapezoid);
  const Eigen::VectorXd J = gA.flat() * phi0;
  out.primary = slice_inner(g, J, G.op * J);

  const Eigen::VectorXd p1 = broadcast(g, cutoff.chi1 * phi0);
  const Eigen::VectorXd p2 = broadcast(g, cutoff.chi2 * phi0);
  auto by_parts = [&](const Eigen::MatrixXd& Kspatial) {
    const Eigen::VectorXd k1 = broadcast(g, Kspatial * (cutoff.chi1 * phi0));
    const Eigen::VectorXd k2 = broadcast(g, Kspatial * (cutoff.chi2 * phi0));
    return slice_inner(g, gA.flat().cwiseProduct(p1), p2) - slice_inner(g, p1, k2) + slice_inner(g, k1, G.op * k2);
  };
  out.by_parts = by_parts(lattice_generator(free));
  out.by_parts_plain = by_parts(free.momentum_operator(free.dispersion()));
  out.discrepancy = std::abs(out.primary - out.by_parts);
  return out;
}

EntropyBreakdown w_a(const PropagatorKernel& free, const LatticeField& gA, double phi0, const Cutoff& cutoff,
                     const EntropyOptions& options) {
  check(free, gA);
  cutoff.validate(free.grid());
  EntropyBreakdown out;
  out.beta_sup_a = free.beta() * gA.sup_norm();
  out.hypothesis_warning = out.beta_sup_a >= 1.0;
  out.t0 = t0_free_expectation(free, gA);
  out.t2 = s0_exact(free, gA);
  const auto series = s0_series(free, gA, cutoff.chi, options.n_trunc);
  out.s0_series = series.value;
  out.s0_series_tail = series.tail_bound;
  out.s0_lambda = s0_lambda(free, gA, cutoff.chi, options.n_lambda);
  out.s0_discrepancy = std::abs(out.s0_series - out.s0_lambda);
  out.t1_forms = t1_condensate(free, gA, phi0, cutoff);
  out.t1 = out.t1_forms.primary;
  out.w_a = out.t0 + out.t1 + out.t2;

  if (!out.hypothesis_warning) {
    const double tol = options.s0_tolerance + series.tail_bound;
    if (std::abs(out.t2 - out.s0_lambda) > tol * std::max(1.0, std::abs(out.t2)))
      throw InvariantError("S0 forms agree", "closed form vs lambda form differ by " +
                                                 std::to_string(std::abs(out.t2 - out.s0_lambda)));
  }
  if (out.t1_forms.discrepancy > options.t1_tolerance * std::max(1.0, std::abs(out.t1)))
    throw InvariantError("T1 forms agree", "primary vs by-parts differ by " + std::to_string(out.t1_forms.discrepancy));
  return out;
}

}  // namespace bosekms
