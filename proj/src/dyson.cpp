#include "bosekms/dyson.hpp"

#include <cmath>
#include <limits>

namespace bosekms {

namespace {

constexpr std::size_t kMaxSliceSpace = 4096;

void check_grid(const PropagatorKernel& free, const LatticeField& A) {
  const auto& g = free.grid();
  A.check_shape(g);
  if (g.n_slice_space() > kMaxSliceSpace) throw LimitError("dense slice-space operators capped at 4096 rows");
}

Eigen::VectorXd vertex_of(const LatticeField& A, VertexRule rule, double dt) {
  Eigen::VectorXd a = A.flat();
  if (rule == VertexRule::trapezoid) return a;
  // (1 - e^{-dt a})/dt, written to stay accurate as dt a -> 0
  return a.unaryExpr([dt](double x) { return -std::expm1(-dt * x) / dt; });
}

Eigen::VectorXd half_step(const LatticeField& A, VertexRule rule, double dt) {
  Eigen::VectorXd a = A.flat();
  if (rule == VertexRule::trapezoid) return Eigen::VectorXd::Ones(a.size());
  return (-0.5 * dt * a.array()).exp().matrix();
}

void fill_header(InteractingKernel& k, const PropagatorKernel& free, const LatticeField& A, VertexRule rule) {
  k.rule = rule;
  k.field = A;
  k.beta_sup_a = free.beta() * A.sup_norm();
  k.hypothesis_warning = k.beta_sup_a >= 1.0;
}

}  // namespace

Eigen::MatrixXd InteractingKernel::block(int j, int i) const {
  const auto N = static_cast<Eigen::Index>(grid.n_spatial());
  return op.block(j * N, i * N, N, N);
}

double InteractingKernel::value(std::size_t x, int j, std::size_t y, int i) const {
  return op(grid.slice_index(x, j), grid.slice_index(y, i)) / (grid.cell_volume() * grid.dt());
}

Eigen::MatrixXd free_slice_operator(const PropagatorKernel& free) {
  const auto& g = free.grid();
  const auto N = static_cast<Eigen::Index>(g.n_spatial());
  const int M = g.n_time();
  std::vector<Eigen::MatrixXd> sep(M);
  sep[0] = free.spatial_operator(0.0, true) * g.dt();
  for (int s = 1; s < M; ++s) sep[s] = free.spatial_operator(s * g.dt()) * g.dt();
  Eigen::MatrixXd D(N * M, N * M);
  for (int j = 0; j < M; ++j)
    for (int i = 0; i < M; ++i) D.block(j * N, i * N, N, N) = sep[((j - i) % M + M) % M];
  return D;
}

InteractingKernel dyson_kernel(const PropagatorKernel& free, const LatticeField& A, int order, VertexRule rule) {
  check_grid(free, A);
  if (order < 0) throw DomainError("dyson_kernel: order >= 0");
  const auto& g = free.grid();
  InteractingKernel k(g);
  fill_header(k, free, A, rule);
  k.provenance = Provenance::dyson;
  k.order = order;

  const Eigen::MatrixXd D = free_slice_operator(free);
  const Eigen::MatrixXd X = D * vertex_of(A, rule, g.dt()).asDiagonal();
  k.ratio_bound = X.cwiseAbs().rowwise().sum().maxCoeff();

  Eigen::MatrixXd term = D;
  Eigen::MatrixXd sum = D;
  k.term_norms.push_back(term.cwiseAbs().rowwise().sum().maxCoeff());
  for (int n = 1; n <= order; ++n) {
    term = -(X * term);
    sum += term;
    k.term_norms.push_back(term.cwiseAbs().rowwise().sum().maxCoeff());
  }
  if (k.ratio_bound < 1.0) k.tail_bound = k.term_norms.back() * k.ratio_bound / (1.0 - k.ratio_bound);
  else k.tail_bound = std::numeric_limits<double>::infinity();

  const Eigen::VectorXd h = half_step(A, rule, g.dt());
  k.op = h.asDiagonal() * sum * h.asDiagonal();
  return k;
}

InteractingKernel resolvent_kernel(const PropagatorKernel& free, const LatticeField& A, VertexRule rule) {
  check_grid(free, A);
  const auto& g = free.grid();
  InteractingKernel k(g);
  fill_header(k, free, A, rule);
  k.provenance = Provenance::resolvent;

  const Eigen::MatrixXd D = free_slice_operator(free);
  const Eigen::MatrixXd X = D * vertex_of(A, rule, g.dt()).asDiagonal();
  k.ratio_bound = X.cwiseAbs().rowwise().sum().maxCoeff();
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(D.rows(), D.cols());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(I + X);
  const Eigen::VectorXd h = half_step(A, rule, g.dt());
  k.op = h.asDiagonal() * lu.solve(D) * h.asDiagonal();
  return k;
}

InteractingKernel sliced_kernel(const PropagatorKernel& free, const LatticeField& A) {
  check_grid(free, A);
  const auto& g = free.grid();
  const auto N = static_cast<Eigen::Index>(g.n_spatial());
  const int M = g.n_time();
  const double dt = g.dt();
  InteractingKernel k(g);
  fill_header(k, free, A, VertexRule::slice_exact);
  k.provenance = Provenance::sliced;

  const Eigen::MatrixXd T = free.evolution(dt);
  std::vector<Eigen::VectorXd> H(M + 1);
  for (int j = 0; j < M; ++j) H[j] = (-0.5 * dt * A.values.col(j).array()).exp().matrix();
  H[M] = H[0];
  // slice transfer Tbar_j = H_j e^{-du K} H_{j-1}, j = 1..M
  std::vector<Eigen::MatrixXd> Tbar(M + 1);
  for (int j = 1; j <= M; ++j) Tbar[j] = H[j].asDiagonal() * T * H[j - 1].asDiagonal();

  // prefix[j] = chain(0 -> j), suffix[i] = chain(i -> M); empty chains are the identity
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(N, N);
  std::vector<Eigen::MatrixXd> prefix(M + 1, I), suffix(M + 1, I);
  for (int j = 1; j <= M; ++j) prefix[j] = Tbar[j] * prefix[j - 1];
  for (int i = M - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * Tbar[i + 1];

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(I - prefix[M]);
  if (std::abs(lu.determinant()) < 1e-14) throw InvariantError("1 - T_full invertible", "spectrum of K + A near zero");
  const Eigen::MatrixXd R = lu.inverse();

  k.op.resize(N * M, N * M);
  for (int i = 0; i < M; ++i) {
    const Eigen::MatrixXd wrap = R * suffix[i];
    Eigen::MatrixXd chain = I;  // chain(i -> j)
    for (int j = 0; j < M; ++j) {
      Eigen::MatrixXd blk = prefix[j] * wrap;
      if (j > i) {
        chain = Tbar[j] * chain;
        blk += chain;
      }
      k.op.block(j * N, i * N, N, N) = blk * dt;
    }
  }
  return k;
}

Eigen::MatrixXd truncated_two_point(const InteractingKernel& kernel) {
  const auto N = static_cast<Eigen::Index>(kernel.grid.n_spatial());
  return Eigen::MatrixXd::Identity(N, N) + kernel.block(0, 0) / kernel.grid.dt();
}

Eigen::MatrixXd lattice_generator(const PropagatorKernel& free) {
  const double dt = free.grid().dt();
  return free.momentum_operator((free.dispersion().array() * dt).unaryExpr([](double x) { return std::expm1(x); }).matrix() / dt);
}

double slice_inner(const GridSpec& grid, const Eigen::VectorXd& f, const Eigen::VectorXd& h) {
  return f.dot(h) * grid.cell_volume() * grid.dt();
}

OnePoint one_point(const Eigen::VectorXd& f, const InteractingKernel& kernel, const PropagatorKernel& free,
                   const Cutoff& cutoff, double phi0, double tolerance) {
  if (kernel.rule != VertexRule::trapezoid)
    throw InvariantError("one_point needs a trapezoid-rule kernel", "kernel built with the slice_exact vertex");
  const auto& g = kernel.grid;
  const auto N = static_cast<Eigen::Index>(g.n_spatial());
  const int M = g.n_time();
  if (f.size() != N) throw ShapeError("one_point: f must be a spatial grid function");
  OnePoint out;
  if (phi0 == 0.0) return out;

  const double ad = g.cell_volume();
  const Eigen::VectorXd J = kernel.field.flat() * phi0;  // field is gA
  const Eigen::VectorXd GJ = kernel.op.topRows(N) * J;   // integrates over u
  out.value = -f.dot(GJ) * ad;

  const Eigen::VectorXd psi = cutoff.chi * phi0;
  const Eigen::VectorXd kpsi = lattice_generator(free) * psi;
  Eigen::VectorXd kpsi_all(N * M);
  for (int j = 0; j < M; ++j) kpsi_all.segment(j * N, N) = kpsi;
  out.by_parts = -f.dot(psi) * ad + f.dot(kernel.op.topRows(N) * kpsi_all) * ad;

  out.discrepancy = std::abs(out.value - out.by_parts);
  const double scale = std::max({std::abs(out.value), std::abs(out.by_parts), 1e-300});
  if (out.discrepancy > tolerance * std::max(1.0, scale))
    throw InvariantError("one-point forms agree", "integration-order mismatch " + std::to_string(out.discrepancy));
  return out;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::dyson: return "dyson";
    case Provenance::sliced: return "sliced";
    case Provenance::resolvent: return "resolvent";
  }
  return "unknown";
}

}  // namespace bosekms
