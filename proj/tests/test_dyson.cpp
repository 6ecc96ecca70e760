#include "doctest.h"

#include "bosekms/cumulants.hpp"
#include "bosekms/dyson.hpp"

#include <cmath>

using namespace bosekms;
using doctest::Approx;

namespace {

ModelParams params(double beta, double mu) {
  ModelParams p;
  p.beta = beta;
  p.mu = mu;
  return p;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Smooth field with beta ||A||_inf = scale.
LatticeField smooth_field(const GridSpec& g, double scale) {
  LatticeField A(g);
  for (std::size_t s = 0; s < g.n_spatial(); ++s)
    for (int j = 0; j < g.n_time(); ++j) {
      const double x = g.coord(s)[0], u = j * g.dt();
      A.values(s, j) = scale / g.beta() *
                       (0.6 + 0.4 * std::cos(2 * M_PI * x / g.box_length()) * std::sin(2 * M_PI * u / g.beta()));
    }
  return A;
}

}  // namespace

TEST_CASE("A = 0 reduces to the free kernel") {
  GridSpec g(1, 6, 6.0, 8, 1.0);
  const auto free = build_kernel(params(1.0, -0.7), g);
  const LatticeField zero(g);
  const Eigen::MatrixXd D = free_slice_operator(free);
  for (int order : {0, 3, 8}) CHECK(max_abs(dyson_kernel(free, zero, order).op - D) == 0.0);
  CHECK(max_abs(sliced_kernel(free, zero).op - D) < 1e-13 * max_abs(D));
  CHECK(max_abs(resolvent_kernel(free, zero).op - D) < 1e-15 * max_abs(D));
  // Omega_0 is the B- operator
  CHECK(max_abs(truncated_two_point(dyson_kernel(free, zero, 0)) - free.spatial_operator(0.0)) < 1e-13);
  // kernel values are the free position kernel at the slice separation
  const auto k = dyson_kernel(free, zero, 0);
  CHECK(k.value(2, 5, 0, 1) == Approx(position_kernel_spectral(free, 2, 0, 4 * g.dt())).epsilon(1e-12));
  CHECK(k.value(2, 1, 0, 5) == Approx(position_kernel_spectral(free, 2, 0, 4 * g.dt())).epsilon(1e-12));
  CHECK(to_string(k.provenance) == "dyson");
}

TEST_CASE("constant A: shifted chemical potential closed form") {
  GridSpec g(1, 8, 8.0, 16, 1.0);
  const double a = 0.3;
  const auto free = build_kernel(params(1.0, -0.5), g);
  const auto shifted = build_kernel(params(1.0, -0.5 - a), g);
  const auto A = LatticeField::constant(g, a);
  const Eigen::MatrixXd omega_exact = shifted.spatial_operator(0.0);

  CHECK(max_abs(truncated_two_point(sliced_kernel(free, A)) - omega_exact) < 1e-8);
  CHECK(max_abs(truncated_two_point(resolvent_kernel(free, A, VertexRule::slice_exact)) - omega_exact) < 1e-8);
  // every block is the shifted free kernel
  const auto s = sliced_kernel(free, A);
  const Eigen::MatrixXd D_shift = free_slice_operator(shifted);
  CHECK(max_abs(s.op - D_shift) < 1e-10 * max_abs(D_shift));

  // truncated series stays inside its own tail bound
  const auto k8 = dyson_kernel(free, A, 8);
  CHECK(k8.tail_bound < 1.0);
  CHECK(max_abs(k8.op - D_shift) <= k8.tail_bound * (1 + 1e-9));
  // momentum-space check of Omega at p = 0: 1/(1 - e^{-beta(K + a)})
  const Eigen::MatrixXd omega = truncated_two_point(s);
  const double zero_mode = omega.sum() / g.n_spatial();  // constant vector is the p = 0 eigenvector
  CHECK(zero_mode == Approx(1.0 / (1.0 - std::exp(-(0.5 + a)))).epsilon(1e-10));
}

TEST_CASE("Dyson series against the sliced ordered exponential") {
  GridSpec g(1, 8, 8.0, 16, 1.0);
  const auto free = build_kernel(params(1.0, -2.0), g);
  const auto A = smooth_field(g, 0.5);
  CHECK(A.sup_norm() * g.beta() == Approx(0.5));
  const auto d = dyson_kernel(free, A, 12);
  const auto s = sliced_kernel(free, A);
  CHECK_FALSE(d.hypothesis_warning);
  CHECK(max_abs(d.op - s.op) / max_abs(s.op) < 1e-6);
  // geometric decay of term norms
  for (std::size_t n = 1; n < d.term_norms.size(); ++n)
    CHECK(d.term_norms[n] <= d.ratio_bound * d.term_norms[n - 1] * (1 + 1e-12));
  // exact resummation coincides with slicing
  CHECK(max_abs(resolvent_kernel(free, A, VertexRule::slice_exact).op - s.op) < 1e-12 * max_abs(s.op));
  CHECK(to_string(s.provenance) == "sliced");

  // the hypothesis flag only raises a warning
  const auto strong = dyson_kernel(free, smooth_field(g, 1.5), 2);
  CHECK(strong.hypothesis_warning);
}

TEST_CASE("discrete inverse identity of the sliced kernel") {
  GridSpec g(1, 6, 6.0, 8, 1.0);
  const auto free = build_kernel(params(1.0, -0.4), g);
  const auto A = smooth_field(g, 0.7);
  const auto s = sliced_kernel(free, A);
  const int M = g.n_time();
  const double dt = g.dt();
  const Eigen::MatrixXd T = free.evolution(dt);
  auto H = [&](int j) { return Eigen::VectorXd((-0.5 * dt * A.values.col(j % M).array()).exp().matrix()); };
  for (int j = 0; j < M; ++j) {
    const Eigen::MatrixXd step = H(j + 1).asDiagonal() * T * H(j).asDiagonal();
    for (int i = 0; i < M; ++i) {
      Eigen::MatrixXd lhs = s.block((j + 1) % M, i) - step * s.block(j, i);
      if (i == j) lhs -= step * dt;
      CHECK(max_abs(lhs) < 1e-13);
    }
  }
}

TEST_CASE("first-order coefficient by finite differences") {
  GridSpec g(1, 6, 6.0, 8, 1.0);
  const auto free = build_kernel(params(1.0, -0.6), g);
  const auto A = smooth_field(g, 0.5);
  const Eigen::MatrixXd D = free_slice_operator(free);
  const Eigen::MatrixXd first = -D * A.flat().asDiagonal() * D;
  const double lam = 1e-4;
  auto scaled = [&](double l) {
    LatticeField B = A;
    B.values *= l;
    return resolvent_kernel(free, B, VertexRule::trapezoid).op;
  };
  const Eigen::MatrixXd fd = (scaled(lam) - scaled(-lam)) / (2 * lam);
  CHECK(max_abs(fd - first) < 1e-7 * max_abs(first));
  CHECK(max_abs(dyson_kernel(free, A, 1, VertexRule::trapezoid).op - D - first) < 1e-15);

  // Omega - Omega_0 at first order: -sum_u du P(-u) A(u) P(u)
  const auto N = static_cast<Eigen::Index>(g.n_spatial());
  Eigen::MatrixXd quad = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < g.n_time(); ++i)
    quad -= D.block(0, i * N, N, N) * A.values.col(i).asDiagonal() * D.block(i * N, 0, N, N) / g.dt();
  LatticeField small = A;
  small.values *= lam;
  LatticeField neg = A;
  neg.values *= -lam;
  const Eigen::MatrixXd omega_fd = (truncated_two_point(resolvent_kernel(free, small)) -
                                    truncated_two_point(resolvent_kernel(free, neg))) /
                                   (2 * lam);
  CHECK(max_abs(omega_fd - quad) < 1e-7 * max_abs(quad));
}

TEST_CASE("positivity for nonnegative A") {
  GridSpec g(1, 6, 6.0, 8, 1.0);
  const auto free = build_kernel(params(1.0, -0.3), g);
  const auto A = smooth_field(g, 0.9);
  CHECK(A.values.minCoeff() > 0);
  CHECK(sliced_kernel(free, A).op.minCoeff() > 0);
  CHECK(resolvent_kernel(free, A).op.minCoeff() > 0);
  CHECK(free_slice_operator(free).minCoeff() > 0);
}

TEST_CASE("one-point function") {
  GridSpec g(1, 8, 8.0, 8, 1.0);
  const auto free = build_kernel(params(1.0, -0.5), g);
  const auto cut = Cutoff::plateau(g, {0.0, 0.0, 0.0}, 1.0, 1.5);
  const auto gA = smooth_field(g, 0.6).dressed(cut.g);
  Eigen::VectorXd f(8);
  for (int s = 0; s < 8; ++s) f(s) = std::exp(-0.3 * s);

  const auto k = resolvent_kernel(free, gA);
  const auto op = one_point(f, k, free, cut, 0.8);
  CHECK(op.discrepancy < 1e-10);
  CHECK(op.value != 0.0);
  CHECK(one_point(f, k, free, cut, 0.0).value == 0.0);
  // A = 0: both forms vanish
  const auto k0 = resolvent_kernel(free, LatticeField(g));
  const auto op0 = one_point(f, k0, free, cut, 0.8);
  CHECK(std::abs(op0.value) < 1e-15);
  CHECK(std::abs(op0.by_parts) < 1e-12);
  // slice_exact kernels are rejected
  CHECK_THROWS_AS(one_point(f, dyson_kernel(free, gA, 3), free, cut, 0.8), InvariantError);

  // first order in A: -sum_u du omega_C(Psi(f); Q_{A,1}(u)), through the cumulant engine
  const double lam = 1e-5;
  LatticeField plus = gA, minus = gA;
  plus.values *= lam;
  minus.values *= -lam;
  const double fd = (one_point(f, resolvent_kernel(free, plus), free, cut, 0.8).value -
                     one_point(f, resolvent_kernel(free, minus), free, cut, 0.8).value) /
                    (2 * lam);
  double oracle = 0;
  const int M = g.n_time();
  for (int i = 0; i < M; ++i) {
    KernelPair kp;
    kp.minus = free.spatial_operator(((M - i) % M) * g.dt(), i == 0);
    kp.plus = kp.minus;
    kp.cell_volume = g.cell_volume();
    const Eigen::VectorXd h = gA.values.col(i) * 0.8;
    oracle -= g.dt() * connected_correlation_graph_sum({{VertexKind::psi, f}, {VertexKind::psi_star, h}}, kp);
  }
  CHECK(fd == Approx(oracle).epsilon(1e-8));
}

TEST_CASE("dense guard") {
  GridSpec g(2, 16, 16.0, 32, 1.0);
  const auto free = build_kernel(params(1.0, -0.5), g);
  CHECK_THROWS_AS(dyson_kernel(free, LatticeField(g), 1), LimitError);
}
