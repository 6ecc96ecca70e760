#include "doctest.h"

#include "bosekms/entropy.hpp"

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

LatticeField test_field(const GridSpec& g, double scale) {
  LatticeField A(g);
  for (std::size_t s = 0; s < g.n_spatial(); ++s)
    for (int j = 0; j < g.n_time(); ++j) {
      const double x = g.coord(s)[0], u = j * g.dt();
      A.values(s, j) = scale / g.beta() * (0.3 + 0.7 * std::sin(2 * M_PI * x / g.box_length() + 0.4) *
                                                     std::cos(2 * M_PI * u / g.beta()));
    }
  return A;
}

double logdet(const Eigen::MatrixXd& m) { return std::log(m.determinant()); }

}  // namespace

TEST_CASE("Gauss-Legendre on [0,1]") {
  const auto [x2, w2] = gauss_legendre_unit(2);
  CHECK(x2(0) == Approx(0.5 - 0.5 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(x2(1) == Approx(0.5 + 0.5 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(w2(0) == Approx(0.5).epsilon(1e-14));
  for (int n : {3, 8, 16}) {
    const auto [x, w] = gauss_legendre_unit(n);
    for (int deg = 0; deg < 2 * n; ++deg) {
      const double q = (w.array() * x.array().pow(deg)).sum();
      CHECK(q == Approx(1.0 / (deg + 1)).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(gauss_legendre_unit(0), LimitError);
}

TEST_CASE("scalar anchor -ln(1+x) + x") {
  // one site, one slice: D gA is the number beta A / (e^{-beta mu} - 1)
  const double beta = 1.3, mu = -0.9;
  GridSpec g(1, 1, 1.0, 1, beta);
  const auto free = build_kernel(params(beta, mu), g);
  Eigen::VectorXd chi = Eigen::VectorXd::Ones(1);
  for (double a : {-0.4, 0.05, 0.3, 0.7}) {
    const auto A = LatticeField::constant(g, a);
    const double x = beta * a / std::expm1(-beta * mu);
    const double anchor = -std::log1p(x) + x;
    CHECK(std::abs(s0_exact(free, A) - anchor) < 1e-10 * std::max(1.0, std::abs(anchor)));
    CHECK(std::abs(s0_lambda(free, A, chi, 16) - anchor) < 1e-10);
    if (std::abs(x) < 0.5) CHECK(std::abs(s0_series(free, A, chi, 60).value - anchor) < 1e-10);
    CHECK(t0_free_expectation(free, A) == Approx(-x).epsilon(1e-13));
  }
}

TEST_CASE("S0 forms agree") {
  GridSpec g(1, 8, 8.0, 8, 1.0);
  const auto free = build_kernel(params(1.0, -1.0), g);
  const auto cut = Cutoff::plateau(g, {0.0, 0.0, 0.0}, 1.0, 1.5);
  const auto gA = test_field(g, 0.6).dressed(cut.g);
  const auto series = s0_series(free, gA, cut.chi, 40);
  const double lambda = s0_lambda(free, gA, cut.chi, 16);
  const double exact = s0_exact(free, gA);
  CHECK(series.tail_bound < 1e-8);
  CHECK(std::abs(series.value - lambda) < 1e-8);
  CHECK(std::abs(exact - lambda) < 1e-10);
  CHECK(series.terms == 39);
  // the series accumulates order by order towards the closed form
  CHECK(std::abs(s0_series(free, gA, cut.chi, 4).value - exact) > std::abs(series.value - exact));
}

TEST_CASE("S0 is invariant under space and time translations") {
  GridSpec g(1, 8, 8.0, 8, 1.0);
  const auto free = build_kernel(params(1.0, -0.8), g);
  const auto A = test_field(g, 0.5);
  const double ref = s0_exact(free, A);
  LatticeField shifted(g), rolled(g);
  for (int j = 0; j < 8; ++j)
    for (int s = 0; s < 8; ++s) {
      shifted.values((s + 3) % 8, j) = A.values(s, j);
      rolled.values(s, (j + 5) % 8) = A.values(s, j);
    }
  CHECK(s0_exact(free, shifted) == Approx(ref).epsilon(1e-12));
  CHECK(s0_exact(free, rolled) == Approx(ref).epsilon(1e-12));
  CHECK(t0_free_expectation(free, rolled) == Approx(t0_free_expectation(free, A)).epsilon(1e-13));
}

TEST_CASE("T1 forms") {
  GridSpec g(1, 8, 8.0, 8, 1.0);
  const auto free = build_kernel(params(1.0, -0.7), g);
  const auto cut = Cutoff::plateau(g, {0.0, 0.0, 0.0}, 1.0, 1.5);
  const auto gA = test_field(g, 0.6).dressed(cut.g);
  const auto t1 = t1_condensate(free, gA, 0.9, cut);
  CHECK(t1.primary != 0.0);
  CHECK(t1.discrepancy < 1e-6);
  CHECK(std::abs(t1.primary - t1.by_parts) < 1e-10 * std::abs(t1.primary));
  // quadratic in phi0
  CHECK(t1_condensate(free, gA, 1.8, cut).primary == Approx(4 * t1.primary).epsilon(1e-12));
  CHECK(t1_condensate(free, gA, 0.0, cut).primary == 0.0);
  // the continuum generator misses the slice discretisation
  CHECK(std::abs(t1.by_parts_plain - t1.primary) > 1e-6);
}

TEST_CASE("W_A assembly") {
  GridSpec g(1, 8, 8.0, 8, 1.0);
  const auto free = build_kernel(params(1.0, -0.7), g);
  const auto cut = Cutoff::plateau(g, {0.0, 0.0, 0.0}, 1.0, 1.5);
  const auto gA = test_field(g, 0.6).dressed(cut.g);
  const auto w = w_a(free, gA, 0.5, cut);
  const Eigen::MatrixXd M = vertex_operator(free, gA);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(M.rows(), M.cols());
  CHECK(w.w_a == Approx(-logdet(I + M) + w.t1).epsilon(1e-10));
  CHECK(w.t0 == Approx(-M.trace()).epsilon(1e-12));
  CHECK(w.s0_discrepancy < 1e-8);
  CHECK_FALSE(w.hypothesis_warning);
  // phi0 = 0 has no condensate term
  CHECK(w_a(free, gA, 0.0, cut).t1 == 0.0);
}
