#include "doctest.h"

#include "bosekms/propagator.hpp"

#include <cmath>

using namespace bosekms;
using doctest::Approx;

namespace {
ModelParams params(double beta, double mu, double mass = 1.0) {
  ModelParams p;
  p.beta = beta;
  p.mu = mu;
  p.mass = mass;
  return p;
}
}  // namespace

TEST_CASE("bose factors") {
  auto b = bose_factors(std::log(2.0), 1.0);
  CHECK(b.minus == Approx(2.0).epsilon(1e-15));
  CHECK(b.plus == Approx(1.0).epsilon(1e-15));
  b = bose_factors(1.0, 1.0);
  CHECK(b.minus == Approx(1.58197670686932642).epsilon(1e-15));
  b = bose_factors(60.0, 1.0);
  CHECK(b.minus == Approx(1.0));
  CHECK(b.plus < 1e-25);
  for (double k : {1e-6, 0.1, 1.0, 5.0, 40.0}) {
    const auto f = bose_factors(k, 1.3);
    CHECK(std::abs(f.minus - f.plus - 1.0) <= 4 * std::numeric_limits<double>::epsilon() * f.minus);
  }
  CHECK_THROWS_AS(bose_factors(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(bose_factors(-1.0, 1.0), DomainError);
}

TEST_CASE("kernel multiplier") {
  // mu_eff with beta K(0) = ln 2
  GridSpec g(1, 8, 8.0, 4, 1.0);
  const auto k = build_kernel(params(1.0, -std::log(2.0)), g);
  std::size_t zero = 4;  // momentum label 0
  CHECK(g.momentum_sq(zero) == 0.0);
  CHECK(k.multiplier()(zero, 0) == Approx(2.0).epsilon(1e-15));
  // K = 1 at p = 0: value at u = beta/2
  const auto k1 = build_kernel(params(1.0, -1.0), g);
  CHECK(k1.value(zero, 0.5) == Approx(std::exp(-0.5) / (1 - std::exp(-1.0))).epsilon(1e-15));
  CHECK(k1.value(zero, 0.5) == Approx(0.9595173756674719).epsilon(1e-14));
  // periodic extension
  for (std::size_t q = 0; q < g.n_spatial(); ++q)
    for (double u : {0.0, 0.25, 0.6}) CHECK(k1.value(q, u + 1.0) == Approx(k1.value(q, u)).epsilon(1e-14));
  CHECK_THROWS_AS(build_kernel(params(1.0, 0.0), g), DomainError);
}

TEST_CASE("position kernel: heat-kernel sum vs independent summation") {
  // x = y, d = 1, beta = m = 1, u = beta, mu = -1; a long box makes periodization negligible.
  GridSpec g(1, 64, 200.0, 4, 1.0);
  const auto k = build_kernel(params(1.0, -1.0), g);
  // mpmath: sum_{n=0}^{64} e^{-(n+1)} (2 pi (n+1))^{-1/2}
  CHECK(position_kernel(k, 0, 0, 1.0, 64) == Approx(0.201876809973919479).epsilon(1e-12));
}

TEST_CASE("position kernel is symmetric and vacuum-like for very negative mu") {
  GridSpec g(1, 16, 4.0, 4, 1.0);
  const auto k = build_kernel(params(1.0, -0.7), g);
  for (std::size_t x = 0; x < 16; x += 3)
    for (std::size_t y = 0; y < 16; y += 5)
      CHECK(position_kernel(k, x, y, 0.3, 40) == Approx(position_kernel(k, y, x, 0.3, 40)).epsilon(1e-14));
  const auto deep = build_kernel(params(1.0, -60.0), g);
  const double free_heat = std::exp(-0.3 * 60.0) * heat_kernel(g.displacement(2, 0), 0.3, 1.0, 1, 4.0);
  CHECK(position_kernel(deep, 2, 0, 0.3, 5) == Approx(free_heat).epsilon(1e-12));
  CHECK_THROWS_AS(position_kernel(k, 0, 0, 1.5, 4), DomainError);
}

TEST_CASE("heat kernel is normalised and satisfies Chapman-Kolmogorov on the torus") {
  const double L = 3.0;
  double mass = 1.7, t = 0.4, s = 0.9;
  // midpoint quadrature of the torus integrals
  const int n = 3000;
  double norm = 0, ck = 0;
  for (int i = 0; i < n; ++i) {
    const double z = (i + 0.5) * L / n;
    norm += heat_kernel({z, 0, 0}, t, mass, 1, L) * L / n;
    ck += heat_kernel({z - 0.2, 0, 0}, t, mass, 1, L) * heat_kernel({1.1 - z, 0, 0}, s, mass, 1, L) * L / n;
  }
  CHECK(norm == Approx(1.0).epsilon(1e-12));
  CHECK(ck == Approx(heat_kernel({0.9, 0, 0}, t + s, mass, 1, L)).epsilon(1e-10));
}

TEST_CASE("wick constant and weight sum") {
  auto p = params(1.0, -std::log(2.0));
  CHECK(wick_constant(p, 3) == Approx(9.84093935756088188).epsilon(1e-12));
  CHECK(wick_constant(p, 3, true) == Approx(9.84093935756088188 / std::pow(2 * M_PI, 3)).epsilon(1e-12));
  // direct momentum quadrature of the d = 3 integrand (radial)
  double radial = 0;
  const int n = 200000;
  const double pmax = 40;
  for (int i = 0; i < n; ++i) {
    const double pr = (i + 0.5) * pmax / n;
    const double K = pr * pr / 2 + std::log(2.0);
    radial += 4 * M_PI * pr * pr * std::exp(-K) / (1 - std::exp(-K)) * pmax / n;
  }
  CHECK(wick_constant(p, 3) == Approx(radial).epsilon(1e-8));
  double prev = 1e300;
  for (double beta = 0.5; beta < 5; beta += 0.5) {
    const double c = wick_constant(params(beta, -0.3), 3);
    CHECK(c < prev);
    prev = c;
  }
  CHECK(wick_constant(params(1.0, -80.0), 3) < 1e-30);
  CHECK_THROWS_AS(wick_constant(params(1.0, 0.0), 3), DomainError);

  CHECK(4 * M_PI / std::pow(2 * M_PI, 3) * std::sqrt(M_PI / 2) == Approx(std::pow(2 * M_PI, -1.5)).epsilon(1e-15));
  ModelParams q = params(1.0, -1.0);
  q.epsilon = 0.1;
  CHECK(weight_sum(q, 3) == Approx(0.103899551382409957).epsilon(1e-12));
  q.epsilon = 40;
  CHECK(weight_sum(q, 3) == Approx(std::pow(2 * M_PI, -1.5) * std::exp(-40.0)).epsilon(1e-12));
}

TEST_CASE("default winding cutoff drops less than 1e-12") {
  const int n = default_winding_cutoff(1.0, -0.5);
  CHECK(std::exp(-0.5 * n) < 1e-12);
  CHECK(std::exp(-0.5 * (n - 1)) >= 1e-12);
}
