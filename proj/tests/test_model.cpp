#include "doctest.h"

#include "bosekms/config.hpp"
#include "bosekms/model.hpp"

#include <cmath>
#include <random>

using namespace bosekms;
using doctest::Approx;

namespace {
bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }
}  // namespace

TEST_CASE("polylog against high-precision values") {
  // mpmath, 30 digits
  CHECK(polylog(1.5, 0.0) == 0.0);
  CHECK(rel_close(polylog(1.0, 0.5), std::log(2.0), 1e-14));
  CHECK(rel_close(polylog(1.5, 1.0), 2.61237534868548834, 1e-12));
  CHECK(rel_close(polylog(1.5, 0.5), 0.624837020819913854, 1e-12));
  CHECK(rel_close(polylog(0.5, 0.9), 4.02195042747336132, 1e-10));
  CHECK(rel_close(polylog(0.5, 0.3), 0.384777445134208993, 1e-12));
  CHECK(rel_close(polylog(1.5, 0.999), 2.50170846534135563, 1e-10));
  CHECK(rel_close(polylog(2.5, 0.95), 1.23302742258733866, 1e-10));
  CHECK(rel_close(polylog(3.0, 0.8), 0.910605855405841807, 1e-12));
  CHECK(rel_close(polylog(0.5, 0.99999), 559.037367959238985, 1e-10));
}

TEST_CASE("polylog slightly above s = 1 approaches -log(1-y)") {
  const double y = 0.5;
  CHECK(std::abs(polylog(1.0 + 1e-7, y) - std::log(2.0)) < 1e-6);
}

TEST_CASE("polylog domain") {
  CHECK_THROWS_AS(polylog(1.5, 1.01), DomainError);
  CHECK_THROWS_AS(polylog(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(polylog(0.5, 1.0), DomainError);
  CHECK_THROWS_AS(polylog(1.5, -0.1), DomainError);
}

TEST_CASE("polylog is increasing in y and decreasing in s") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ys(0.01, 0.99), ss(1.05, 4.0);
  for (int i = 0; i < 200; ++i) {
    const double y1 = ys(rng), y2 = ys(rng), s1 = ss(rng), s2 = ss(rng);
    if (y1 < y2) CHECK(polylog(s1, y1) < polylog(s1, y2));
    if (s1 < s2) CHECK(polylog(s1, y1) > polylog(s2, y1));
  }
}

TEST_CASE("grid index maps are bijections") {
  for (int d = 1; d <= 3; ++d) {
    GridSpec g(d, 5, 2.5, 4, 1.0);
    for (std::size_t s = 0; s < g.n_spatial(); ++s) {
      CHECK(g.ravel(g.unravel(s)) == s);
      CHECK(g.index_of(g.coord(s)) == s);
    }
  }
  GridSpec g(1, 8, 4.0, 4, 2.0);
  CHECK(g.spacing() == Approx(0.5));
  CHECK(g.dt() == Approx(0.5));
  CHECK(g.momentum_label(0)[0] == -4);
  CHECK(g.momentum(7)[0] == Approx(2 * M_PI * 3 / 4.0));
  CHECK(g.displacement(7, 0)[0] == Approx(-0.5));
  CHECK(g.slice_index(3, 2) == 19u);
}

TEST_CASE("model parameter invariants") {
  ModelParams p;
  p.mu = 0.5;
  CHECK_THROWS_AS(p.validate(), InvariantError);
  p.mu = -1;
  p.epsilon = 0;
  try {
    p.validate();
    FAIL("expected an invariant error");
  } catch (const InvariantError& e) {
    CHECK(e.name == "mu_rr = -epsilon < 0");
  }
  p.epsilon = 0.5;
  p.condensate = true;
  p.mu_tilde = 2.0;
  p.phi0 = 1.0;
  CHECK_NOTHROW(p.check_condensate(2.0));
  CHECK_THROWS_AS(p.check_condensate(1.0), InvariantError);
  CHECK(p.mu_eff() == -0.5);
}

TEST_CASE("built-in potentials are positive type and peak at the origin") {
  for (int d = 1; d <= 2; ++d) {
    GridSpec g(d, 8, 4.0, 2, 1.0);
    for (const auto& v : {Potential::gaussian(2.0, 0.7), Potential::bump(1.5, 1.1)}) {
      const Eigen::VectorXd vhat = v.transform(g);
      const Eigen::VectorXd vx = v.on_grid(g);
      CHECK(vhat.minCoeff() >= -1e-12 * vx(0));
      CHECK(vx.maxCoeff() == Approx(vx(0)));
      const Eigen::MatrixXd P = v.pair_matrix(g);
      CHECK((P - P.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("norms") {
  GridSpec g(1, 8, 4.0, 4, 2.0);
  const auto zero = Potential::gaussian(0.0, 1.0);
  const auto cut = Cutoff::single_site(g, 3);
  auto n = norms(zero, cut, g);
  CHECK(n.v0 == 0.0);
  CHECK(n.v_l1 == 0.0);
  CHECK(n.vtilde_gg == 0.0);
  CHECK(n.g_l1 == Approx(g.spacing()));

  // a very wide gaussian is flat over a small plateau: vtilde -> beta v0 ||g||_1^2
  GridSpec g3(3, 16, 16.0, 2, 1.5);
  const auto wide = Potential::gaussian(1.0, 400.0);
  const auto plat = Cutoff::plateau(g3, {8, 8, 8}, 1.0, 0.0);
  const auto n3 = norms(wide, plat, g3);
  double brute = 0;
  const Eigen::VectorXd vx = wide.on_grid(g3);
  for (std::size_t i = 0; i < g3.n_spatial(); ++i)
    for (std::size_t j = 0; j < g3.n_spatial(); ++j)
      if (plat.g(i) > 0 && plat.g(j) > 0) brute += plat.g(i) * plat.g(j) * wide.at(g3.displacement(i, j), 3, 16.0);
  CHECK(n3.vtilde_gg == Approx(1.5 * brute * std::pow(g3.cell_volume(), 2)).epsilon(1e-12));
  CHECK(n3.vtilde_gg == Approx(1.5 * n3.v0 * n3.g_l1 * n3.g_l1).epsilon(1e-4));

  GridSpec other(1, 6, 4.0, 4, 2.0);
  CHECK_THROWS_AS(norms(zero, cut, other), ShapeError);
}

TEST_CASE("cutoff invariants") {
  GridSpec g(1, 16, 8.0, 4, 1.0);
  const auto c = Cutoff::plateau(g, {4.0, 0, 0}, 1.0, 1.0);
  CHECK(c.g.maxCoeff() == 1.0);
  CHECK(c.g.minCoeff() >= 0.0);
  for (int s = 0; s < 16; ++s)
    if (c.g(s) > 0) CHECK(c.chi(s) == 1.0);
  Cutoff bad = c;
  bad.chi.setZero();
  CHECK_THROWS_AS(bad.validate(g), InvariantError);
}

TEST_CASE("config loader validates and names invariants") {
  const std::string good = R"([model]
beta = 2
mu = -0.5
epsilon = 0.4
phi0 = 0
coupling = 0.1
[grid]
dim = 1
n_sites = 8
box_length = 8
n_time = 4
[potential]
shape = gaussian
height = 0.5
width = 1.0
[cutoff]
kind = plateau
center = 4
plateau = 1
ramp = 1
)";
  const Config cfg = parse_config(good);
  CHECK(cfg.model.beta == 2.0);
  CHECK(cfg.grid.n_time() == 4);
  CHECK(cfg.grid.beta() == 2.0);
  CHECK(cfg.potential.height() == 0.5);
  CHECK(config_hash(good) == config_hash(good));
  CHECK(config_hash(good) != config_hash(good + " "));

  std::string bad = good;
  bad.replace(bad.find("mu = -0.5"), 9, "mu = 0.5 ");
  try {
    parse_config(bad);
    FAIL("expected failure");
  } catch (const InvariantError& e) {
    CHECK(e.name == "mu <= 0");
  }
  CHECK_THROWS_AS(parse_config("[model]\nmu = -1\n"), InvariantError);
}
