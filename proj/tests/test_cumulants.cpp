#include "doctest.h"

#include "bosekms/cumulants.hpp"
#include "bosekms/dyson.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace bosekms;
using doctest::Approx;

namespace {

// Moebius inversion on the partition lattice: k(S) = sum_pi (-1)^{|pi|-1} (|pi|-1)! prod m(B).
double moebius_cumulant(const std::vector<double>& moments, int n) {
  double k = 0;
  for (const auto& p : enumerate_partitions(n)) {
    const int b = static_cast<int>(p.blocks.size());
    double term = std::tgamma(b) * ((b % 2) ? 1 : -1);
    for (const auto& blk : p.blocks) term *= moments[blk.size() - 1];
    k += term;
  }
  return k;
}

}  // namespace

TEST_CASE("partitions") {
  CHECK(enumerate_partitions(1).size() == 1);
  CHECK(enumerate_partitions(3).size() == 5);
  CHECK(enumerate_partitions(4).size() == 15);
  for (int n = 1; n <= 10; ++n) CHECK(enumerate_partitions(n).size() == bell_number(n));
  CHECK(bell_number(12) == 4213597u);
  // canonical and unique
  const auto ps = enumerate_partitions(6);
  std::set<std::vector<std::vector<int>>> seen;
  for (const auto& p : ps) {
    CHECK(seen.insert(p.blocks).second);
    std::vector<int> all;
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      CHECK(std::is_sorted(p.blocks[b].begin(), p.blocks[b].end()));
      if (b) CHECK(p.blocks[b - 1].front() < p.blocks[b].front());
      all.insert(all.end(), p.blocks[b].begin(), p.blocks[b].end());
    }
    std::sort(all.begin(), all.end());
    std::vector<int> want(6);
    std::iota(want.begin(), want.end(), 0);
    CHECK(all == want);
  }
  CHECK_THROWS_AS(enumerate_partitions(13), LimitError);
  CHECK_THROWS_AS(enumerate_partitions(0), LimitError);
}

TEST_CASE("connected graphs") {
  const std::uint64_t expected[] = {1, 1, 4, 38, 728, 26704};
  for (int n = 1; n <= 6; ++n) {
    CHECK(enumerate_connected_graphs(n).size() == expected[n - 1]);
    CHECK(connected_graph_count(n) == expected[n - 1]);
  }
  CHECK(connected_graph_count(7) == 1866256u);
  Graph g{4, {{0, 1}, {2, 3}}};
  CHECK_FALSE(g.connected());
  g.edges.push_back({1, 2});
  CHECK(g.connected());
  CHECK(Graph{1, {}}.connected());
  CHECK_THROWS_AS(enumerate_connected_graphs(8), LimitError);
}

TEST_CASE("moment <-> cumulant conversion") {
  const double s2 = 1.7;
  const auto k = cumulants_from_moments({0.0, s2, 0.0, 3 * s2 * s2});
  CHECK(k[1] == Approx(s2));
  CHECK(std::abs(k[2]) < 1e-15);
  CHECK(std::abs(k[3]) < 1e-12);
  const auto k2 = cumulants_from_moments({0.4, 1.0});
  CHECK(k2[1] == Approx(1.0 - 0.16));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> m(6);
    for (auto& x : m) x = u(rng);
    const auto kk = cumulants_from_moments(m);
    const auto back = moments_from_cumulants(kk);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(back[i] - m[i]) <= 1e-12 * std::max(1.0, std::abs(m[i])));
    CHECK(kk[4] == Approx(moebius_cumulant(m, 5)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cumulants_from_moments({1.0, std::nan("")}), InvariantError);
}

TEST_CASE("joint cumulant of a mixed-moment callback") {
  // independent blocks: observables {0,1} and {2} independent => joint cumulant vanishes
  auto indep = [](const std::vector<int>& idx) {
    double a = 1, b = 1;
    int n01 = 0, n2 = 0;
    for (int i : idx) (i < 2 ? n01 : n2)++;
    const double m01[] = {1, 0.3, 1.2};
    const double m2[] = {1, 0.5};
    a = m01[n01];
    b = m2[n2];
    return a * b;
  };
  CHECK(std::abs(joint_cumulant(indep, 3)) < 1e-15);
  // scalar case agrees with the scalar converter
  const std::vector<double> m = {0.2, 1.1, -0.4, 2.5, 0.7};
  auto scalar = [&](const std::vector<int>& idx) { return m[idx.size() - 1]; };
  CHECK(joint_cumulant(scalar, 5) == Approx(cumulants_from_moments(m)[4]).epsilon(1e-12));
}

TEST_CASE("wick pairing counts against brute force") {
  CHECK(count_wick_pairings(FieldType::real, 4) == 3);
  CHECK(count_wick_pairings(FieldType::real, 5) == 0);
  CHECK(count_wick_pairings(FieldType::charged, 3) == 6);
  for (int N = 0; N <= 6; ++N) {
    // real: set partitions of 2N points with all blocks of size 2
    std::uint64_t brute = N == 0 ? 1 : 0;
    if (N > 0)
      for (const auto& p : enumerate_partitions(2 * N))
        brute += std::all_of(p.blocks.begin(), p.blocks.end(), [](const auto& b) { return b.size() == 2; });
    CHECK(count_wick_pairings(FieldType::real, 2 * N) == brute);
    std::uint64_t visited = 0;
    for_each_pairing(2 * N, [&](const auto&) { ++visited; });
    CHECK(visited == brute);
    // charged: bijections Phi -> Phi*
    std::vector<int> sigma(N);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::uint64_t bij = 0;
    do ++bij;
    while (std::next_permutation(sigma.begin(), sigma.end()));
    CHECK(count_wick_pairings(FieldType::charged, N) == bij);
  }
  // factorial growth: (2N-1)!! / N! grows like 2^N
  for (int N = 2; N <= 10; ++N)
    CHECK(static_cast<double>(count_wick_pairings(FieldType::real, 2 * N)) /
              count_wick_pairings(FieldType::charged, N) >=
          std::pow(2.0, N) / std::sqrt(M_PI * N) * 0.5);
}

namespace {

struct TinyLattice {
  GridSpec grid{1, 4, 2.0, 2, 1.0};
  KernelPair kp;
  Eigen::MatrixXd kminus, kplus;  // kernel values
  TinyLattice() {
    ModelParams p;
    p.beta = 1.0;
    p.mu = -0.8;
    const auto free = build_kernel(p, grid);
    kp.minus = free.spatial_operator(0.0);
    kp.plus = free.spatial_operator(0.0, true);
    kp.cell_volume = grid.cell_volume();
    kminus = kp.minus / grid.cell_volume();
    kplus = kp.plus / grid.cell_volume();
  }
};

// Brute-force Wick expansion with explicit site sums.
double brute_moment(const TinyLattice& t, const std::vector<Vertex>& vs) {
  struct Slot {
    int vertex, pos;
  };
  std::vector<Slot> psi, star;
  for (int i = 0; i < static_cast<int>(vs.size()); ++i) {
    if (vs[i].kind == VertexKind::psi) psi.push_back({i, 2 * i});
    if (vs[i].kind == VertexKind::psi_star) star.push_back({i, 2 * i});
    if (vs[i].kind == VertexKind::density) {
      star.push_back({i, 2 * i});
      psi.push_back({i, 2 * i + 1});
    }
  }
  if (psi.size() != star.size()) return 0.0;
  const int n = static_cast<int>(vs.size());
  const int N = 4;
  double total = 0;
  std::vector<int> site(n, 0);
  const double ad = t.grid.cell_volume();
  while (true) {
    double fprod = 1;
    for (int i = 0; i < n; ++i) fprod *= vs[i].f(site[i]) * ad;
    std::vector<int> sigma(psi.size());
    std::iota(sigma.begin(), sigma.end(), 0);
    double contractions = 0;
    do {
      double prod = 1;
      for (std::size_t a = 0; a < psi.size(); ++a) {
        const auto& p = psi[a];
        const auto& s = star[sigma[a]];
        const double kv = p.pos < s.pos ? t.kminus(site[p.vertex], site[s.vertex]) : t.kplus(site[s.vertex], site[p.vertex]);
        prod *= kv;
      }
      contractions += prod;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    total += fprod * contractions;
    int k = 0;
    while (k < n && ++site[k] == N) site[k++] = 0;
    if (k == n) break;
  }
  return total;
}

}  // namespace

TEST_CASE("graph-sum connected correlations") {
  TinyLattice t;
  Eigen::VectorXd f(4), h(4), e(4);
  f << 0.3, -1.0, 0.7, 0.2;
  h << 1.1, 0.4, -0.3, 0.9;
  e << 0.5, 0.25, -0.6, 1.3;
  const double ad = t.grid.cell_volume();

  // single density vertex: sum_x f(x) B+(x,x) a^d
  CHECK(connected_correlation_graph_sum({{VertexKind::density, f}}, t.kp) ==
        Approx(f.sum() * t.kplus(0, 0) * ad).epsilon(1e-14));
  // Psi(f) Psi*(h) -> <f, B- h>
  CHECK(connected_correlation_graph_sum({{VertexKind::psi, f}, {VertexKind::psi_star, h}}, t.kp) ==
        Approx(f.dot(t.kminus * h) * ad * ad).epsilon(1e-14));

  // three quadratic vertices: brute-force moments + partition cumulants
  const std::vector<Vertex> vs = {{VertexKind::density, f}, {VertexKind::density, h}, {VertexKind::density, e}};
  auto moment = [&](const std::vector<int>& idx) {
    std::vector<Vertex> sub;
    for (int i : idx) sub.push_back(vs[i]);
    return brute_moment(t, sub);
  };
  const double oracle = joint_cumulant(moment, 3);
  CHECK(connected_correlation_graph_sum(vs, t.kp) == Approx(oracle).epsilon(1e-12));
  CHECK(wick_moment(vs, t.kp) == Approx(brute_moment(t, vs)).epsilon(1e-12));

  // mixed linear and quadratic vertices
  const std::vector<Vertex> mixed = {{VertexKind::psi, f}, {VertexKind::density, h}, {VertexKind::psi_star, e},
                                     {VertexKind::density, f}};
  auto moment2 = [&](const std::vector<int>& idx) {
    std::vector<Vertex> sub;
    for (int i : idx) sub.push_back(mixed[i]);
    return brute_moment(t, sub);
  };
  CHECK(connected_correlation_graph_sum(mixed, t.kp) == Approx(joint_cumulant(moment2, 4)).epsilon(1e-12));
  // unequal numbers of Psi and Psi*
  CHECK(connected_correlation_graph_sum({{VertexKind::psi, f}, {VertexKind::density, h}}, t.kp) == 0.0);
}
