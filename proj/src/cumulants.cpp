#include "bosekms/cumulants.hpp"

#include "bosekms/model.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace bosekms {

std::uint64_t bell_number(int n) {
  if (n < 0 || n > 25) throw LimitError("bell_number: 0 <= n <= 25");
  std::vector<std::uint64_t> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (auto x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.front();
}

std::vector<Partition> enumerate_partitions(int n) {
  if (n < 1 || n > 12) throw LimitError("enumerate_partitions: 1 <= n <= 12");
  std::vector<Partition> out;
  out.reserve(bell_number(n));
  // restricted-growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1])
  std::vector<int> a(n, 0), maxp(n, 0);
  while (true) {
    Partition p;
    const int nb = *std::max_element(a.begin(), a.end()) + 1;
    p.blocks.assign(nb, {});
    for (int i = 0; i < n; ++i) p.blocks[a[i]].push_back(i);
    out.push_back(std::move(p));
    int i = n - 1;
    while (i > 0 && a[i] == maxp[i - 1] + 1) --i;
    if (i == 0) break;
    ++a[i];
    maxp[i] = std::max(maxp[i - 1], a[i]);
    for (int j = i + 1; j < n; ++j) {
      a[j] = 0;
      maxp[j] = maxp[j - 1];
    }
  }
  return out;
}

bool Graph::connected() const {
  if (n_vertices <= 1) return true;
  std::vector<std::vector<int>> adj(n_vertices);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> seen(n_vertices, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        q.push(w);
      }
  }
  return count == n_vertices;
}

std::vector<Graph> enumerate_connected_graphs(int n) {
  if (n < 1 || n > 7) throw LimitError("enumerate_connected_graphs: 1 <= n <= 7");
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
  std::vector<Graph> out;
  const std::uint64_t total = std::uint64_t{1} << slots.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    Graph g{n, {}};
    for (std::size_t e = 0; e < slots.size(); ++e)
      if (mask >> e & 1) g.edges.push_back(slots[e]);
    if (g.connected()) out.push_back(std::move(g));
  }
  return out;
}

namespace {
std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

std::uint64_t connected_graph_count(int n) {
  if (n < 1 || n > 10) throw LimitError("connected_graph_count: 1 <= n <= 10");
  std::vector<std::uint64_t> c(n + 1, 0);
  for (int m = 1; m <= n; ++m) {
    std::uint64_t all = std::uint64_t{1} << (m * (m - 1) / 2);
    for (int k = 1; k < m; ++k) all -= binom(m - 1, k - 1) * c[k] * (std::uint64_t{1} << ((m - k) * (m - k - 1) / 2));
    c[m] = all;
  }
  return c[n];
}

// m_n = sum_{k=1}^n C(n-1,k-1) k_k m_{n-k}, with m_0 = 1
std::vector<double> cumulants_from_moments(const std::vector<double>& moments) {
  const int n = static_cast<int>(moments.size());
  if (n > 20) throw LimitError("cumulants_from_moments: order <= 20");
  std::vector<double> m(n + 1, 1.0), k(n + 1, 0.0);
  for (int i = 1; i <= n; ++i) {
    if (!std::isfinite(moments[i - 1])) throw InvariantError("moment table", "missing or non-finite moment");
    m[i] = moments[i - 1];
  }
  for (int i = 1; i <= n; ++i) {
    double acc = m[i];
    for (int j = 1; j < i; ++j) acc -= static_cast<double>(binom(i - 1, j - 1)) * k[j] * m[i - j];
    k[i] = acc;
  }
  return {k.begin() + 1, k.end()};
}

std::vector<double> moments_from_cumulants(const std::vector<double>& cumulants) {
  const int n = static_cast<int>(cumulants.size());
  if (n > 20) throw LimitError("moments_from_cumulants: order <= 20");
  std::vector<double> m(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) {
    double acc = 0.0;
    for (int j = 1; j <= i; ++j) acc += static_cast<double>(binom(i - 1, j - 1)) * cumulants[j - 1] * m[i - j];
    m[i] = acc;
  }
  return {m.begin() + 1, m.end()};
}

double joint_cumulant(const MixedMoment& moment, int n) {
  if (n < 1 || n > 12) throw LimitError("joint_cumulant: 1 <= n <= 12");
  const unsigned full = (1u << n) - 1;
  std::vector<double> m(full + 1, 0.0), k(full + 1, 0.0);
  m[0] = 1.0;
  std::vector<int> idx;
  for (unsigned s = 1; s <= full; ++s) {
    idx.clear();
    for (int i = 0; i < n; ++i)
      if (s >> i & 1) idx.push_back(i);
    m[s] = moment(idx);
  }
  // m(S) = sum_{T subset S containing min S} k(T) m(S \ T)
  for (unsigned s = 1; s <= full; ++s) {
    const unsigned low = s & (~s + 1);
    const unsigned rest = s ^ low;
    double acc = m[s];
    for (unsigned t = (rest - 1) & rest;; t = (t - 1) & rest) {
      // T = low | t with T != S
      if (t != rest) acc -= k[low | t] * m[rest ^ t];
      if (t == 0) break;
    }
    k[s] = acc;
  }
  return k[full];
}

namespace {

struct Slot {
  int vertex;
  int pos;  // position in operator order
};

struct Contractor {
  const std::vector<Vertex>& vs;
  const KernelPair& kp;
  std::vector<Slot> psi, star;       // Psi slots and Psi* slots
  std::vector<int> psi_of, star_of;  // slot index per vertex (-1 if none)

  Contractor(const std::vector<Vertex>& v, const KernelPair& k) : vs(v), kp(k) {
    const int n = static_cast<int>(vs.size());
    psi_of.assign(n, -1);
    star_of.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      switch (vs[i].kind) {
        case VertexKind::psi:
          psi_of[i] = static_cast<int>(psi.size());
          psi.push_back({i, 2 * i});
          break;
        case VertexKind::psi_star:
          star_of[i] = static_cast<int>(star.size());
          star.push_back({i, 2 * i});
          break;
        case VertexKind::density:
          star_of[i] = static_cast<int>(star.size());
          star.push_back({i, 2 * i});
          psi_of[i] = static_cast<int>(psi.size());
          psi.push_back({i, 2 * i + 1});
          break;
      }
    }
  }

  const Eigen::MatrixXd& edge(int psi_slot, int star_slot) const {
    return psi[psi_slot].pos < star[star_slot].pos ? kp.minus : kp.plus;
  }

  bool connected(const std::vector<int>& sigma) const {
    const int n = static_cast<int>(vs.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (std::size_t i = 0; i < sigma.size(); ++i) parent[find(psi[i].vertex)] = find(star[sigma[i]].vertex);
    for (int i = 1; i < n; ++i)
      if (find(i) != find(0)) return false;
    return true;
  }

  double weight(const std::vector<int>& sigma) const {
    const int n = static_cast<int>(vs.size());
    std::vector<bool> done(n, false);
    double value = 1.0;
    // chains start at linear Psi vertices and end at linear Psi* vertices
    for (int v = 0; v < n; ++v) {
      if (vs[v].kind != VertexKind::psi) continue;
      Eigen::RowVectorXd row = vs[v].f.transpose() * kp.cell_volume;
      done[v] = true;
      int slot = psi_of[v];
      while (true) {
        const int s = sigma[slot];
        const int w = star[s].vertex;
        row = row * edge(slot, s);
        done[w] = true;
        if (vs[w].kind == VertexKind::psi_star) {
          value *= row.dot(vs[w].f);
          break;
        }
        row = row.cwiseProduct(vs[w].f.transpose());
        slot = psi_of[w];
      }
    }
    for (int v = 0; v < n; ++v) {
      if (done[v]) continue;
      // closed loop through density vertices: Tr(prod diag(f) E)
      Eigen::MatrixXd acc = vs[v].f.asDiagonal();
      int cur = v;
      done[v] = true;
      while (true) {
        const int slot = psi_of[cur];
        const int s = sigma[slot];
        const int w = star[s].vertex;
        acc = acc * edge(slot, s);
        if (w == v) break;
        acc = acc * vs[w].f.asDiagonal();
        done[w] = true;
        cur = w;
      }
      value *= acc.trace();
    }
    return value;
  }

  double sum(bool connected_only) const {
    if (psi.size() != star.size()) return 0.0;
    std::vector<int> sigma(psi.size());
    std::iota(sigma.begin(), sigma.end(), 0);
    double total = 0.0;
    do {
      if (connected_only && !connected(sigma)) continue;
      total += weight(sigma);
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
  }
};

void check_vertices(const std::vector<Vertex>& vs, const KernelPair& kp) {
  if (vs.size() > 6) throw LimitError("connected_correlation_graph_sum: at most 6 vertices");
  for (const auto& v : vs)
    if (v.f.size() != kp.minus.rows()) throw ShapeError("vertex function does not match kernel size");
}

}  // namespace

double connected_correlation_graph_sum(const std::vector<Vertex>& vertices, const KernelPair& kernels) {
  check_vertices(vertices, kernels);
  if (vertices.empty()) return 0.0;
  return Contractor(vertices, kernels).sum(true);
}

double wick_moment(const std::vector<Vertex>& vertices, const KernelPair& kernels) {
  check_vertices(vertices, kernels);
  if (vertices.empty()) return 1.0;
  return Contractor(vertices, kernels).sum(false);
}

std::uint64_t count_wick_pairings(FieldType kind, int n) {
  if (n < 0 || n > 40) throw LimitError("count_wick_pairings: 0 <= n <= 40");
  std::uint64_t r = 1;
  if (kind == FieldType::charged) {
    if (n > 20) throw LimitError("count_wick_pairings: n! overflows beyond 20");
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
  }
  if (n % 2) return 0;
  for (int i = n - 1; i > 1; i -= 2) r *= i;
  return r;
}

void for_each_pairing(int n, const std::function<void(const std::vector<std::pair<int, int>>&)>& visit) {
  if (n % 2) return;
  std::vector<std::pair<int, int>> cur;
  std::vector<bool> used(n, false);
  std::function<void()> rec = [&]() {
    int first = 0;
    while (first < n && used[first]) ++first;
    if (first == n) {
      visit(cur);
      return;
    }
    used[first] = true;
    for (int j = first + 1; j < n; ++j) {
      if (used[j]) continue;
      used[j] = true;
      cur.emplace_back(first, j);
      rec();
      cur.pop_back();
      used[j] = false;
    }
    used[first] = false;
  };
  rec();
}

}  // namespace bosekms
