#pragma once

// Set partitions, connected labeled graphs, moment/cumulant conversion and
// Wick-contraction graph sums for quasi-free lattice states.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace bosekms {

/// Blocks of {0..n-1}, each ascending, ordered by least element.
struct Partition {
  std::vector<std::vector<int>> blocks;
  bool operator==(const Partition&) const = default;
};

std::uint64_t bell_number(int n);  // Bell triangle, n <= 25
std::vector<Partition> enumerate_partitions(int n);

struct Graph {
  int n_vertices = 0;
  std::vector<std::pair<int, int>> edges;  // i < j
  bool connected() const;
};

std::vector<Graph> enumerate_connected_graphs(int n);
/// c_n = 2^{C(n,2)} - sum_{k<n} C(n-1,k-1) c_k 2^{C(n-k,2)}.
std::uint64_t connected_graph_count(int n);

/// Scalar moments m_1..m_n -> cumulants k_1..k_n (index 0 holds order 1).
std::vector<double> cumulants_from_moments(const std::vector<double>& moments);
std::vector<double> moments_from_cumulants(const std::vector<double>& cumulants);

/// Mixed moment of the observables whose indices are listed (ascending).
using MixedMoment = std::function<double(const std::vector<int>&)>;
/// Joint cumulant of observables 0..n-1 by the partition recursion.
double joint_cumulant(const MixedMoment& moment, int n);

enum class VertexKind { psi, psi_star, density };

/// Psi(f), Psi*(f) or |Psi|^2(f) = sum_x f(x) Psi*(x) Psi(x) a^d.
struct Vertex {
  VertexKind kind;
  Eigen::VectorXd f;
};

/// The two equal-time edge kernels as operator matrices (kernel values times a^d):
/// omega(Psi(x) Psi*(y)) = minus, omega(Psi*(y) Psi(x)) = plus.
struct KernelPair {
  Eigen::MatrixXd minus, plus;
  double cell_volume = 1.0;
};

/// Connected correlation of the vertex product (operator order as listed):
/// the sum over Wick contractions whose vertex graph is connected.
double connected_correlation_graph_sum(const std::vector<Vertex>& vertices, const KernelPair& kernels);
/// Full (disconnected included) correlation by the same contraction engine.
double wick_moment(const std::vector<Vertex>& vertices, const KernelPair& kernels);

enum class FieldType { real, charged };
/// real: number of pairings of `n` real field factors ((n-1)!! or 0 for odd n);
/// charged: pairings of n Phi with n Phi* (n!).
std::uint64_t count_wick_pairings(FieldType kind, int n);

/// Calls `visit` with every perfect matching of {0..n-1} as a list of pairs.
void for_each_pairing(int n, const std::function<void(const std::vector<std::pair<int, int>>&)>& visit);

}  // namespace bosekms
