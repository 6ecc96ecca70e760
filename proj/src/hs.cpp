#include "bosekms/hs.hpp"

#include "bosekms/cumulants.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

namespace bosekms {

double vtilde(const GridSpec& grid, const Potential& v, const LatticeField& b1, const LatticeField& b2) {
  b1.check_shape(grid);
  b2.check_shape(grid);
  const Eigen::MatrixXd V = v.pair_matrix(grid);
  const double ad = grid.cell_volume();
  return (b1.values.transpose() * V * b2.values).trace() * ad * ad * grid.dt();
}

double gamma_exponentials(const GridSpec& grid, const Potential& v, const std::vector<LatticeField>& bs) {
  double s = 0.0;
  for (const auto& a : bs)
    for (const auto& b : bs) s += vtilde(grid, v, a, b);
  return std::exp(-0.5 * s);
}

double gamma_polynomial(const GridSpec& grid, const Potential& v, const std::vector<LatticeField>& factors) {
  const int n = static_cast<int>(factors.size());
  if (n > 12) throw LimitError("gamma_polynomial: total degree <= 12");
  if (n % 2) return 0.0;
  if (n == 0) return 1.0;
  Eigen::MatrixXd table(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) table(i, j) = table(j, i) = vtilde(grid, v, factors[i], factors[j]);
  double total = 0.0;
  for_each_pairing(n, [&](const std::vector<std::pair<int, int>>& pairs) {
    double prod = 1.0;
    for (auto [a, b] : pairs) prod *= table(a, b);
    total += prod;
  });
  return total;
}

GaussianCovariance::GaussianCovariance(const GridSpec& grid, const Potential& v, double coupling)
    : grid_(grid), coupling_(coupling) {
  if (!(coupling >= 0)) throw DomainError("GaussianCovariance: coupling >= 0");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(coupling * v.pair_matrix(grid));
  const Eigen::VectorXd lam = es.eigenvalues();
  const double scale = std::max(1e-300, lam.cwiseAbs().maxCoeff());
  if (lam.minCoeff() < -1e-10 * scale) throw InvariantError("positive-type potential", "covariance has a negative mode");
  factor_ = es.eigenvectors() * lam.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Eigen::MatrixXd GaussianCovariance::matrix() const {
  const auto N = static_cast<Eigen::Index>(grid_.n_spatial());
  const int M = grid_.n_time();
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(N * M, N * M);
  const Eigen::MatrixXd S = factor_ * factor_.transpose() / grid_.dt();
  for (int j = 0; j < M; ++j) C.block(j * N, j * N, N, N) = S;
  return C;
}

LatticeField GaussianCovariance::sample(CounterRng& rng) const {
  const auto N = static_cast<Eigen::Index>(grid_.n_spatial());
  std::normal_distribution<double> normal(0.0, 1.0);
  LatticeField A(grid_);
  Eigen::VectorXd z(N);
  const double inv = 1.0 / std::sqrt(grid_.dt());
  for (int j = 0; j < grid_.n_time(); ++j) {
    for (Eigen::Index k = 0; k < N; ++k) z(k) = normal(rng);
    A.values.col(j) = factor_ * z * inv;
  }
  return A;
}

namespace {

template <class Fn>
void parallel_for(std::size_t total, int workers, Fn&& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || total < 2) {
    fn(std::size_t{0}, total);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (total + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t b = std::min(total, w * chunk), e = std::min(total, (w + 1) * chunk);
    if (b < e) pool.emplace_back(fn, b, e);
  }
  for (auto& t : pool) t.join();
}

struct MeanError {
  double mean = 0, error = 0;
};

MeanError mean_error(const std::vector<double>& xs) {
  MeanError r;
  long n = 0;
  double sum = 0;
  for (double x : xs)
    if (std::isfinite(x)) {
      sum += x;
      ++n;
    }
  if (n == 0) return r;
  r.mean = sum / n;
  double sq = 0;
  for (double x : xs)
    if (std::isfinite(x)) sq += (x - r.mean) * (x - r.mean);
  r.error = n > 1 ? std::sqrt(sq / (n - 1) / n) : 0.0;
  return r;
}

// log det(1 + X) with a sign check; X small enough that the determinant stays positive.
double log_det_one_plus(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, bool& positive) {
  const Eigen::VectorXd d = lu.matrixLU().diagonal();
  double s = 0.0;
  int negatives = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    s += std::log(std::abs(d(i)));
    if (d(i) < 0) ++negatives;
  }
  // permutation sign
  const int perm_sign = lu.permutationP().determinant();
  positive = ((negatives % 2 == 0) ? 1 : -1) * perm_sign > 0;
  return s;
}

struct SampleContext {
  const PropagatorKernel& free;
  Eigen::MatrixXd D;
  Eigen::VectorXd g_all;  // cutoff broadcast to slice space
  GaussianCovariance unit;
  double weight;  // a^d du

  SampleContext(const PropagatorKernel& f, const Potential& v, const Cutoff& cutoff)
      : free(f), D(free_slice_operator(f)), unit(f.grid(), v, 1.0), weight(f.grid().cell_volume() * f.grid().dt()) {
    const auto& g = f.grid();
    const auto N = static_cast<Eigen::Index>(g.n_spatial());
    g_all.resize(N * g.n_time());
    for (int j = 0; j < g.n_time(); ++j) g_all.segment(j * N, N) = cutoff.g;
  }
};

}  // namespace

PartitionEstimate partition_mc(const PropagatorKernel& free, const Potential& v, const Cutoff& cutoff,
                               double coupling, double phi0, long samples, std::uint64_t seed,
                               const PartitionOptions& options) {
  const auto& grid = free.grid();
  cutoff.validate(grid);
  if (samples < 2) throw DomainError("partition_mc: samples >= 2");
  if (!(coupling >= 0)) throw DomainError("partition_mc: coupling >= 0");
  if (grid.n_slice_space() > 4096) throw LimitError("dense slice-space operators capped at 4096 rows");
  const SampleContext ctx(free, v, cutoff);
  const double s = std::sqrt(coupling);
  const double beta = free.beta();
  const auto n = static_cast<Eigen::Index>(grid.n_slice_space());

  std::vector<double> zval(samples), f2(samples), f4(samples);
  parallel_for(static_cast<std::size_t>(samples), options.workers, [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd M1(n, n), M2(n, n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t k = begin; k < end; ++k) {
      CounterRng rng(seed, 0, k);
      const Eigen::VectorXd a = ctx.unit.sample(rng).flat().cwiseProduct(ctx.g_all);
      M1.noalias() = ctx.D * a.asDiagonal();
      M2.noalias() = M1 * M1;
      const double tr1 = M1.trace(), tr2 = M2.trace();
      const double tr3 = M2.cwiseProduct(M1.transpose()).sum();
      const double tr4 = M2.cwiseProduct(M2.transpose()).sum();
      double w1 = -tr1, w2 = tr2 / 2, w3 = -tr3 / 3, w4 = tr4 / 4;
      Eigen::VectorXd J, DJ;
      if (phi0 != 0.0) {
        J = phi0 * a;
        DJ = ctx.D * J;
        const Eigen::VectorXd MDJ = M1 * DJ;
        w2 += J.dot(DJ) * ctx.weight;
        w3 -= J.dot(MDJ) * ctx.weight;
        w4 += J.dot(M1 * MDJ) * ctx.weight;
      }
      f2[k] = w2 + w1 * w1 / 2;
      f4[k] = w4 + w1 * w3 + w2 * w2 / 2 + w1 * w1 * w2 / 2 + std::pow(w1, 4) / 24;

      if (beta * s * a.cwiseAbs().maxCoeff() >= 1.0) {
        zval[k] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(I + s * M1);
      bool positive = true;
      double W = -log_det_one_plus(lu, positive);
      if (!positive) {
        zval[k] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      if (phi0 != 0.0) W += coupling * J.dot(lu.solve(DJ)) * ctx.weight;
      zval[k] = std::exp(W);
    }
  });

  PartitionEstimate out;
  for (double z : zval)
    if (!std::isfinite(z)) ++out.rejected;
  out.rejection_fraction = static_cast<double>(out.rejected) / samples;
  if (out.rejection_fraction > options.max_rejection)
    throw InvariantError("rejection fraction <= 10%",
                         "beta ||gA|| >= 1 in " + std::to_string(out.rejection_fraction * 100) + "% of samples");
  const auto z = mean_error(zval);
  out.z.mean = z.mean;
  out.z.std_error = z.error;
  out.z.n_samples = samples - out.rejected;
  out.z.seed = seed;
  const auto c1 = mean_error(f2), c2 = mean_error(f4);
  out.c1_sampled = c1.mean;
  out.c1_error = c1.error;
  out.c2_sampled = c2.mean;
  out.c2_error = c2.error;
  out.c1_physical = -c1.mean;
  out.c2_physical = c2.mean;
  return out;
}

namespace {

double permanent4(const double m[4][4]) {
  // Glynn's formula over 8 sign vectors
  double total = 0.0;
  for (int mask = 0; mask < 8; ++mask) {
    const int d[4] = {1, (mask & 1) ? -1 : 1, (mask & 2) ? -1 : 1, (mask & 4) ? -1 : 1};
    double prod = 1.0;
    int sign = 1;
    for (int k = 1; k < 4; ++k) sign *= d[k];
    for (int j = 0; j < 4; ++j) {
      double col = 0.0;
      for (int i = 0; i < 4; ++i) col += d[i] * m[i][j];
      prod *= col;
    }
    total += sign * prod;
  }
  return total / 8.0;
}

}  // namespace

QuarticCoefficients quartic_series(const PropagatorKernel& free, const Potential& v, const Cutoff& cutoff,
                                   double coupling, int order) {
  const auto& grid = free.grid();
  if (grid.n_spatial() > 8 || grid.n_time() > 8) throw LimitError("quartic_series: at most 8 sites and 8 slices");
  if (order < 0 || order > 2) throw LimitError("quartic_series: order <= 2");
  cutoff.validate(grid);
  QuarticCoefficients out;
  if (order == 0) return out;

  const auto N = static_cast<Eigen::Index>(grid.n_spatial());
  const int M = grid.n_time();
  const double ad = grid.cell_volume(), dt = grid.dt();
  const Eigen::MatrixXd K = free_slice_operator(free) / (ad * dt);  // <psi_i psibar_j>
  const Eigen::MatrixXd V = v.pair_matrix(grid);

  struct Term {
    Eigen::Index x, y;
    double coef;
  };
  std::vector<Term> terms;
  for (Eigen::Index x = 0; x < N; ++x)
    for (Eigen::Index y = 0; y < N; ++y) {
      const double c = 0.5 * ad * ad * coupling * cutoff.g(x) * cutoff.g(y) * V(x, y);
      if (c != 0.0) terms.push_back({x, y, c});
    }

  // <V_u>, the same for every slice
  double vmean = 0.0;
  for (const auto& t : terms) {
    const double kxx = K(t.x, t.x), kyy = K(t.y, t.y), kxy = K(t.x, t.y), kyx = K(t.y, t.x);
    vmean += t.coef * (kxx * kyy + kxy * kyx);
  }
  out.c1 = -grid.beta() * vmean;
  if (order == 1) return out;

  double second = 0.0;
  for (int u = 0; u < M; ++u)
    for (int w = 0; w < M; ++w) {
      double acc = 0.0;
      for (const auto& t1 : terms)
        for (const auto& t2 : terms) {
          const Eigen::Index idx[4] = {u * N + t1.x, u * N + t1.y, w * N + t2.x, w * N + t2.y};
          double m[4][4];
          for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m[r][c] = K(idx[r], idx[c]);
          acc += t1.coef * t2.coef * permanent4(m);
        }
      second += acc * dt * dt;
    }
  out.c2 = 0.5 * second;
  return out;
}

McEstimate interacting_two_point_mc(const Eigen::VectorXd& f, const Eigen::VectorXd& h, const PropagatorKernel& free,
                                    const Potential& v, const Cutoff& cutoff, double coupling, double phi0,
                                    long samples, std::uint64_t seed, const PartitionOptions& options) {
  const auto& grid = free.grid();
  cutoff.validate(grid);
  const auto N = static_cast<Eigen::Index>(grid.n_spatial());
  if (f.size() != N || h.size() != N) throw ShapeError("interacting_two_point_mc: f, h must be spatial functions");
  if (samples < 200) throw DomainError("interacting_two_point_mc: samples >= 200");
  const SampleContext ctx(free, v, cutoff);
  const double s = std::sqrt(coupling);
  const double ad = grid.cell_volume(), dt = grid.dt();
  const auto n = static_cast<Eigen::Index>(grid.n_slice_space());

  std::vector<double> num(samples), den(samples);
  parallel_for(static_cast<std::size_t>(samples), options.workers, [&](std::size_t begin, std::size_t end) {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t k = begin; k < end; ++k) {
      CounterRng rng(seed, 0, k);
      LatticeField A = ctx.unit.sample(rng);
      A.values *= s;
      const LatticeField gA = A.dressed(cutoff.g);
      const Eigen::VectorXd a = gA.flat();
      if (free.beta() * a.cwiseAbs().maxCoeff() >= 1.0) {
        num[k] = den[k] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const Eigen::MatrixXd X = ctx.D * a.asDiagonal();
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(I + X);
      bool positive = true;
      double W = -log_det_one_plus(lu, positive);
      if (!positive) {
        num[k] = den[k] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      InteractingKernel G(grid, lu.solve(ctx.D));
      G.rule = VertexRule::trapezoid;
      G.field = gA;
      double value = ad * f.dot(truncated_two_point(G) * h);
      if (phi0 != 0.0) {
        const Eigen::VectorXd J = phi0 * a;
        W += J.dot(G.op * J) * ctx.weight;
        const double of = one_point(f, G, free, cutoff, phi0).value;
        const double oh = -J.dot(G.op.leftCols(N) * h) * ctx.weight / dt;
        value += of * oh;
      }
      const double e = std::exp(W);
      num[k] = value * e;
      den[k] = e;
    }
  });

  // delete-a-block jackknife on the ratio
  std::vector<double> nb, db;
  const int B = 100;
  const long per = samples / B;
  double Nsum = 0, Dsum = 0;
  long accepted = 0;
  for (int b = 0; b < B; ++b) {
    double ns = 0, ds = 0;
    const long lo = b * per, hi = (b == B - 1) ? samples : (b + 1) * per;
    for (long k = lo; k < hi; ++k)
      if (std::isfinite(den[k])) {
        ns += num[k];
        ds += den[k];
        ++accepted;
      }
    nb.push_back(ns);
    db.push_back(ds);
    Nsum += ns;
    Dsum += ds;
  }
  const double rejected = static_cast<double>(samples - accepted) / samples;
  if (rejected > options.max_rejection)
    throw InvariantError("rejection fraction <= 10%", std::to_string(rejected * 100) + "% of samples rejected");
  const auto dstat = mean_error(den);
  if (std::abs(dstat.mean) <= 3 * dstat.error) throw InvariantError("stable ratio", "denominator within 3 sigma of 0");

  McEstimate est;
  est.seed = seed;
  est.n_samples = accepted;
  est.mean = Nsum / Dsum;
  double mean_j = 0;
  std::vector<double> theta(B);
  for (int b = 0; b < B; ++b) {
    theta[b] = (Nsum - nb[b]) / (Dsum - db[b]);
    mean_j += theta[b] / B;
  }
  double var = 0;
  for (double t : theta) var += (t - mean_j) * (t - mean_j);
  est.std_error = std::sqrt(var * (B - 1) / B);
  return est;
}

}  // namespace bosekms
