#include "bosekms/pathint.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <thread>

namespace bosekms {

namespace {

std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a) { return splitmix(a); }

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
    : state_(mix(mix(seed) ^ mix(stream * 0xD1B54A32D192ED03ULL + 1) ^ mix(index * 0x8CB92BA72F3D8DD7ULL + 2))) {}

CounterRng::result_type CounterRng::operator()() { return splitmix(state_); }

namespace {

BridgePath bridge_with(CounterRng& rng, const Coord& x, const Coord& y, double t, int n_steps, int dim, double mass) {
  if (!(t > 0)) throw DomainError("sample_bridge: t must be positive");
  if (n_steps < 1) throw DomainError("sample_bridge: n_steps >= 1");
  BridgePath p;
  p.times.resize(n_steps + 1);
  p.positions.resize(n_steps + 1);
  p.positions[0] = x;
  p.times[0] = 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double ds = t / n_steps;
  for (int k = 1; k <= n_steps; ++k) {
    const double s_prev = (k - 1) * ds;
    const double s = k * ds;
    p.times[k] = s;
    if (k == n_steps) {
      p.positions[k] = y;
      break;
    }
    const double remaining = t - s_prev;
    const double frac = ds / remaining;
    const double sd = std::sqrt(ds * (t - s) / (remaining * mass));
    Coord c{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      const double prev = p.positions[k - 1][a];
      c[a] = prev + (y[a] - prev) * frac + sd * normal(rng);
    }
    p.positions[k] = c;
  }
  return p;
}

struct Stratum {
  int winding;
  std::vector<int> image;
  double t;
  double weight;
  Coord start, end;
  bool deterministic;
};

double gauss1(double r, double var) { return std::exp(-0.5 * r * r / var) / std::sqrt(2.0 * std::numbers::pi * var); }

// Strata for paths from y (time offset) to x over lengths t_n = offset + n beta.
std::vector<Stratum> build_strata(const PropagatorKernel& free, std::size_t x, std::size_t y, double offset,
                                  int n_min, int n_max) {
  const auto& g = free.grid();
  const double beta = free.beta(), L = g.box_length(), m = free.mass(), mu = free.mu_eff();
  const Coord r = g.displacement(x, y);
  const Coord y0 = g.coord(y);
  std::vector<Stratum> out;
  for (int n = n_min; n <= n_max; ++n) {
    const double t = offset + n * beta;
    if (t <= 0) {
      if (x == y) out.push_back({n, std::vector<int>(g.dim(), 0), 0.0, 1.0 / g.cell_volume(), y0, y0, true});
      continue;
    }
    const double var = t / m;
    const int W = static_cast<int>(std::ceil(10.0 * std::sqrt(var) / L)) + 1;
    std::vector<int> w(g.dim(), -W);
    while (true) {
      double weight = std::exp(t * mu);
      Coord end = y0;
      for (int a = 0; a < g.dim(); ++a) {
        const double d = r[a] + w[a] * L;
        weight *= gauss1(d, var);
        end[a] = y0[a] + d;
      }
      if (weight > 1e-300) out.push_back({n, w, t, weight, y0, end, false});
      int a = 0;
      while (a < g.dim() && ++w[a] > W) w[a++] = -W;
      if (a == g.dim()) break;
    }
  }
  return out;
}

double tail_estimate(const PropagatorKernel& free, int n_max) {
  const auto& g = free.grid();
  const double beta = free.beta(), mu = free.mu_eff();
  double tail = 0.0;
  for (int n = n_max + 1; n <= n_max + 400; ++n) {
    const double t = n * beta;
    double sup = 1.0;
    for (int a = 0; a < g.dim(); ++a) sup *= 1.0 / std::sqrt(2.0 * std::numbers::pi * t / free.mass()) + 1.0 / g.box_length();
    tail += std::exp(t * mu) * sup;
  }
  return tail;
}

using PathFunctional = std::function<double(const BridgePath&, const Stratum&)>;

McEstimate run_strata(const std::vector<Stratum>& strata, const PropagatorKernel& free, long samples,
                      std::uint64_t seed, const PathOptions& opt, const PathFunctional& value) {
  if (samples < 1) throw DomainError("samples >= 1");
  const int M = free.grid().n_time();
  int spb = std::max(opt.steps_per_beta, 1);
  if (spb % M) spb += M - spb % M;  // path nodes land on slice times
  const double ds = free.beta() / spb;

  double total_weight = 0.0;
  for (const auto& s : strata)
    if (!s.deterministic) total_weight += s.weight;

  // per-stratum counts, then a flat schedule of (stratum, index)
  std::vector<long> counts(strata.size(), 0);
  std::vector<std::size_t> offsets(strata.size() + 1, 0);
  for (std::size_t s = 0; s < strata.size(); ++s) {
    if (!strata[s].deterministic)
      counts[s] = std::max<long>(32, std::llround(samples * strata[s].weight / total_weight));
    offsets[s + 1] = offsets[s] + counts[s];
  }
  const std::size_t total = offsets.back();
  std::vector<double> values(total, 0.0);
  auto work = [&](std::size_t begin, std::size_t end) {
    std::size_t s = std::upper_bound(offsets.begin(), offsets.end(), begin) - offsets.begin() - 1;
    for (std::size_t k = begin; k < end; ++k) {
      while (k >= offsets[s + 1]) ++s;
      const auto& st = strata[s];
      CounterRng rng(seed, s, k - offsets[s]);
      const int steps = std::max(1, static_cast<int>(std::llround(st.t / ds)));
      const BridgePath p = bridge_with(rng, st.start, st.end, st.t, steps, free.grid().dim(), free.mass());
      values[k] = value(p, st);
    }
  };
  const int workers = std::max(1, opt.workers);
  if (workers == 1 || total < 2) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t b = std::min(total, w * chunk), e = std::min(total, (w + 1) * chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& t : pool) t.join();
  }

  McEstimate est;
  est.seed = seed;
  double var = 0.0;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    const auto& st = strata[s];
    StratumRow row{st.winding, st.image, st.weight, 1.0, 0.0, counts[s]};
    if (!st.deterministic) {
      double sum = 0.0, sq = 0.0;
      for (std::size_t k = offsets[s]; k < offsets[s + 1]; ++k) sum += values[k];
      row.mean = sum / counts[s];
      for (std::size_t k = offsets[s]; k < offsets[s + 1]; ++k) sq += (values[k] - row.mean) * (values[k] - row.mean);
      row.std_error = counts[s] > 1 ? std::sqrt(sq / (counts[s] - 1) / counts[s]) : 0.0;
      for (std::size_t k = offsets[s]; k < offsets[s + 1]; ++k) {
        est.max_sample_weight = std::max(est.max_sample_weight, values[k]);
        if (values[k] > 1.0 + 1e-12) ++est.weight_violations;
      }
    }
    est.mean += st.weight * row.mean;
    var += st.weight * st.weight * row.std_error * row.std_error;
    est.n_samples += counts[s];
    est.strata.push_back(std::move(row));
  }
  est.std_error = std::sqrt(var);
  return est;
}

// Trapezoid nodes along a path with uniform steps.
double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) s += f[k];
  return s * h;
}

}  // namespace

BridgePath sample_bridge(const Coord& x, const Coord& y, double t, int n_steps, std::uint64_t seed, int dim,
                         double mass, std::uint64_t stream) {
  CounterRng rng(seed, stream, 0);
  return bridge_with(rng, x, y, t, n_steps, dim, mass);
}

FieldInterpolator::FieldInterpolator(const GridSpec& grid, const LatticeField& A) : grid_(grid) {
  A.check_shape(grid);
  const double lo = A.values.minCoeff(), hi = A.values.maxCoeff();
  if (hi - lo == 0.0) {
    constant_ = true;
    constant_value_ = lo;
    return;
  }
  const std::size_t N = grid.n_spatial();
  labels_.resize(N);
  for (std::size_t q = 0; q < N; ++q) {
    labels_[q] = grid.momentum_label(q);
    for (int a = 0; a < grid.dim(); ++a) labels_[q][a] += grid.n_sites() / 2;
  }
  re_.assign(grid.n_time(), std::vector<double>(N, 0.0));
  im_ = re_;
  for (int j = 0; j < grid.n_time(); ++j)
    for (std::size_t q = 0; q < N; ++q) {
      const auto p = grid.momentum(q);
      for (std::size_t s = 0; s < N; ++s) {
        const auto x = grid.coord(s);
        const double ph = p[0] * x[0] + p[1] * x[1] + p[2] * x[2];
        re_[j][q] += A.values(s, j) * std::cos(ph);
        im_[j][q] -= A.values(s, j) * std::sin(ph);
      }
    }
}

std::vector<std::complex<double>> FieldInterpolator::phases(const Coord& x) const {
  // e^{i p.x} for every momentum, from per-axis powers of e^{2 pi i x_a / L}
  const int n = grid_.n_sites(), d = grid_.dim();
  std::vector<std::vector<std::complex<double>>> axis(d, std::vector<std::complex<double>>(n));
  for (int a = 0; a < d; ++a) {
    const std::complex<double> step = std::polar(1.0, 2.0 * std::numbers::pi * x[a] / grid_.box_length());
    std::complex<double> z = std::polar(1.0, -2.0 * std::numbers::pi * (n / 2) * x[a] / grid_.box_length());
    for (int k = 0; k < n; ++k, z *= step) axis[a][k] = z;
  }
  std::vector<std::complex<double>> out(labels_.size());
  for (std::size_t q = 0; q < labels_.size(); ++q) {
    std::complex<double> z = axis[0][labels_[q][0]];
    for (int a = 1; a < d; ++a) z *= axis[a][labels_[q][a]];
    out[q] = z;
  }
  return out;
}

double FieldInterpolator::spatial(int slice, const std::vector<std::complex<double>>& phase) const {
  double acc = 0.0;
  for (std::size_t q = 0; q < phase.size(); ++q) acc += re_[slice][q] * phase[q].real() - im_[slice][q] * phase[q].imag();
  return acc / static_cast<double>(grid_.n_spatial());
}

double FieldInterpolator::operator()(const Coord& x, double u) const {
  if (constant_) return constant_value_;
  const double beta = grid_.beta();
  double r = std::fmod(u, beta);
  if (r < 0) r += beta;
  const double pos = r / grid_.dt();
  int j = static_cast<int>(std::floor(pos));
  double f = pos - j;
  if (j >= grid_.n_time()) {
    j = 0;
    f = 0.0;
  }
  const int j1 = (j + 1) % grid_.n_time();
  const auto ph = phases(x);
  const double a = spatial(j, ph);
  return f == 0.0 ? a : (1.0 - f) * a + f * spatial(j1, ph);
}

McEstimate mc_two_point_external(std::size_t x, std::size_t y, const LatticeField& A, const PropagatorKernel& free,
                                 int n_max, long samples, std::uint64_t seed, const PathOptions& options) {
  if (!(free.mu_eff() < 0)) throw DomainError("mc_two_point_external: mu_eff < 0 required");
  if (n_max < 0) throw DomainError("n_max >= 0");
  const FieldInterpolator field(free.grid(), A);
  const auto strata = build_strata(free, x, y, 0.0, 0, n_max);
  auto est = run_strata(strata, free, samples, seed, options, [&](const BridgePath& p, const Stratum&) {
    std::vector<double> f(p.times.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = field(p.positions[k], p.times[k]);
    return std::exp(-trapezoid(f, p.times[1] - p.times[0]));
  });
  est.tail_bound = tail_estimate(free, n_max);
  return est;
}

McEstimate mc_interacting_propagator(std::size_t x, int j, std::size_t y, int i, const LatticeField& A,
                                     const PropagatorKernel& free, int n_max, long samples, std::uint64_t seed,
                                     const PathOptions& options) {
  const auto& g = free.grid();
  if (i < 0 || j < 0 || i >= g.n_time() || j >= g.n_time()) throw DomainError("slice index out of range");
  const FieldInterpolator field(g, A);
  const double ui = i * g.dt();
  const double offset = (j - i) * g.dt();
  const auto strata = build_strata(free, x, y, offset, j > i ? 0 : 1, n_max);
  auto est = run_strata(strata, free, samples, seed, options, [&](const BridgePath& p, const Stratum&) {
    std::vector<double> f(p.times.size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = field(p.positions[k], ui + p.times[k]);
    return std::exp(-trapezoid(f, p.times[1] - p.times[0]));
  });
  est.tail_bound = tail_estimate(free, n_max);
  return est;
}

McEstimate mc_two_point_hs(std::size_t x, std::size_t y, const Potential& v, const Cutoff& cutoff, double coupling,
                           const PropagatorKernel& free, int n_max, long samples, std::uint64_t seed,
                           const PathOptions& options) {
  const auto& g = free.grid();
  if (!(free.mu_eff() < 0)) throw DomainError("mc_two_point_hs: mu_eff < 0 required");
  cutoff.validate(g);
  const Eigen::VectorXd vhat = v.transform(g);
  if (vhat.minCoeff() < -1e-12 * std::max(v.on_grid(g)(0), 1e-300))
    throw InvariantError("positive-type potential", "transform has a negative mode");
  const double L = g.box_length(), a = g.spacing();
  // periodic multilinear interpolation of g keeps the quadratic form positive
  auto g_at = [&](const Coord& c) {
    double acc = 0.0;
    const int corners = 1 << g.dim();
    MultiIndex base{0, 0, 0};
    Coord frac{0, 0, 0};
    for (int k = 0; k < g.dim(); ++k) {
      double r = std::fmod(c[k], L);
      if (r < 0) r += L;
      const double pos = r / a;
      base[k] = static_cast<int>(std::floor(pos));
      frac[k] = pos - base[k];
    }
    for (int c_ = 0; c_ < corners; ++c_) {
      double w = 1.0;
      MultiIndex idx = base;
      for (int k = 0; k < g.dim(); ++k) {
        const bool up = c_ >> k & 1;
        w *= up ? frac[k] : 1.0 - frac[k];
        idx[k] += up;
      }
      if (w != 0.0) acc += w * cutoff.g(g.ravel(idx));
    }
    return acc;
  };

  const auto strata = build_strata(free, x, y, 0.0, 0, n_max);
  auto est = run_strata(strata, free, samples, seed, options, [&](const BridgePath& p, const Stratum& st) {
    const int n = st.winding;
    const int per = static_cast<int>(p.times.size() - 1) / n;
    const double h = p.times[1] - p.times[0];
    double exponent = 0.0;
    std::vector<double> gv(n);
    for (int k = 0; k <= per; ++k) {
      const double tw = (k == 0 || k == per) ? 0.5 * h : h;
      for (int i = 0; i < n; ++i) gv[i] = g_at(p.positions[k + i * per]);
      double form = 0.0;
      for (int i = 0; i < n; ++i) {
        if (gv[i] == 0.0) continue;
        for (int jj = 0; jj < n; ++jj) {
          if (gv[jj] == 0.0) continue;
          const auto& pi = p.positions[k + i * per];
          const auto& pj = p.positions[k + jj * per];
          form += gv[i] * gv[jj] * v.at({pj[0] - pi[0], pj[1] - pi[1], pj[2] - pi[2]}, g.dim(), L);
        }
      }
      exponent += tw * form;
    }
    return std::exp(-0.5 * coupling * exponent);
  });
  est.tail_bound = tail_estimate(free, n_max);
  if (est.weight_violations > 0)
    throw InvariantError("HS path weight <= 1", std::to_string(est.weight_violations) + " samples exceed 1");
  return est;
}

}  // namespace bosekms
