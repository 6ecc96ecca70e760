#include "bosekms/propagator.hpp"

#include <cmath>
#include <numbers>

namespace bosekms {

BoseFactors bose_factors(double k_val, double beta) {
  if (!(k_val > 0)) throw DomainError("bose_factors: K must be positive (spectrum away from 0)");
  if (!(beta > 0)) throw DomainError("bose_factors: beta must be positive");
  const double x = beta * k_val;
  // expm1 keeps B- - B+ = 1 to rounding for small and large x alike
  const double plus = 1.0 / std::expm1(x);
  return {plus + 1.0, plus};
}

PropagatorKernel::PropagatorKernel(const ModelParams& params, const GridSpec& grid)
    : grid_(grid), mu_eff_(params.mu_eff()), mass_(params.mass) {
  if (!(mu_eff_ < 0)) throw DomainError("build_kernel: mu_eff must be negative");
  if (std::abs(params.beta - grid.beta()) > 1e-12 * params.beta)
    throw ShapeError("build_kernel: params and grid disagree on beta");
  const std::size_t N = grid.n_spatial();
  const int M = grid.n_time();
  K_.resize(N);
  table_.resize(N, M);
  for (std::size_t q = 0; q < N; ++q) {
    K_(q) = grid.momentum_sq(q) / (2.0 * mass_) - mu_eff_;
    const double bm = bose_factors(K_(q), beta()).minus;
    for (int j = 0; j < M; ++j) table_(q, j) = std::exp(-j * grid.dt() * K_(q)) * bm;
  }
}

double PropagatorKernel::value(std::size_t q, double u) const {
  const double b = beta();
  double r = std::fmod(u, b);
  if (r < 0) r += b;
  return std::exp(-r * K_(q)) * bose_factors(K_(q), b).minus;
}

Eigen::VectorXd PropagatorKernel::spatial_row(double u, bool before_jump) const {
  const std::size_t N = grid_.n_spatial();
  Eigen::VectorXd mult(N);
  for (std::size_t q = 0; q < N; ++q)
    mult(q) = (before_jump && u == 0.0) ? value_minus_side(q) : value(q, u);
  return momentum_operator(mult).col(0) / grid_.cell_volume();
}

Eigen::MatrixXd PropagatorKernel::spatial_operator(double u, bool before_jump) const {
  const std::size_t N = grid_.n_spatial();
  Eigen::VectorXd mult(N);
  for (std::size_t q = 0; q < N; ++q)
    mult(q) = (before_jump && u == 0.0) ? value_minus_side(q) : value(q, u);
  return momentum_operator(mult);
}

Eigen::MatrixXd PropagatorKernel::evolution(double t) const {
  return momentum_operator((-t * K_.array()).exp().matrix());
}

Eigen::MatrixXd PropagatorKernel::momentum_operator(const Eigen::VectorXd& f) const {
  // a^d * L^{-d} sum_p f(p) cos(p.(x_i - x_j)); the sine part cancels for even f
  // and for the unpaired -n/2 mode cos is exact on lattice displacements.
  const std::size_t N = grid_.n_spatial();
  Eigen::VectorXd row(N);
  for (std::size_t s = 0; s < N; ++s) {
    const auto x = grid_.coord(s);
    double acc = 0.0;
    for (std::size_t q = 0; q < N; ++q) {
      const auto p = grid_.momentum(q);
      acc += f(q) * std::cos(p[0] * x[0] + p[1] * x[1] + p[2] * x[2]);
    }
    row(s) = acc / static_cast<double>(N);
  }
  Eigen::MatrixXd out(N, N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto ii = grid_.unravel(i);
    for (std::size_t j = 0; j < N; ++j) {
      const auto jj = grid_.unravel(j);
      out(i, j) = row(grid_.ravel({ii[0] - jj[0], ii[1] - jj[1], ii[2] - jj[2]}));
    }
  }
  return out;
}

PropagatorKernel build_kernel(const ModelParams& params, const GridSpec& grid) { return {params, grid}; }

int default_winding_cutoff(double beta, double mu) {
  if (!(mu < 0)) throw DomainError("winding cutoff needs mu < 0");
  return std::max(1, static_cast<int>(std::ceil(std::log(1e-12) / (beta * mu))));
}

double heat_kernel(const Coord& r, double t, double mass, int dim, double L) {
  if (!(t > 0)) throw DomainError("heat_kernel: t must be positive");
  const double var = t / mass;
  const double sd = std::sqrt(var);
  const int wmax = static_cast<int>(std::ceil(10.0 * sd / L)) + 1;
  double prod = 1.0;
  for (int k = 0; k < dim; ++k) {
    const double x = std::remainder(r[k], L);
    double axis = 0.0;
    for (int w = -wmax; w <= wmax; ++w) {
      const double y = x + w * L;
      axis += std::exp(-0.5 * y * y / var);
    }
    prod *= axis / std::sqrt(2.0 * std::numbers::pi * var);
  }
  return prod;
}

double position_kernel(const PropagatorKernel& kernel, std::size_t x, std::size_t y, double u, int n_max) {
  const double beta = kernel.beta();
  if (u < 0 || u > beta) throw DomainError("position_kernel: u must lie in [0, beta]");
  if (n_max < 1) throw DomainError("position_kernel: n_max >= 1");
  const auto& g = kernel.grid();
  const Coord r = g.displacement(x, y);
  const double mu = kernel.mu_eff();
  double sum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    const double t = beta * n + u;
    if (t == 0.0) {
      if (x == y) sum += 1.0 / g.cell_volume();
      continue;
    }
    sum += std::exp(t * mu) * heat_kernel(r, t, kernel.mass(), g.dim(), g.box_length());
  }
  return sum;
}

double position_kernel_spectral(const PropagatorKernel& kernel, std::size_t x, std::size_t y, double u) {
  const auto& g = kernel.grid();
  if (u < 0 || u > kernel.beta()) throw DomainError("position_kernel_spectral: u must lie in [0, beta]");
  const Coord r = g.displacement(x, y);
  double acc = 0.0;
  for (std::size_t q = 0; q < g.n_spatial(); ++q) {
    const auto p = g.momentum(q);
    // u = beta is the beta- side of the jump
    const double m = (u == kernel.beta()) ? kernel.value_minus_side(q) : kernel.value(q, u);
    acc += m * std::cos(p[0] * r[0] + p[1] * r[1] + p[2] * r[2]);
  }
  return acc / std::pow(g.box_length(), g.dim());
}

double wick_constant(const ModelParams& params, int dim, bool with_measure) {
  if (!(params.mu < 0)) throw DomainError("wick_constant: mu must be negative");
  const double y = std::exp(params.beta * params.mu);
  double c = std::pow(2.0 * std::numbers::pi * params.mass / params.beta, 0.5 * dim) * polylog(0.5 * dim, y);
  if (with_measure) c /= std::pow(2.0 * std::numbers::pi, dim);
  return c;
}

double weight_sum(const ModelParams& params, int dim) {
  const double mu_rr = params.mu_rr();
  if (!(mu_rr < 0)) throw DomainError("weight_sum: mu_rr must be negative");
  return std::pow(2.0 * std::numbers::pi * params.beta / params.mass, -0.5 * dim) *
         polylog(0.5 * dim, std::exp(params.beta * mu_rr));
}

}  // namespace bosekms
