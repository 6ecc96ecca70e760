#include "bosekms/model.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace bosekms {

namespace {

double polylog_direct(double s, double y) {
  // Terms decrease monotonically once n > s*y/(1-y); the remainder after n is
  // bounded by the geometric tail term * y/(1-y).
  double sum = 0.0;
  double yn = 1.0;
  for (long n = 1;; ++n) {
    yn *= y;
    const double term = yn / std::pow(static_cast<double>(n), s);
    sum += term;
    const double tail = term * y / (1.0 - y);
    if (tail < 1e-17 * std::abs(sum) || yn == 0.0) break;
    if (n > 50'000'000) throw LimitError("polylog: direct summation did not converge");
  }
  return sum;
}

// Expansion about y = 1 in t = ln y (|t| < 2 pi), valid for non-integer s:
// Li_s(e^t) = Gamma(1-s) (-t)^(s-1) + sum_k zeta(s-k) t^k / k!
double polylog_near_one(double s, double y) {
  const double t = std::log(y);
  double sum = 0.0;
  if (t < 0.0) sum += boost::math::tgamma(1.0 - s) * std::pow(-t, s - 1.0);
  double tk = 1.0;  // t^k / k!
  for (int k = 0; k < 200; ++k) {
    const double term = boost::math::zeta(s - k) * tk;
    sum += term;
    if (k > 2 && std::abs(term) < 1e-18 * std::abs(sum)) break;
    tk *= t / (k + 1);
  }
  return sum;
}

bool is_integer(double s) { return std::abs(s - std::round(s)) < 1e-12; }

}  // namespace

double polylog(double s, double y) {
  if (!(y >= 0.0) || y > 1.0) throw DomainError("polylog: y must lie in [0, 1]");
  if (!std::isfinite(s)) throw DomainError("polylog: s must be finite");
  if (y == 0.0) return 0.0;
  if (y == 1.0) {
    if (s <= 1.0) throw DomainError("polylog: series diverges at y = 1 for s <= 1");
    return boost::math::zeta(s);
  }
  if (is_integer(s) && std::round(s) == 1.0) return -std::log1p(-y);
  if (y <= 0.75 || is_integer(s)) return polylog_direct(s, y);
  return polylog_near_one(s, y);
}

void ModelParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!(finite(mass) && finite(beta) && finite(mu) && finite(epsilon) && finite(phi0) &&
        finite(coupling) && finite(mu_tilde)))
    throw InvariantError("all reals finite", "non-finite model parameter");
  if (!(mass > 0)) throw InvariantError("mass > 0", "mass = " + std::to_string(mass));
  if (!(beta > 0)) throw InvariantError("beta > 0", "beta = " + std::to_string(beta));
  if (mu > 0) throw InvariantError("mu <= 0", "mu = " + std::to_string(mu));
  if (!(epsilon > 0)) throw InvariantError("mu_rr = -epsilon < 0", "epsilon = " + std::to_string(epsilon));
  if (phi0 < 0) throw InvariantError("phi0 >= 0", "phi0 = " + std::to_string(phi0));
  if (coupling < 0) throw InvariantError("coupling >= 0", "coupling = " + std::to_string(coupling));
}

void ModelParams::check_condensate(double v_l1) const {
  if (!condensate) return;
  if (!(v_l1 > 0)) throw InvariantError("phi0^2 = mu_tilde/||v||_1", "||v||_1 must be positive");
  const double expected = mu_tilde / v_l1;
  if (std::abs(phi0 * phi0 - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
    std::ostringstream os;
    os << "phi0^2 = " << phi0 * phi0 << " but mu_tilde/||v||_1 = " << expected;
    throw InvariantError("phi0^2 = mu_tilde/||v||_1", os.str());
  }
}

GridSpec::GridSpec(int dim, int n_sites, double box_length, int n_time, double beta)
    : dim_(dim), n_(n_sites), L_(box_length), M_(n_time), beta_(beta) {
  if (dim < 1 || dim > 3) throw InvariantError("1 <= dim <= 3", "dim = " + std::to_string(dim));
  if (n_sites < 1) throw InvariantError("n_sites > 0", "n_sites = " + std::to_string(n_sites));
  if (n_time < 1) throw InvariantError("n_time > 0", "n_time = " + std::to_string(n_time));
  if (!(box_length > 0) || !std::isfinite(box_length))
    throw InvariantError("box_length > 0", "box_length = " + std::to_string(box_length));
  if (!(beta > 0) || !std::isfinite(beta)) throw InvariantError("beta > 0", "beta = " + std::to_string(beta));
  n_spatial_ = 1;
  for (int k = 0; k < dim; ++k) n_spatial_ *= static_cast<std::size_t>(n_sites);
}

double GridSpec::cell_volume() const { return std::pow(spacing(), dim_); }

MultiIndex GridSpec::unravel(std::size_t site) const {
  MultiIndex idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    idx[k] = static_cast<int>(site % n_);
    site /= n_;
  }
  return idx;
}

std::size_t GridSpec::ravel(const MultiIndex& idx) const {
  std::size_t site = 0;
  for (int k = dim_ - 1; k >= 0; --k) {
    const int w = ((idx[k] % n_) + n_) % n_;
    site = site * n_ + static_cast<std::size_t>(w);
  }
  return site;
}

Coord GridSpec::coord(std::size_t site) const {
  const auto idx = unravel(site);
  Coord x{0, 0, 0};
  for (int k = 0; k < dim_; ++k) x[k] = idx[k] * spacing();
  return x;
}

std::size_t GridSpec::index_of(const Coord& x) const {
  MultiIndex idx{0, 0, 0};
  for (int k = 0; k < dim_; ++k) idx[k] = static_cast<int>(std::lround(x[k] / spacing()));
  return ravel(idx);
}

Coord GridSpec::displacement(std::size_t a, std::size_t b) const {
  const auto ia = unravel(a), ib = unravel(b);
  Coord r{0, 0, 0};
  for (int k = 0; k < dim_; ++k) {
    int d = ia[k] - ib[k];
    d = ((d % n_) + n_) % n_;
    if (d >= (n_ + 1) / 2 && 2 * d != n_) d -= n_;
    if (2 * d == n_) d = -d;  // the half-box image is ambiguous; pick -n/2
    r[k] = d * spacing();
  }
  return r;
}

MultiIndex GridSpec::momentum_label(std::size_t q) const {
  auto idx = unravel(q);
  for (int k = 0; k < dim_; ++k) idx[k] -= n_ / 2;
  return idx;
}

Coord GridSpec::momentum(std::size_t q) const {
  const auto lab = momentum_label(q);
  Coord p{0, 0, 0};
  for (int k = 0; k < dim_; ++k) p[k] = 2.0 * std::numbers::pi * lab[k] / L_;
  return p;
}

double GridSpec::momentum_sq(std::size_t q) const {
  const auto p = momentum(q);
  return p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
}

bool GridSpec::same_shape(const GridSpec& o) const {
  return dim_ == o.dim_ && n_ == o.n_ && M_ == o.M_ && std::abs(L_ - o.L_) < 1e-12 * L_ &&
         std::abs(beta_ - o.beta_) < 1e-12 * beta_;
}

Potential Potential::gaussian(double height, double width) {
  if (!(height >= 0) || !(width > 0)) throw InvariantError("gaussian potential", "need height >= 0, width > 0");
  Potential v;
  v.shape_ = PotentialShape::gaussian;
  v.height_ = height;
  v.scale_ = width;
  return v;
}

Potential Potential::bump(double height, double radius) {
  if (!(height >= 0) || !(radius > 0)) throw InvariantError("bump potential", "need height >= 0, radius > 0");
  Potential v;
  v.shape_ = PotentialShape::bump;
  v.height_ = height;
  v.scale_ = radius;
  return v;
}

Potential Potential::tabulated(const GridSpec& grid, Eigen::VectorXd values) {
  if (static_cast<std::size_t>(values.size()) != grid.n_spatial())
    throw ShapeError("tabulated potential: one value per site required");
  Potential v;
  v.shape_ = PotentialShape::tabulated;
  v.height_ = values(0);
  v.table_ = std::move(values);
  v.table_dim_ = grid.dim();
  v.table_n_ = grid.n_sites();
  for (std::size_t s = 0; s < grid.n_spatial(); ++s) {
    const auto idx = grid.unravel(s);
    MultiIndex neg{-idx[0], -idx[1], -idx[2]};
    if (std::abs(v.table_(s) - v.table_(grid.ravel(neg))) > 1e-12 * std::max(1.0, std::abs(v.height_)))
      throw InvariantError("v(x) = v(-x)", "tabulated potential is not symmetric");
  }
  return v;
}

Potential Potential::scaled(double factor) const {
  Potential v = *this;
  v.height_ *= factor;
  if (shape_ == PotentialShape::tabulated) v.table_ *= factor;
  return v;
}

double Potential::at(const Coord& r, int dim, double L) const {
  if (shape_ == PotentialShape::tabulated) {
    GridSpec g(table_dim_, table_n_, L, 1, 1.0);
    return table_(g.index_of(r));
  }
  double prod = 1.0;
  for (int k = 0; k < dim; ++k) {
    // minimal image, then images while they contribute
    double x = std::remainder(r[k], L);
    double axis = 0.0;
    if (shape_ == PotentialShape::gaussian) {
      const int wmax = static_cast<int>(std::ceil(9.0 * scale_ / L)) + 1;
      for (int w = -wmax; w <= wmax; ++w) {
        const double y = x + w * L;
        axis += std::exp(-0.5 * y * y / (scale_ * scale_));
      }
    } else {
      const int wmax = static_cast<int>(std::ceil(scale_ / L)) + 1;
      for (int w = -wmax; w <= wmax; ++w) axis += std::max(0.0, 1.0 - std::abs(x + w * L) / scale_);
    }
    prod *= axis;
  }
  return height_ * prod;
}

Eigen::VectorXd Potential::on_grid(const GridSpec& grid) const {
  if (shape_ == PotentialShape::tabulated) {
    if (grid.dim() != table_dim_ || grid.n_sites() != table_n_)
      throw ShapeError("tabulated potential used on a different grid");
    return table_;
  }
  Eigen::VectorXd out(grid.n_spatial());
  for (std::size_t s = 0; s < grid.n_spatial(); ++s) out(s) = at(grid.displacement(s, 0), grid.dim(), grid.box_length());
  return out;
}

Eigen::MatrixXd Potential::pair_matrix(const GridSpec& grid) const {
  const Eigen::VectorXd row = on_grid(grid);
  const std::size_t N = grid.n_spatial();
  Eigen::MatrixXd out(N, N);
  for (std::size_t i = 0; i < N; ++i) {
    const auto ii = grid.unravel(i);
    for (std::size_t j = 0; j < N; ++j) {
      const auto jj = grid.unravel(j);
      out(i, j) = row(grid.ravel({ii[0] - jj[0], ii[1] - jj[1], ii[2] - jj[2]}));
    }
  }
  return out;
}

Eigen::VectorXd Potential::transform(const GridSpec& grid) const {
  const Eigen::VectorXd vx = on_grid(grid);
  const std::size_t N = grid.n_spatial();
  Eigen::VectorXd out(N);
  for (std::size_t q = 0; q < N; ++q) {
    const auto p = grid.momentum(q);
    double acc = 0.0;
    for (std::size_t s = 0; s < N; ++s) {
      const auto x = grid.coord(s);
      acc += vx(s) * std::cos(p[0] * x[0] + p[1] * x[1] + p[2] * x[2]);
    }
    out(q) = acc * grid.cell_volume();
  }
  return out;
}

Cutoff Cutoff::plateau(const GridSpec& grid, const Coord& center, double plateau, double ramp) {
  const std::size_t N = grid.n_spatial();
  Cutoff c;
  c.g = Eigen::VectorXd::Zero(N);
  const std::size_t c0 = grid.index_of(center);
  for (std::size_t s = 0; s < N; ++s) {
    const auto r = grid.displacement(s, c0);
    double dist = 0.0;
    for (int k = 0; k < grid.dim(); ++k) dist = std::max(dist, std::abs(r[k]));
    if (dist <= plateau)
      c.g(s) = 1.0;
    else if (ramp > 0 && dist < plateau + ramp)
      c.g(s) = 0.5 * (1.0 + std::cos(std::numbers::pi * (dist - plateau) / ramp));
  }
  c.chi = Eigen::VectorXd::Zero(N);
  for (std::size_t s = 0; s < N; ++s) {
    if (c.g(s) <= 0) continue;
    const auto idx = grid.unravel(s);
    for (int k = 0; k < grid.dim(); ++k) {
      for (int dlt : {-1, 0, 1}) {
        auto nb = idx;
        nb[k] += dlt;
        c.chi(grid.ravel(nb)) = 1.0;
      }
    }
  }
  c.chi1 = c.chi;
  c.chi2 = c.chi;
  c.validate(grid);
  return c;
}

Cutoff Cutoff::uniform(const GridSpec& grid) {
  Cutoff c;
  c.g = Eigen::VectorXd::Ones(grid.n_spatial());
  c.chi = c.chi1 = c.chi2 = c.g;
  return c;
}

Cutoff Cutoff::single_site(const GridSpec& grid, std::size_t site) {
  Cutoff c;
  c.g = Eigen::VectorXd::Zero(grid.n_spatial());
  c.g(site) = 1.0;
  c.chi = c.chi1 = c.chi2 = c.g;
  return c;
}

void Cutoff::validate(const GridSpec& grid) const {
  const auto N = static_cast<Eigen::Index>(grid.n_spatial());
  if (g.size() != N || chi.size() != N || chi1.size() != N || chi2.size() != N)
    throw ShapeError("cutoff functions must live on the grid");
  if (g.minCoeff() < 0 || g.maxCoeff() > 1) throw InvariantError("0 <= g <= 1", "g out of range");
  for (Eigen::Index s = 0; s < N; ++s) {
    if (g(s) > 0 && (chi(s) < 1 || chi1(s) < 1 || chi2(s) < 1))
      throw InvariantError("chi >= indicator of supp(g)", "chi vanishes inside supp(g)");
  }
  if (chi.minCoeff() < 0 || chi1.minCoeff() < 0 || chi2.minCoeff() < 0)
    throw InvariantError("chi >= 0", "negative cutoff value");
}

LatticeField::LatticeField(const GridSpec& grid, FieldKind k)
    : values(Eigen::MatrixXd::Zero(grid.n_spatial(), grid.n_time())), kind(k) {}

LatticeField LatticeField::constant(const GridSpec& grid, double value, FieldKind k) {
  LatticeField f(grid, k);
  f.values.setConstant(value);
  return f;
}

Eigen::VectorXd LatticeField::flat() const {
  return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
}

LatticeField LatticeField::dressed(const Eigen::VectorXd& g) const {
  LatticeField out = *this;
  out.values = g.asDiagonal() * values;
  return out;
}

void LatticeField::check_shape(const GridSpec& grid) const {
  if (values.rows() != static_cast<Eigen::Index>(grid.n_spatial()) || values.cols() != grid.n_time())
    throw ShapeError("field shape does not match grid");
  if (!values.allFinite()) throw InvariantError("finite entries", "field has non-finite values");
}

Norms norms(const Potential& v, const Cutoff& cutoff, const GridSpec& grid) {
  cutoff.validate(grid);
  const double ad = grid.cell_volume();
  const Eigen::VectorXd vx = v.on_grid(grid);
  Norms n;
  n.v0 = vx(0);
  n.v_l1 = vx.sum() * ad;
  n.g_l1 = cutoff.g.sum() * ad;
  n.vtilde_gg = grid.beta() * cutoff.g.dot(v.pair_matrix(grid) * cutoff.g) * ad * ad;
  return n;
}

}  // namespace bosekms
