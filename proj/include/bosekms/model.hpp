#pragma once

// Physical parameters, lattice geometry, potentials, cutoffs and the special
// functions every other module leans on.

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bosekms {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct LimitError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
/// Raised when a named invariant of an input object does not hold.
struct InvariantError : std::runtime_error {
  InvariantError(std::string invariant, const std::string& detail)
      : std::runtime_error(invariant + ": " + detail), name(std::move(invariant)) {}
  std::string name;
};

/// Li_s(y) = sum_{n>=1} y^n / n^s for 0 <= y <= 1.
/// At y = 1 the series is only summed for s > 1 (it equals zeta(s)); for
/// y < 1 any real s is accepted because the series converges geometrically.
double polylog(double s, double y);

struct ModelParams {
  double mass = 1.0;
  double beta = 1.0;
  double mu = -1.0;       // chemical potential of the free theory
  double epsilon = 1.0;   // regulator, mu_rr = -epsilon
  double phi0 = 0.0;      // condensate amplitude
  double coupling = 1.0;  // overall factor on the two-body potential
  double mu_tilde = 0.0;  // only read in condensate mode
  bool condensate = false;

  double mu_rr() const { return -epsilon; }
  /// Chemical potential entering K = p^2/2m - mu_eff for the propagators.
  double mu_eff() const { return condensate ? mu_rr() : mu; }
  void validate() const;
  /// phi0^2 = mu_tilde / ||v||_1 must hold in condensate mode.
  void check_condensate(double v_l1) const;
};

using Coord = std::array<double, 3>;
using MultiIndex = std::array<int, 3>;

/// Periodic cube of n_sites^d points with side box_length, and M slices of [0, beta].
class GridSpec {
 public:
  GridSpec(int dim, int n_sites, double box_length, int n_time, double beta);

  int dim() const { return dim_; }
  int n_sites() const { return n_; }
  double box_length() const { return L_; }
  int n_time() const { return M_; }
  double beta() const { return beta_; }

  double spacing() const { return L_ / n_; }
  double dt() const { return beta_ / M_; }
  double cell_volume() const;
  std::size_t n_spatial() const { return n_spatial_; }
  std::size_t n_slice_space() const { return n_spatial_ * static_cast<std::size_t>(M_); }

  MultiIndex unravel(std::size_t site) const;
  std::size_t ravel(const MultiIndex& idx) const;  // wraps periodically
  Coord coord(std::size_t site) const;
  std::size_t index_of(const Coord& x) const;  // nearest site, periodic
  /// Displacement x_a - x_b reduced to the minimal image.
  Coord displacement(std::size_t a, std::size_t b) const;

  /// Momentum label k in {-n/2, ..., n/2-1} per axis for momentum index q.
  MultiIndex momentum_label(std::size_t q) const;
  Coord momentum(std::size_t q) const;
  double momentum_sq(std::size_t q) const;

  std::size_t slice_index(std::size_t site, int slice) const {
    return static_cast<std::size_t>(slice) * n_spatial_ + site;
  }
  bool same_shape(const GridSpec& o) const;

 private:
  int dim_, n_;
  double L_;
  int M_;
  double beta_;
  std::size_t n_spatial_;
};

enum class PotentialShape { gaussian, bump, tabulated };

/// Symmetric two-body potential, periodized over the box.
class Potential {
 public:
  static Potential gaussian(double height, double width);
  /// Product of triangles prod_k v0 (1 - |x_k|/r)_+ ; positive type in any d.
  static Potential bump(double height, double radius);
  /// Values v(x_site - 0) for every site of `grid`.
  static Potential tabulated(const GridSpec& grid, Eigen::VectorXd values);

  PotentialShape shape() const { return shape_; }
  double height() const { return height_; }
  double scale() const { return scale_; }

  /// v at a continuous displacement, periodized with box length L in `d` dims.
  double at(const Coord& r, int dim, double box_length) const;
  /// v(x_i) on the lattice (displacement from the origin site).
  Eigen::VectorXd on_grid(const GridSpec& grid) const;
  /// Dense v(x_i - x_j).
  Eigen::MatrixXd pair_matrix(const GridSpec& grid) const;
  /// Lattice transform vhat(p) = a^d sum_x v(x) cos(p x).
  Eigen::VectorXd transform(const GridSpec& grid) const;
  Potential scaled(double factor) const;

 private:
  PotentialShape shape_ = PotentialShape::gaussian;
  double height_ = 0.0;
  double scale_ = 1.0;
  Eigen::VectorXd table_;
  int table_dim_ = 0, table_n_ = 0;
};

/// Spatial cutoffs: g localises the interaction, chi* are 1 on supp(g).
struct Cutoff {
  Eigen::VectorXd g, chi, chi1, chi2;

  /// g = 1 within `plateau` of `center`, cosine ramp to 0 over `ramp`;
  /// chi = indicator of supp(g) dilated by one lattice site.
  static Cutoff plateau(const GridSpec& grid, const Coord& center, double plateau, double ramp);
  static Cutoff uniform(const GridSpec& grid);
  static Cutoff single_site(const GridSpec& grid, std::size_t site);
  void validate(const GridSpec& grid) const;
};

enum class FieldKind { potential, smearing, density };

/// Real field on (site, slice); column j is time slice j.
struct LatticeField {
  Eigen::MatrixXd values;
  FieldKind kind = FieldKind::potential;

  LatticeField() = default;
  LatticeField(const GridSpec& grid, FieldKind k = FieldKind::potential);
  LatticeField(Eigen::MatrixXd v, FieldKind k = FieldKind::potential) : values(std::move(v)), kind(k) {}

  static LatticeField constant(const GridSpec& grid, double value, FieldKind k = FieldKind::potential);
  double sup_norm() const { return values.cwiseAbs().maxCoeff(); }
  double operator()(std::size_t site, int slice) const { return values(site, slice); }
  /// Slice-major flattening matching GridSpec::slice_index.
  Eigen::VectorXd flat() const;
  /// g(x) A(x,u).
  LatticeField dressed(const Eigen::VectorXd& g) const;
  void check_shape(const GridSpec& grid) const;
};

struct Norms {
  double v0 = 0, v_l1 = 0, g_l1 = 0, vtilde_gg = 0;
};
Norms norms(const Potential& v, const Cutoff& cutoff, const GridSpec& grid);

}  // namespace bosekms
