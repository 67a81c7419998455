#pragma once

// Domains with closed-form distance-to-boundary fields.
//
// Two geometries are supported: a 1-D interval and the radially symmetric
// reduction of an n-ball (coordinates are the radius).  Both give d(x),
// grad d and Laplacian d in closed form, so downstream certificates carry
// no distance-field approximation error.

#include <cmath>
#include <stdexcept>
#include <string>

namespace dul {

enum class DomainKind { interval, disk_radial };

// Classification against the interior set and the cutoff ramp shell.
enum class ShellClass {
  outer,  // d <= eps/2, cutoff is 0
  shell,  // eps/2 < d <= 2 eps/3, cutoff ramps
  inner   // d > 2 eps/3, cutoff is 1
};

struct RegularityConstants {
  double k0;   // sup |laplacian d| over the boundary layer
  double nu0;  // inf |grad d| over the boundary layer
};

class DomainGeometry {
 public:
  static DomainGeometry interval(double x_lo, double x_hi) {
    if (!(x_lo < x_hi)) throw std::invalid_argument("interval: x_lo must be < x_hi");
    DomainGeometry g;
    g.kind_ = DomainKind::interval;
    g.x_lo_ = x_lo;
    g.x_hi_ = x_hi;
    g.eps0_ = 0.49 * 0.5 * (x_hi - x_lo);
    if (g.eps0_ >= 1.0) g.eps0_ = 0.999;  // the theory wants eps0 in (0,1)
    return g;
  }

  static DomainGeometry disk_radial(double radius, int dim) {
    if (!(radius > 0.0)) throw std::invalid_argument("disk_radial: R must be positive");
    if (dim < 2) throw std::invalid_argument("disk_radial: dimension must be >= 2");
    DomainGeometry g;
    g.kind_ = DomainKind::disk_radial;
    g.radius_ = radius;
    g.dim_ = dim;
    g.eps0_ = 0.9 * radius;
    if (g.eps0_ >= 1.0) g.eps0_ = 0.999;
    return g;
  }

  DomainKind kind() const { return kind_; }
  int dim() const { return kind_ == DomainKind::interval ? 1 : dim_; }
  double eps0() const { return eps0_; }
  void set_eps0(double e) {
    if (!(e > 0.0) || e >= half_width() || e >= 1.0)
      throw std::invalid_argument("eps0 must lie in (0, min(1, half-width))");
    eps0_ = e;
  }

  // Coordinate range of the computational axis (x for the interval, r for the disk).
  double coord_lo() const { return kind_ == DomainKind::interval ? x_lo_ : 0.0; }
  double coord_hi() const { return kind_ == DomainKind::interval ? x_hi_ : radius_; }

  // The measure-zero set where d is not differentiable.
  double ridge_coordinate() const {
    return kind_ == DomainKind::interval ? 0.5 * (x_lo_ + x_hi_) : 0.0;
  }

  // Largest attained distance value.
  double half_width() const {
    return kind_ == DomainKind::interval ? 0.5 * (x_hi_ - x_lo_) : radius_;
  }

  double distance(double x) const {
    check_in_closure(x);
    if (kind_ == DomainKind::interval) return std::min(x - x_lo_, x_hi_ - x);
    return radius_ - x;
  }

  // Signed component of grad d along the coordinate axis (|grad d| = 1 off the ridge).
  double grad_distance(double x) const {
    check_in_closure(x);
    const double ridge = ridge_coordinate();
    if (x == ridge)
      throw std::domain_error("grad_distance: nondifferentiable point (ridge)");
    if (kind_ == DomainKind::interval) return x < ridge ? 1.0 : -1.0;
    return -1.0;  // d = R - r
  }

  double laplacian_distance(double x) const {
    check_in_closure(x);
    if (kind_ == DomainKind::interval) return 0.0;
    if (x <= 0.0) throw std::domain_error("laplacian_distance: disk center singularity");
    return -static_cast<double>(dim_ - 1) / x;
  }

  // Closed-form sup |laplacian d| and inf |grad d| over the layer {d <= eps}.
  RegularityConstants regularity_constants(double eps) const {
    if (!(eps > 0.0) || eps >= eps0_)
      throw std::invalid_argument("regularity_constants: need 0 < eps < eps0");
    if (kind_ == DomainKind::interval) return {0.0, 1.0};
    // layer is r in (R - eps, R); |laplacian d| = (n-1)/r peaks at the inner edge
    return {static_cast<double>(dim_ - 1) / (radius_ - eps), 1.0};
  }

  bool in_interior_set(double x, double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("in_interior_set: eps must be positive");
    return distance(x) > eps;
  }

  ShellClass shell_membership(double x, double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("shell_membership: eps must be positive");
    const double d = distance(x);
    if (d <= 0.5 * eps) return ShellClass::outer;
    if (d <= 2.0 * eps / 3.0) return ShellClass::shell;
    return ShellClass::inner;
  }

  // Total domain measure, with the angular factor for the radial geometry.
  double measure() const {
    if (kind_ == DomainKind::interval) return x_hi_ - x_lo_;
    return sphere_area_constant() * std::pow(radius_, dim_) / dim_;
  }

  // Surface area of the unit (n-1)-sphere; multiplies radial integrals.
  double sphere_area_constant() const {
    if (kind_ == DomainKind::interval) return 1.0;
    const double n = static_cast<double>(dim_);
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
  }

  // Metric weight for 1-D quadrature along the coordinate axis.
  double metric_weight(double x) const {
    if (kind_ == DomainKind::interval) return 1.0;
    return sphere_area_constant() * std::pow(x, dim_ - 1);
  }

 private:
  DomainGeometry() = default;

  void check_in_closure(double x) const {
    const double lo = coord_lo(), hi = coord_hi();
    const double slack = 1e-14 * (hi - lo);
    if (x < lo - slack || x > hi + slack)
      throw std::domain_error("point outside the domain closure: " + std::to_string(x));
  }

  DomainKind kind_ = DomainKind::interval;
  double x_lo_ = 0.0, x_hi_ = 1.0;
  double radius_ = 1.0;
  int dim_ = 2;
  double eps0_ = 0.245;
};

}  // namespace dul
