#pragma once

// Degenerate diffusion coefficients a(x,t) = m(t) * C0 * d(x)^gamma and the
// envelope certification that backs every barrier construction downstream.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "dul/geometry.hpp"

namespace dul {

class Modulation {
 public:
  static Modulation constant(double level = 1.0) {
    if (!(level > 0.0)) throw std::invalid_argument("modulation level must be positive");
    Modulation m;
    m.kind_ = Kind::constant;
    m.lo_ = m.hi_ = level;
    return m;
  }

  static Modulation cosine(double m_lo, double m_hi, double period) {
    if (!(0.0 < m_lo && m_lo <= m_hi))
      throw std::invalid_argument("cosine modulation requires 0 < m_lo <= m_hi");
    if (!(period > 0.0)) throw std::invalid_argument("cosine modulation period must be positive");
    Modulation m;
    m.kind_ = Kind::cosine;
    m.lo_ = m_lo;
    m.hi_ = m_hi;
    m.period_ = period;
    return m;
  }

  double value(double t) const {
    if (kind_ == Kind::constant) return lo_;
    return lo_ + 0.5 * (hi_ - lo_) * (1.0 + std::cos(2.0 * M_PI * t / period_));
  }

  double min_value() const { return lo_; }
  double max_value() const { return hi_; }
  bool is_constant() const { return kind_ == Kind::constant; }

 private:
  enum class Kind { constant, cosine };
  Kind kind_ = Kind::constant;
  double lo_ = 1.0, hi_ = 1.0, period_ = 1.0;
};

enum class OperatorForm { divergence, nondivergence };

struct EnvelopeConstants {
  double c_tilde0;  // lower envelope amplitude
  double c0;        // upper envelope amplitude
  double c1;        // gradient envelope amplitude
};

struct DegenerateCoefficient {
  double gamma = 2.0;
  double C0 = 1.0;
  Modulation modulation = Modulation::constant();
  OperatorForm form = OperatorForm::divergence;
  double upper_exponent_s = 0.0;  // for the sub-unit-exponent envelope a <= c3 d^(gamma-s)

  void validate() const {
    if (!(gamma >= 0.0)) throw std::invalid_argument("coefficient.gamma must be >= 0");
    if (!(C0 > 0.0)) throw std::invalid_argument("coefficient.C0 must be positive");
    if (upper_exponent_s < 0.0 || (gamma > 0.0 && upper_exponent_s >= gamma) ||
        (gamma == 0.0 && upper_exponent_s != 0.0))
      throw std::invalid_argument("coefficient.upper_exponent_s must lie in [0, gamma)");
  }

  double value(const DomainGeometry& geom, double x, double t) const {
    const double d = geom.distance(x);
    return modulation.value(t) * C0 * std::pow(d, gamma);
  }

  // d/dd of a at fixed t; grad a = radial_slope * grad d.
  double radial_slope(const DomainGeometry& geom, double x, double t) const {
    if (gamma == 0.0) return 0.0;
    const double d = geom.distance(x);
    if (d == 0.0 && gamma < 1.0)
      throw std::domain_error("grad a is unbounded on the boundary for gamma < 1");
    return modulation.value(t) * C0 * gamma * std::pow(d, gamma - 1.0);
  }

  // Signed coordinate component of grad a (needs grad d, so off-ridge).
  double gradient(const DomainGeometry& geom, double x, double t) const {
    if (gamma == 0.0) return 0.0;
    return radial_slope(geom, x, t) * geom.grad_distance(x);
  }

  EnvelopeConstants envelope() const {
    return {modulation.min_value() * C0, modulation.max_value() * C0,
            modulation.max_value() * C0 * gamma};
  }
};

struct SampleGrid {
  std::vector<double> xs;
  std::vector<double> ts;
};

// Deterministic sample grid avoiding the ridge and the exact boundary.
inline SampleGrid make_sample_grid(const DomainGeometry& geom, std::size_t nx, std::size_t nt,
                                   double t_hi) {
  SampleGrid g;
  const double lo = geom.coord_lo(), hi = geom.coord_hi();
  const double ridge = geom.ridge_coordinate();
  g.xs.reserve(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    double x = lo + (hi - lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(nx);
    if (x == ridge) x += 1e-9 * (hi - lo);
    g.xs.push_back(x);
  }
  g.ts.reserve(nt);
  for (std::size_t j = 0; j < nt; ++j)
    g.ts.push_back(t_hi * (static_cast<double>(j) + 0.5) / static_cast<double>(nt));
  return g;
}

struct A3Certificate {
  EnvelopeConstants constants;
  bool pass = false;
  double worst_violation = 0.0;  // most negative slack across the three inequalities
};

// Checks the envelope inequalities
//   c_tilde0 d^gamma <= a <= c0 d^gamma  and  |grad a| <= c1 d^(gamma-1)
// at every sample, with relative slack 1e-12.
inline A3Certificate certify_a3(const DegenerateCoefficient& coef, const DomainGeometry& geom,
                                const SampleGrid& grid) {
  if (grid.xs.empty() || grid.ts.empty())
    throw std::invalid_argument("certify_a3: sample grid must be nonempty");
  coef.validate();
  A3Certificate cert;
  cert.constants = coef.envelope();
  const double rel = 1e-12;
  double worst = 0.0;
  const double ridge = geom.ridge_coordinate();
  for (double t : grid.ts) {
    for (double x : grid.xs) {
      const double d = geom.distance(x);
      const double a = coef.value(geom, x, t);
      const double dg = std::pow(d, coef.gamma);
      const double lo = cert.constants.c_tilde0 * dg;
      const double hi = cert.constants.c0 * dg;
      worst = std::min(worst, a - lo + rel * std::abs(lo));
      worst = std::min(worst, hi - a + rel * std::abs(hi));
      if (x != ridge && !(d == 0.0 && coef.gamma < 1.0)) {
        const double ga = std::abs(coef.gradient(geom, x, t));
        const double cap = coef.gamma == 0.0
                               ? 0.0
                               : cert.constants.c1 * std::pow(d, coef.gamma - 1.0);
        worst = std::min(worst, cap - ga + rel * std::abs(cap));
      }
    }
  }
  cert.worst_violation = worst;
  cert.pass = worst >= 0.0;
  return cert;
}

}  // namespace dul
