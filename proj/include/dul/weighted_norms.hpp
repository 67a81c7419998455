#pragma once

// Weighted L1 machinery: boundary-singular weights, the growth conditions
// that carve out the uniqueness classes, and the per-rung iteration
// inequality used by the telescoping argument.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dul/geometry.hpp"
#include "dul/quadrature.hpp"

namespace dul {

class WeightFunction {
 public:
  // exp(-theta d^(2-gamma)), the supercritical class weight (gamma > 2)
  static WeightFunction exp_inverse_power(double theta, double gamma) {
    if (!(theta > 0.0)) throw std::invalid_argument("weight theta must be positive");
    if (!(gamma > 2.0)) throw std::invalid_argument("exp_inverse_power weight needs gamma > 2");
    WeightFunction w;
    w.kind_ = Kind::exp_inverse_power;
    w.theta_ = theta;
    w.gamma_ = gamma;
    return w;
  }

  static WeightFunction power(double exponent) {
    WeightFunction w;
    w.kind_ = Kind::power;
    w.exponent_ = exponent;
    return w;
  }

  static WeightFunction constant() { return WeightFunction{}; }

  double value(double d) const {
    switch (kind_) {
      case Kind::exp_inverse_power:
        return std::exp(-theta_ * std::pow(d, 2.0 - gamma_));
      case Kind::power:
        return std::pow(d, exponent_);
      default:
        return 1.0;
    }
  }

 private:
  enum class Kind { constant, exp_inverse_power, power };
  Kind kind_ = Kind::constant;
  double theta_ = 1.0, gamma_ = 3.0, exponent_ = 0.0;
};

// Integral of |u| * weight(d) over domain x [0, T].
inline double weighted_l1(const SpaceTimeField& u, const WeightFunction& weight,
                          const DomainGeometry& geom, double T, const QuadOptions& opts = {}) {
  return integrate_band_time(
      geom, DistanceBand{},
      [&](double x, double t) { return std::abs(u(x, t)) * weight.value(geom.distance(x)); }, T,
      opts);
}

struct GrowthReport {
  std::vector<double> eps_values;
  std::vector<double> lhs_values;    // measured integrals along the sweep
  std::vector<double> bound_values;  // unscaled class bound at each eps
  double fitted_C = 0.0;             // max lhs / bound across the sweep
  bool pass = false;
  double exponent_used = 0.0;  // theta or mu
};

namespace detail {

// "Stable fit" proxy for an asymptotic condition: the per-eps ratios
// lhs/bound must not keep growing as eps shrinks.  The sweep is decreasing,
// so its tail is the small-eps half.
inline bool ratios_stable(const std::vector<double>& ratio) {
  const std::size_t n = ratio.size();
  const std::size_t half = n / 2;
  double head = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < half || n == 1)
      head = std::max(head, ratio[i]);
    if (i >= half) tail = std::max(tail, ratio[i]);
  }
  if (head == 0.0) return tail <= 1e-300;
  return tail < 1.1 * head;
}

inline void require_decreasing(const std::vector<double>& sweep, const char* who) {
  if (sweep.empty()) throw std::invalid_argument(std::string(who) + ": empty eps sweep");
  for (std::size_t i = 1; i < sweep.size(); ++i)
    if (!(sweep[i] < sweep[i - 1]))
      throw std::invalid_argument(std::string(who) + ": eps sweep must decrease");
  if (!(sweep.back() > 0.0))
    throw std::invalid_argument(std::string(who) + ": eps values must be positive");
}

}  // namespace detail

// Supercritical class condition: the interior-set mass of |u| stays under
// C exp(theta eps^(2-gamma)) along the sweep.
inline GrowthReport check_supercritical_class(const SpaceTimeField& u, double theta,
                                              const std::vector<double>& eps_sweep,
                                              const DomainGeometry& geom, double T, double gamma,
                                              const QuadOptions& opts = {}) {
  if (!(theta > 0.0)) throw std::invalid_argument("supercritical class check: theta must be > 0");
  if (!(gamma > 2.0)) throw std::invalid_argument("supercritical class check: gamma must be > 2");
  detail::require_decreasing(eps_sweep, "supercritical class check");

  GrowthReport rep;
  rep.exponent_used = theta;
  std::vector<double> ratio;
  for (double eps : eps_sweep) {
    const double lhs = integrate_band_time(
        geom, DistanceBand{eps, std::numeric_limits<double>::infinity()},
        [&](double x, double t) { return std::abs(u(x, t)); }, T, opts);
    const double bound = std::exp(theta * std::pow(eps, 2.0 - gamma));
    rep.eps_values.push_back(eps);
    rep.lhs_values.push_back(lhs);
    rep.bound_values.push_back(bound);
    ratio.push_back(lhs / bound);
    rep.fitted_C = std::max(rep.fitted_C, ratio.back());
  }
  rep.pass = detail::ratios_stable(ratio);
  return rep;
}

// Shell class condition: the weighted shell mass of |u| d^(gamma-2) stays
// under C eps^mu, with the admissibility floor mu > -2 gamma + 4.
inline GrowthReport check_shell_class(const SpaceTimeField& u, double mu,
                                      const std::vector<double>& eps_sweep,
                                      const DomainGeometry& geom, double T, double gamma,
                                      const QuadOptions& opts = {}) {
  if (!(gamma >= 1.0 && gamma <= 2.0))
    throw std::invalid_argument("shell class check: gamma must lie in [1, 2]");
  if (!(mu > -2.0 * gamma + 4.0))
    throw std::invalid_argument(
        "shell class check: the class requires mu > -2*gamma + 4 (got mu = " +
        std::to_string(mu) + ", floor " + std::to_string(-2.0 * gamma + 4.0) + ")");
  detail::require_decreasing(eps_sweep, "shell class check");

  GrowthReport rep;
  rep.exponent_used = mu;
  std::vector<double> ratio;
  for (double eps : eps_sweep) {
    const double lhs = integrate_band_time(
        geom, DistanceBand{0.5 * eps, 2.0 * eps / 3.0},
        [&](double x, double t) {
          return std::abs(u(x, t)) * std::pow(geom.distance(x), gamma - 2.0);
        },
        T, opts);
    const double bound = std::pow(eps, mu);
    rep.eps_values.push_back(eps);
    rep.lhs_values.push_back(lhs);
    rep.bound_values.push_back(bound);
    ratio.push_back(lhs / bound);
    rep.fitted_C = std::max(rep.fitted_C, ratio.back());
  }
  rep.pass = detail::ratios_stable(ratio);
  return rep;
}

struct PointwiseGrowthReport {
  bool holds = false;
  double C_bar = 0.0;
  std::vector<double> level_sups;  // sup |u| d^l on each refinement level
};

// Smallest C with |u| <= C d^(-l), probed on boundary-refining sample
// ladders; `holds` records whether the sup stops growing under refinement.
inline PointwiseGrowthReport check_pointwise_growth(const SpaceTimeField& u, double l,
                                                    const DomainGeometry& geom, double T) {
  if (!(l >= 0.0)) throw std::invalid_argument("pointwise growth check: l must be >= 0");
  PointwiseGrowthReport rep;
  const double d_max = geom.half_width() * (1.0 - 1e-9);
  const std::size_t nt = 8;
  for (int level = 0; level < 3; ++level) {
    const double d_min = d_max * std::pow(2.0, -14 - 6 * level);
    const std::size_t n = 512 << level;
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      // geometric ladder from d_min up to d_max
      const double d = d_min * std::pow(d_max / d_min,
                                        static_cast<double>(i) / static_cast<double>(n - 1));
      const double x = geom.kind() == DomainKind::interval ? geom.coord_lo() + d
                                                           : geom.coord_hi() - d;
      for (std::size_t j = 0; j < nt; ++j) {
        const double t = T * (static_cast<double>(j) + 0.5) / static_cast<double>(nt);
        sup = std::max(sup, std::abs(u(x, t)) * std::pow(d, l));
      }
    }
    rep.level_sups.push_back(sup);
  }
  rep.C_bar = rep.level_sups.back();
  const double prev = rep.level_sups[rep.level_sups.size() - 2];
  rep.holds = prev == 0.0 ? rep.C_bar == 0.0 : rep.C_bar <= prev * 1.02;
  return rep;
}

struct IterationCheckResult {
  bool holds = false;
  double lhs = 0.0;  // interior-set mass at time tau
  double rhs = 0.0;  // half-eps interior mass at tau - delta, plus the rung margin
};

// The per-rung inequality of the telescoping argument:
//   int_{d > eps} |w(tau)| <= int_{d > eps/2} |w(tau - delta)| + C_hat eps^mu.
inline IterationCheckResult iteration_inequality_check(const SpaceTimeField& w, double eps,
                                                       double delta, double tau, double mu,
                                                       double C_hat, const DomainGeometry& geom,
                                                       const QuadOptions& opts = {}) {
  if (tau - delta < 0.0)
    throw std::invalid_argument("iteration inequality: tau - delta must be nonnegative");
  if (!(eps > 0.0)) throw std::invalid_argument("iteration inequality: eps must be positive");
  IterationCheckResult r;
  auto mass_above = [&](double cut, double t) {
    return integrate_band(
        geom, DistanceBand{cut, std::numeric_limits<double>::infinity()},
        [&](double x) { return std::abs(w(x, t)); }, opts);
  };
  r.lhs = mass_above(eps, tau);
  r.rhs = mass_above(0.5 * eps, tau - delta) + C_hat * std::pow(eps, mu);
  const double scale = std::max({std::abs(r.lhs), std::abs(r.rhs), 1e-30});
  r.holds = r.lhs <= r.rhs + 1e-9 * scale;
  return r;
}

}  // namespace dul
