#pragma once

// Telescoping backstep schedules.
//
// A schedule walks time back from tau to exactly 0 while shrinking the
// interior-set radius, either along eps_k = eps / k^(1/mu1) with the cap
// delta_k <= c eps_k^mu1 (the shrinking-cap form), or along halving radii
// eps_k = eps / 2^(k-1) with a constant cap (the constant-cap form).  The
// per-rung error eps_k^mu2 sums to a convergent tail in both cases.
//
// Materialized rungs are produced on a power-of-two time quantum, so every
// delta_k, tau_k and partial sum is a dyadic rational: the bookkeeping
// identity tau - tau_{k+1} = sum delta_j holds in exact float arithmetic,
// and the walk terminates at exactly 0.  When the rung count is
// astronomically large, the schedule is returned in analytic form only
// (rung count from harmonic-sum inversion, tail from partial zeta sums).

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dul {

enum class ScheduleLaw { shrinking_cap, constant_cap };

struct ScheduleRung {
  double eps;    // interior-set radius at this rung
  double delta;  // backstep taken
  double tau;    // time before the step (tau_{k}); after the step it is tau - S_k
};

struct TelescopingSchedule {
  ScheduleLaw law = ScheduleLaw::shrinking_cap;
  double tau = 0.0, eps = 0.0, mu1 = 0.0, mu2 = 0.0, c_cap = 0.0;
  bool materialized = false;
  double rung_count = 0.0;  // k0; exact when materialized, analytic estimate otherwise
  std::vector<ScheduleRung> rungs;
  std::vector<double> delta_partial_sums;  // S_k, summed in rung order
  double tail_bound = 0.0;   // sum_{k <= k0} eps_k^mu2
  double tail_majorant = 0.0;  // closed-form cap on the same sum (S_inf * eps^mu2 form)
};

namespace detail {

inline double harmonic_number(double k) {
  // Euler--Maclaurin; exact-enough for k >= 1, used only for large-k estimates.
  return std::log(k) + 0.5772156649015328606 + 1.0 / (2.0 * k) - 1.0 / (12.0 * k * k);
}

// Smallest k with H_k >= target.
inline double invert_harmonic(double target) {
  if (target <= 1.0) return 1.0;
  double acc = 0.0;
  for (std::uint64_t k = 1; k <= 4096; ++k) {
    acc += 1.0 / static_cast<double>(k);
    if (acc >= target) return static_cast<double>(k);
  }
  if (target > 700.0) return std::numeric_limits<double>::infinity();
  double k = std::exp(target - 0.5772156649015328606);
  for (int it = 0; it < 60; ++it) {
    const double f = harmonic_number(k) - target;
    k *= std::exp(-f);  // Newton step in log k, since dH/d(log k) ~ 1
  }
  return std::ceil(k);
}

// Partial zeta sum: sum_{k=1}^{K} k^(-q) for q > 1.
inline double partial_zeta(double q, double K) {
  if (K < 1.0) return 0.0;
  const double cutoff = 2e6;
  if (K <= cutoff) {
    double s = 0.0;
    for (std::uint64_t k = static_cast<std::uint64_t>(K); k >= 1; --k)
      s += std::pow(static_cast<double>(k), -q);  // ascending magnitudes
    return s;
  }
  // zeta(q) by direct sum + Euler--Maclaurin remainder, minus the >K tail.
  const double M = 1e5;
  double zeta = 0.0;
  for (std::uint64_t k = static_cast<std::uint64_t>(M); k >= 1; --k)
    zeta += std::pow(static_cast<double>(k), -q);
  zeta += std::pow(M, 1.0 - q) / (q - 1.0) - 0.5 * std::pow(M, -q) + q * std::pow(M, -q - 1.0) / 12.0;
  const double tail =
      std::pow(K, 1.0 - q) / (q - 1.0) + 0.5 * std::pow(K, -q) - q * std::pow(K, -q - 1.0) / 12.0;
  return zeta - tail;
}

inline double zeta_value(double q) {
  return partial_zeta(q, std::numeric_limits<double>::infinity());
}

// Largest power of two not exceeding v.
inline double pow2_floor(double v) { return std::exp2(std::floor(std::log2(v))); }

}  // namespace detail

// Shrinking-cap schedule: eps_k = eps / k^(1/mu1), delta_k = min(tau_k, c eps_k^mu1).
inline TelescopingSchedule telescoping_schedule(double eps, double mu1, double mu2, double tau,
                                                double c_cap, std::size_t max_rungs = 1u << 20) {
  if (!(mu1 > 0.0)) throw std::invalid_argument("telescoping schedule: mu1 must be positive");
  if (!(mu2 > mu1))
    throw std::invalid_argument("telescoping schedule: requires mu2 > mu1 for a summable tail");
  if (!(tau > 0.0 && eps > 0.0 && c_cap > 0.0))
    throw std::invalid_argument("telescoping schedule: tau, eps, c_cap must be positive");

  TelescopingSchedule sched;
  sched.law = ScheduleLaw::shrinking_cap;
  sched.tau = tau;
  sched.eps = eps;
  sched.mu1 = mu1;
  sched.mu2 = mu2;
  sched.c_cap = c_cap;
  const double q = mu2 / mu1;

  // exhaustion index: caps are c eps^mu1 / k, so tau runs out once H_k >= tau/(c eps^mu1)
  const double target = tau / (c_cap * std::pow(eps, mu1));
  const double k0_estimate = detail::invert_harmonic(target);

  if (k0_estimate > static_cast<double>(max_rungs)) {
    sched.materialized = false;
    sched.rung_count = k0_estimate;
    sched.tail_bound = std::pow(eps, mu2) * detail::partial_zeta(q, k0_estimate);
    sched.tail_majorant = std::pow(eps, mu2) * detail::zeta_value(q);
    return sched;
  }

  // dyadic time quantum small against the final (smallest) cap
  const double cap_last = c_cap * std::pow(eps, mu1) / std::max(k0_estimate, 1.0);
  const double quantum = detail::pow2_floor(std::min(tau, cap_last) * std::exp2(-16));
  double tau_k = tau;  // multiple of quantum after the first flooring below
  tau_k = std::floor(tau / quantum) * quantum;
  const double tau_quantized = tau_k;
  sched.tau = tau_quantized;

  double partial = 0.0, tail = 0.0;
  for (std::size_t k = 1; tau_k > 0.0; ++k) {
    if (k > max_rungs)
      throw std::runtime_error("telescoping schedule failed to exhaust tau within the rung cap");
    const double eps_k = eps / std::pow(static_cast<double>(k), 1.0 / mu1);
    const double cap_k = c_cap * std::pow(eps_k, mu1);
    double delta = std::floor(cap_k / quantum) * quantum;
    if (delta <= 0.0) delta = quantum;  // never stall; still dyadic-exact
    if (delta >= tau_k) delta = tau_k;
    sched.rungs.push_back({eps_k, delta, tau_k});
    partial += delta;  // exact: both are multiples of the common quantum
    sched.delta_partial_sums.push_back(partial);
    tail += std::pow(eps_k, mu2);
    tau_k -= delta;  // exact for the same reason
  }
  sched.materialized = true;
  sched.rung_count = static_cast<double>(sched.rungs.size());
  sched.tail_bound = tail;
  sched.tail_majorant = std::pow(eps, mu2) * detail::zeta_value(q);
  return sched;
}

// Constant-cap schedule: eps_k = eps / 2^(k-1), delta_k = min(tau_k, c_cap).
inline TelescopingSchedule supercritical_schedule(double eps, double mu, double tau, double c_cap,
                                                  std::size_t max_rungs = 1u << 20) {
  if (!(mu > 0.0)) throw std::invalid_argument("supercritical schedule: mu must be positive");
  if (!(tau > 0.0 && eps > 0.0 && c_cap > 0.0))
    throw std::invalid_argument("supercritical schedule: tau, eps, c_cap must be positive");

  TelescopingSchedule sched;
  sched.law = ScheduleLaw::constant_cap;
  sched.tau = tau;
  sched.eps = eps;
  sched.mu1 = mu;
  sched.mu2 = mu;
  sched.c_cap = c_cap;

  const double k0_estimate = std::ceil(tau / c_cap);
  if (k0_estimate > static_cast<double>(max_rungs)) {
    sched.materialized = false;
    sched.rung_count = k0_estimate;
    // geometric tail: sum (eps 2^(1-k))^mu over all rungs
    sched.tail_bound = std::pow(eps, mu) / (1.0 - std::exp2(-mu));
    sched.tail_majorant = sched.tail_bound;
    return sched;
  }

  const double quantum = detail::pow2_floor(std::min(tau, c_cap) * std::exp2(-16));
  double tau_k = std::floor(tau / quantum) * quantum;
  sched.tau = tau_k;
  const double cap = std::floor(c_cap / quantum) * quantum;

  double partial = 0.0, tail = 0.0;
  double eps_k = eps;
  for (std::size_t k = 1; tau_k > 0.0; ++k) {
    if (k > max_rungs)
      throw std::runtime_error("supercritical schedule failed to exhaust tau within the rung cap");
    double delta = cap > 0.0 ? cap : quantum;
    if (delta >= tau_k) delta = tau_k;
    sched.rungs.push_back({eps_k, delta, tau_k});
    partial += delta;
    sched.delta_partial_sums.push_back(partial);
    tail += std::pow(eps_k, mu);
    tau_k -= delta;
    eps_k *= 0.5;
  }
  sched.materialized = true;
  sched.rung_count = static_cast<double>(sched.rungs.size());
  sched.tail_bound = tail;
  sched.tail_majorant = std::pow(eps, mu) / (1.0 - std::exp2(-mu));
  return sched;
}

}  // namespace dul
