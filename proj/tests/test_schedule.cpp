#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <tuple>

#include "dul/schedule.hpp"

using namespace dul;

TEST_CASE("single-rung schedule") {
  // cap exceeds the horizon, so one backstep exhausts it
  auto s = telescoping_schedule(0.1, 1.0, 2.0, 0.05, 1.0);
  CHECK(s.materialized);
  CHECK(s.rung_count == 1.0);
  CHECK(s.rungs[0].delta == doctest::Approx(0.05).epsilon(1e-4));
  CHECK(s.rungs[0].eps == doctest::Approx(0.1));
  CHECK(s.tail_bound == doctest::Approx(0.01).epsilon(1e-12));
  // majorant is the full zeta tail
  CHECK(s.tail_majorant == doctest::Approx(0.01 * M_PI * M_PI / 6.0).epsilon(1e-6));
  CHECK(s.tail_bound <= s.tail_majorant);
}

TEST_CASE("exact bookkeeping identity and termination") {
  for (auto params : {std::tuple{0.1, 1.0, 2.0, 0.05, 1.0},
                      std::tuple{0.2, 1.0, 1.2, 0.003, 0.01},
                      std::tuple{0.15, 0.4, 0.9, 0.02, 0.5},
                      std::tuple{0.2, 2.0, 3.7, 0.01, 7.0}}) {
    auto [eps, mu1, mu2, tau, cap] = params;
    auto s = telescoping_schedule(eps, mu1, mu2, tau, cap);
    REQUIRE(s.materialized);
    double running = 0.0;
    for (std::size_t k = 0; k < s.rungs.size(); ++k) {
      running += s.rungs[k].delta;  // same order as the generator
      CHECK(running == s.delta_partial_sums[k]);
      const double tau_next = k + 1 < s.rungs.size() ? s.rungs[k + 1].tau : 0.0;
      CHECK(s.tau - tau_next == running);  // exact, not approximate
      CHECK(s.rungs[k].delta <= std::min(s.rungs[k].tau, cap * std::pow(s.rungs[k].eps, mu1)));
      CHECK(s.rungs[k].eps == eps / std::pow(double(k + 1), 1.0 / mu1));
    }
    // the walk ends exactly at zero
    CHECK(s.tau - s.delta_partial_sums.back() == 0.0);
  }
}

TEST_CASE("rejects non-summable exponent pairs") {
  CHECK_THROWS_AS(telescoping_schedule(0.1, 2.0, 1.0, 0.05, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(telescoping_schedule(0.1, 2.0, 2.0, 0.05, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(telescoping_schedule(0.1, 1.0, 2.0, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("long horizons resolve analytically via harmonic inversion") {
  // tau/(c eps^mu1) = 100: rung count is astronomic but well-defined
  auto s = telescoping_schedule(0.1, 1.0, 2.0, 10.0, 1.0);
  CHECK_FALSE(s.materialized);
  // smallest k with H_k >= 100, i.e. log k0 = 100 - euler_gamma up to o(1)
  CHECK(std::log(s.rung_count) == doctest::Approx(100.0 - 0.5772156649).epsilon(1e-6));
  // the tail still obeys the zeta majorant
  CHECK(s.tail_bound <= s.tail_majorant * (1.0 + 1e-12));
  CHECK(s.tail_bound == doctest::Approx(s.tail_majorant).epsilon(1e-10));  // tail of k^-2 is tiny
}

TEST_CASE("harmonic partial-sum oracle matches the generator on modest horizons") {
  // independent direct summation of the exhaustion index
  const double eps = 0.1, mu1 = 1.0, cap = 0.05, tau = 0.04;
  auto s = telescoping_schedule(eps, mu1, 2.0, tau, cap);
  REQUIRE(s.materialized);
  double acc = 0.0;
  std::size_t k_oracle = 0;
  while (acc < tau / (cap * eps)) acc += 1.0 / double(++k_oracle);
  CHECK(s.rung_count == doctest::Approx(double(k_oracle)).epsilon(0.002));
}

TEST_CASE("constant-cap halving schedule") {
  auto s = supercritical_schedule(0.2, 2.0, 0.5, 0.015625);
  REQUIRE(s.materialized);
  CHECK(s.rung_count == doctest::Approx(32.0));
  double running = 0.0;
  double eps_k = 0.2;
  for (std::size_t k = 0; k < s.rungs.size(); ++k) {
    CHECK(s.rungs[k].eps == eps_k);
    running += s.rungs[k].delta;
    CHECK(s.tau - (k + 1 < s.rungs.size() ? s.rungs[k + 1].tau : 0.0) == running);
    eps_k *= 0.5;
  }
  // geometric tail against its closed form
  CHECK(s.tail_bound <= s.tail_majorant);
  CHECK(s.tail_majorant == doctest::Approx(0.04 / (1.0 - 0.25)));
}

TEST_CASE("partial zeta sums agree with direct summation") {
  for (double q : {1.2, 1.5, 2.0, 3.0}) {
    double direct = 0.0;
    for (int k = 1000; k >= 1; --k) direct += std::pow(double(k), -q);
    CHECK(dul::detail::partial_zeta(q, 1000.0) == doctest::Approx(direct).epsilon(1e-12));
  }
  // large-K Euler-Maclaurin branch consistency at the crossover
  const double a = dul::detail::partial_zeta(1.4, 1.9e6);
  const double b = dul::detail::partial_zeta(1.4, 2.1e6);
  CHECK(a < b);
  CHECK(b - a == doctest::Approx(0.2e6 * std::pow(2e6, -1.4)).epsilon(1e-2));
}
