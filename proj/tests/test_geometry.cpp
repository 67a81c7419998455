#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "dul/geometry.hpp"

using namespace dul;

TEST_CASE("interval distance field") {
  auto g = DomainGeometry::interval(0.0, 1.0);
  CHECK(g.distance(0.25) == doctest::Approx(0.25));
  CHECK(g.distance(0.5) == doctest::Approx(0.5));
  CHECK(g.distance(0.0) == 0.0);
  CHECK(g.distance(1.0) == 0.0);
  CHECK(g.grad_distance(0.25) == 1.0);
  CHECK(g.grad_distance(0.75) == -1.0);
  CHECK(g.laplacian_distance(0.1) == 0.0);
  CHECK_THROWS_AS(g.distance(1.5), std::domain_error);
  CHECK_THROWS_AS(g.grad_distance(0.5), std::domain_error);  // ridge
}

TEST_CASE("radial disk distance field") {
  auto g = DomainGeometry::disk_radial(1.0, 2);
  CHECK(g.distance(0.7) == doctest::Approx(0.3));
  CHECK(g.grad_distance(0.5) == -1.0);
  CHECK(g.laplacian_distance(0.5) == doctest::Approx(-2.0));
  auto g3 = DomainGeometry::disk_radial(1.0, 3);
  CHECK(g3.laplacian_distance(0.5) == doctest::Approx(-4.0));
  CHECK_THROWS_AS(g.laplacian_distance(0.0), std::domain_error);
}

TEST_CASE("regularity constants") {
  auto gi = DomainGeometry::interval(0.0, 1.0);
  auto ri = gi.regularity_constants(0.1);
  CHECK(ri.k0 == 0.0);
  CHECK(ri.nu0 == 1.0);

  auto gd = DomainGeometry::disk_radial(1.0, 2);
  auto rd = gd.regularity_constants(0.1);
  CHECK(rd.k0 == doctest::Approx(1.0 / 0.9));
  CHECK(rd.nu0 == 1.0);
  auto rd2 = gd.regularity_constants(0.5);
  CHECK(rd2.k0 == doctest::Approx(2.0));
  CHECK_THROWS_AS(gd.regularity_constants(0.95), std::invalid_argument);
}

TEST_CASE("interior set and cutoff shell membership") {
  auto g = DomainGeometry::interval(0.0, 1.0);
  CHECK(g.in_interior_set(0.3, 0.2));
  CHECK_FALSE(g.in_interior_set(0.15, 0.2));
  CHECK(g.shell_membership(0.3, 0.2) == ShellClass::inner);
  CHECK(g.shell_membership(0.12, 0.2) == ShellClass::shell);
  CHECK(g.shell_membership(0.05, 0.2) == ShellClass::outer);
}

TEST_CASE("sampled distance-field properties") {
  std::mt19937 rng(7);
  for (auto g : {DomainGeometry::interval(-1.0, 2.0), DomainGeometry::disk_radial(1.5, 3)}) {
    std::uniform_real_distribution<double> ux(g.coord_lo(), g.coord_hi());
    const auto reg = g.regularity_constants(0.5 * g.eps0());
    double prev_x = ux(rng);
    for (int i = 0; i < 2000; ++i) {
      double x = ux(rng);
      if (x == g.ridge_coordinate()) continue;
      // gradient bound everywhere off the ridge
      CHECK(std::abs(g.grad_distance(x)) <= 1.0 + 1e-12);
      // layer bounds
      if (g.distance(x) <= 0.5 * g.eps0() && x != 0.0) {
        CHECK(std::abs(g.laplacian_distance(x)) <= reg.k0 + 1e-12);
        CHECK(std::abs(g.grad_distance(x)) >= reg.nu0 - 1e-12);
      }
      // 1-Lipschitz
      CHECK(std::abs(g.distance(x) - g.distance(prev_x)) <= std::abs(x - prev_x) + 1e-12);
      // nesting of interior sets
      const double e1 = 0.1 * g.half_width(), e2 = 0.3 * g.half_width();
      if (g.in_interior_set(x, e2)) CHECK(g.in_interior_set(x, e1));
      prev_x = x;
    }
  }
}

TEST_CASE("measure and metric") {
  CHECK(DomainGeometry::interval(0.0, 2.0).measure() == doctest::Approx(2.0));
  CHECK(DomainGeometry::disk_radial(1.0, 2).measure() == doctest::Approx(M_PI));
  CHECK(DomainGeometry::disk_radial(1.0, 3).measure() == doctest::Approx(4.0 * M_PI / 3.0));
}
