#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <stdexcept>

#include "dul/solver.hpp"

using namespace dul;

namespace {
const DomainGeometry kUnit = DomainGeometry::interval(0.0, 1.0);

ProblemSpec heat_spec() {
  ProblemSpec spec;
  spec.geom = kUnit;
  spec.coefficient.gamma = 0.0;  // a = 1
  spec.initial = [](double x) { return std::sin(M_PI * x); };
  spec.source = [](double x, double t) {
    return (M_PI * M_PI - 1.0) * std::exp(-t) * std::sin(M_PI * x);
  };
  spec.horizon = 0.25;
  spec.treatment = BoundaryTreatment::dirichlet(0.0, 0.0);
  return spec;
}
}  // namespace

TEST_CASE("mesh construction") {
  auto uniform = build_mesh(kUnit, 16, 1.0);
  CHECK(uniform.size() == 16);
  for (std::size_t i = 0; i + 1 < uniform.faces.size(); ++i)
    CHECK(uniform.faces[i + 1] - uniform.faces[i] == doctest::Approx(1.0 / 16.0));

  auto graded = build_mesh(kUnit, 256, 2.0);
  CHECK(graded.min_spacing() / graded.max_spacing() == doctest::Approx(1.0 / 255.0).epsilon(1e-6));
  // nodes stay strictly inside and off the ridge
  for (double x : graded.nodes) {
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    CHECK(x != 0.5);
  }

  auto disk = build_mesh(DomainGeometry::disk_radial(1.0, 2), 64, 2.0);
  CHECK(disk.nodes.front() > 0.0);
  CHECK(disk.nodes.back() < 1.0);
  // clustering toward the outer boundary
  CHECK(disk.faces[64] - disk.faces[63] < disk.faces[1] - disk.faces[0]);

  CHECK_THROWS_AS(build_mesh(kUnit, 8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(kUnit, 64, 0.5), std::invalid_argument);
}

TEST_CASE("operator on reference fields") {
  ProblemSpec spec;
  spec.geom = kUnit;
  spec.coefficient.gamma = 0.0;
  spec.initial = [](double) { return 0.0; };
  spec.treatment = BoundaryTreatment::flux_none();
  auto mesh = build_mesh(kUnit, 128, 1.0);

  // linear field: zero divergence away from the closed boundary rows
  std::vector<double> lin(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) lin[i] = 2.0 * mesh.nodes[i] - 0.3;
  auto dlin = apply_operator(spec, mesh, lin, 0.0);
  for (std::size_t i = 1; i + 1 < mesh.size(); ++i) CHECK(std::abs(dlin[i]) <= 1e-12);

  // quadratic field: second difference is exact
  std::vector<double> quad(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) quad[i] = mesh.nodes[i] * mesh.nodes[i];
  auto dquad = apply_operator(spec, mesh, quad, 0.0);
  for (std::size_t i = 1; i + 1 < mesh.size(); ++i)
    CHECK(dquad[i] == doctest::Approx(2.0).epsilon(1e-10));

  // constant field under a degenerate coefficient: exactly zero
  spec.coefficient.gamma = 4.0;
  std::vector<double> ones(mesh.size(), 1.0);
  auto dconst = apply_operator(spec, mesh, ones, 0.0);
  for (double v : dconst) CHECK(v == 0.0);
}

TEST_CASE("divergence and non-divergence forms agree for constant a") {
  ProblemSpec spec;
  spec.geom = kUnit;
  spec.coefficient.gamma = 0.0;
  spec.coefficient.C0 = 2.5;
  spec.initial = [](double) { return 0.0; };
  spec.treatment = BoundaryTreatment::flux_none();
  auto mesh = build_mesh(kUnit, 100, 1.3);
  std::vector<double> u(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) u[i] = std::cos(3.0 * mesh.nodes[i]);
  auto d1 = apply_operator(spec, mesh, u, 0.0);
  spec.coefficient.form = OperatorForm::nondivergence;
  auto d2 = apply_operator(spec, mesh, u, 0.0);
  for (std::size_t i = 1; i + 1 < u.size(); ++i)
    CHECK(d1[i] == doctest::Approx(d2[i]).epsilon(1e-12));
}

TEST_CASE("single-step sanity") {
  ProblemSpec spec;
  spec.geom = kUnit;
  spec.coefficient.gamma = 0.0;
  spec.initial = [](double) { return 0.0; };
  spec.horizon = 1.0;
  spec.treatment = BoundaryTreatment::flux_none();
  auto mesh = build_mesh(kUnit, 64, 1.0);

  // zero stays zero
  std::vector<double> z(mesh.size(), 0.0);
  auto z1 = step_theta(spec, mesh, z, 0.0, 1e-3, 1.0);
  for (double v : z1) CHECK(v == 0.0);

  // one implicit step of the heat eigenmode
  spec.treatment = BoundaryTreatment::dirichlet(0.0, 0.0);
  std::vector<double> mode(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) mode[i] = std::sin(M_PI * mesh.nodes[i]);
  const double dt = 1e-4;
  auto m1 = step_theta(spec, mesh, mode, 0.0, dt, 1.0);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double expect = std::exp(-M_PI * M_PI * dt) * mode[i];
    CHECK(m1[i] == doctest::Approx(expect).epsilon(5e-4));
  }

  // explicit stability guard
  CHECK_THROWS_AS(step_theta(spec, mesh, mode, 0.0, 1.0, 0.0), std::runtime_error);
}

TEST_CASE("manufactured-solution convergence order") {
  double prev_err = 0.0;
  int measured = 0;
  for (std::size_t n : {64, 128, 256, 512}) {
    auto spec = heat_spec();
    auto mesh = build_mesh(kUnit, n, 1.0);
    const double dt = spec.horizon / static_cast<double>(n);
    auto traj = solve(spec, mesh, dt, 0.5);
    double err = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i)
      err = std::max(err, std::abs(traj.levels.back()[i] -
                                   std::exp(-spec.horizon) * std::sin(M_PI * mesh.nodes[i])));
    if (prev_err > 0.0) {
      const double order = std::log2(prev_err / err);
      CHECK(order >= 1.9);
      ++measured;
    }
    prev_err = err;
  }
  CHECK(measured == 3);
}

TEST_CASE("residual measures the defect") {
  auto spec = heat_spec();
  auto mesh = build_mesh(kUnit, 256, 1.0);
  auto traj = solve(spec, mesh, spec.horizon / 512.0, 0.5);
  CHECK(residual(spec, mesh, traj) <= 1e-5);

  // zero trajectory of the homogeneous problem has zero residual
  ProblemSpec zero = spec;
  zero.source = nullptr;
  zero.initial = [](double) { return 0.0; };
  auto tz = solve(zero, mesh, zero.horizon / 64.0, 1.0);
  CHECK(residual(zero, mesh, tz) == 0.0);

  // noise has a large defect
  Trajectory noisy = tz;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  for (auto& level : noisy.levels)
    for (auto& v : level) v = un(rng);
  CHECK(residual(zero, mesh, noisy) > 1.0);
}

TEST_CASE("conservation and comparison for the degenerate run") {
  ProblemSpec spec;
  spec.geom = kUnit;
  spec.coefficient.gamma = 4.0;
  spec.initial = [](double x) { return 0.5 + 0.5 * std::cos(2.0 * M_PI * x); };
  spec.horizon = 1.0;
  spec.treatment = BoundaryTreatment::flux_none();
  auto mesh = build_mesh(kUnit, 200, 2.0);
  auto traj = solve(spec, mesh, 1.0 / 512.0, 1.0);

  double u0_min = 1e300, u0_max = -1e300, prev_mass = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    u0_min = std::min(u0_min, traj.levels[0][i]);
    u0_max = std::max(u0_max, traj.levels[0][i]);
    prev_mass += traj.levels[0][i] * mesh.volumes[i];
  }
  for (std::size_t k = 1; k < traj.level_count(); ++k) {
    double mass = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) mass += traj.levels[k][i] * mesh.volumes[i];
    CHECK(std::abs(mass - prev_mass) <= 1e-10);
    prev_mass = mass;
    for (double v : traj.levels[k]) {
      CHECK(v >= u0_min - 1e-12);
      CHECK(v <= u0_max + 1e-12);
    }
  }
}

TEST_CASE("trapezoidal stepping conserves mass per step") {
  ProblemSpec spec;
  spec.geom = kUnit;
  spec.coefficient.gamma = 4.0;
  spec.initial = [](double x) { return 0.5 + 0.5 * std::cos(2.0 * M_PI * x); };
  spec.horizon = 0.25;
  spec.treatment = BoundaryTreatment::flux_none();
  auto mesh = build_mesh(kUnit, 128, 2.0);
  std::vector<double> u(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) u[i] = spec.initial(mesh.nodes[i]);
  double mass = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) mass += u[i] * mesh.volumes[i];
  for (int k = 0; k < 64; ++k) {
    u = step_theta(spec, mesh, u, k * 1e-3, 1e-3, 0.5);
    double m = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) m += u[i] * mesh.volumes[i];
    CHECK(std::abs(m - mass) <= 1e-10);
    mass = m;
  }
}

TEST_CASE("disk solver conserves mass") {
  ProblemSpec spec;
  spec.geom = DomainGeometry::disk_radial(1.0, 2);
  spec.coefficient.gamma = 3.0;
  spec.initial = [](double r) { return 1.0 - r * r; };
  spec.horizon = 0.5;
  spec.treatment = BoundaryTreatment::flux_none();
  auto mesh = build_mesh(spec.geom, 96, 2.0);
  auto traj = solve(spec, mesh, 0.5 / 256.0, 1.0);
  double m0 = 0.0, mT = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    m0 += traj.levels.front()[i] * mesh.volumes[i];
    mT += traj.levels.back()[i] * mesh.volumes[i];
  }
  CHECK(mT == doctest::Approx(m0).epsilon(1e-10));
}

TEST_CASE("trajectory structure and blow-up guard") {
  ProblemSpec spec;
  spec.geom = kUnit;
  spec.coefficient.gamma = 0.0;
  spec.initial = [](double) { return 0.0; };
  spec.horizon = 1.0;
  spec.treatment = BoundaryTreatment::flux_none();
  auto mesh = build_mesh(kUnit, 32, 1.0);
  auto traj = solve(spec, mesh, 0.3, 1.0);
  CHECK(traj.level_count() == 5);  // ceil(1/0.3) + 1
  CHECK(traj.times.back() == doctest::Approx(1.0));

  ProblemSpec boom = spec;
  boom.source = [](double, double) { return 1e13; };
  CHECK_THROWS_AS(solve(boom, mesh, 0.3, 1.0), std::runtime_error);
}

TEST_CASE("subsolution regularization certificate") {
  auto spec = heat_spec();
  auto mesh = build_mesh(kUnit, 192, 1.0);
  auto traj = solve(spec, mesh, spec.horizon / 768.0, 0.5);
  auto cert = subsolution_check(traj, 0.01, spec, mesh);
  CHECK(cert.pass);
  CHECK_THROWS_AS(subsolution_check(traj, 0.0, spec, mesh), std::invalid_argument);
  CHECK_THROWS_AS(subsolution_check(traj, -1.0, spec, mesh), std::invalid_argument);

  // constant state: both sides vanish identically
  ProblemSpec cspec = spec;
  cspec.source = nullptr;
  cspec.initial = [](double) { return 2.0; };
  cspec.treatment = BoundaryTreatment::flux_none();
  auto ctraj = solve(cspec, mesh, cspec.horizon / 64.0, 1.0);
  auto ccert = subsolution_check(ctraj, 0.5, cspec, mesh);
  CHECK(ccert.pass);
  CHECK(std::abs(ccert.worst_value) <= 1e-8);  // pure linear-solve roundoff
}

TEST_CASE("snapshot round trip") {
  auto spec = heat_spec();
  auto mesh = build_mesh(kUnit, 48, 1.0);
  auto traj = solve(spec, mesh, spec.horizon / 16.0, 1.0);

  const std::string path = (std::filesystem::temp_directory_path() / "dul_snap_test.bin").string();
  write_trajectory_binary(traj, path);
  auto back = read_trajectory_binary(path);
  REQUIRE(back.level_count() == traj.level_count());
  REQUIRE(back.mesh.size() == traj.mesh.size());
  // property: the interpolants agree at arbitrary probe points
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> ux(0.05, 0.95), ut(0.0, spec.horizon);
  for (int i = 0; i < 200; ++i) {
    const double x = ux(rng), t = ut(rng);
    CHECK(back.value(x, t) == traj.value(x, t));
  }
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_trajectory_binary("/nonexistent/nowhere.bin"), std::runtime_error);
}
