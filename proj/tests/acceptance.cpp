// Acceptance suite: one binary, nine criteria, one pass/fail line each.
// Run all criteria with no arguments, or a single one with --criterion N.
// Exit code 0 when every executed criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "dul/config.hpp"
#include "dul/experiments.hpp"
#include "dul/report.hpp"

using namespace dul;

namespace {

const DomainGeometry kUnit = DomainGeometry::interval(0.0, 1.0);

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DegenerateCoefficient coef_for(double gamma) {
  DegenerateCoefficient c;
  c.gamma = gamma;
  return c;
}

BarrierConstants derived_constants(double gamma, double eps) {
  const auto reg = kUnit.regularity_constants(eps);
  const auto env = coef_for(gamma).envelope();
  return {env.c_tilde0, env.c0, env.c1, reg.k0, reg.nu0};
}

// --- 1. supercritical barrier certification ------------------------------

Check criterion_1() {
  Check c;
  const CertGrid grid{10000, 100};
  for (double gamma : {2.5, 3.0, 4.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto coef = coef_for(gamma);
    const auto k = derived_constants(gamma, 0.1);
    const auto b = select_supercritical_params(gamma, k, 1.0, 1.0, 0.1);

    // selector invariants, re-derived from scratch
    const double ring = (std::pow(1.0 - b.c, -b.beta) - 1.0) * (k.c1 + k.c0 * k.k0) -
                        b.beta * k.nu0 * k.c_tilde0;
    c.require(b.beta == 0.5 * (gamma - 2.0), "beta rule");
    c.require(b.c > 0.0 && b.c < 0.5 && ring < 0.0, "ring admissibility at gamma " + std::to_string(gamma));
    c.require(b.sigma == 1.0 - std::pow(1.0 - b.c, b.beta), "sigma definition");
    const double g2 = (gamma - 2.0) * (gamma - 2.0);
    c.require(b.alpha1 >= 10.0 * k.c0 * g2 / (b.sigma * b.sigma) &&
                  b.alpha1 >= 1.25 * k.c0 * g2,
              "alpha1 floor");
    const double gap = std::pow(1.5, b.beta) - 1.0;
    c.require(b.delta < b.sigma * b.sigma / ((gamma - 2.0) * (k.c1 + k.c0)) &&
                  b.delta < b.tau && b.delta < gap * gap / (4.0 * b.theta * b.alpha1),
              "delta ceiling");
    c.require(b.s == b.alpha1 * (b.tau + b.delta), "s rule");

    const auto cert = verify_E1(b, coef, kUnit, grid);
    c.require(cert.pass && cert.worst_value <= 1e-10,
              "E1 at gamma " + std::to_string(gamma) + " worst " +
                  std::to_string(cert.worst_value));
    const double el = seconds_since(t0);
    c.require(el < 10.0, "runtime " + std::to_string(el) + " s at gamma " + std::to_string(gamma));
  }
  return c;
}

// --- 2. subcritical barrier certification --------------------------------

Check criterion_2() {
  Check c;
  const CertGrid grid{10000, 100};
  const std::vector<double> sweep{0.2, 0.1, 0.05, 0.025};
  for (double gamma : {1.0, 1.5, 2.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto coef = coef_for(gamma);
    const auto k = derived_constants(gamma, 0.1);
    const auto b = select_subcritical_params(gamma, k, 1.0, 0.1, 1.0);

    const auto d1 = verify_D1(b, coef, kUnit, grid);
    c.require(d1.pass && d1.worst_value <= 1e-10,
              "D1 at gamma " + std::to_string(gamma));
    const auto d2 = verify_D2(coef, kUnit, sweep, grid, 1.0);
    c.require(d2.pass, "D2 sweep stability at gamma " + std::to_string(gamma));

    std::vector<double> ts;
    for (int j = 0; j < 10; ++j) ts.push_back(b.tau - b.delta + b.delta * (j + 0.5) / 10.0);
    const auto nd = normal_derivative_check(b, kUnit, ts);
    c.require(nd.pass && nd.worst_value <= 1e-10,
              "normal derivative at gamma " + std::to_string(gamma));
    const double el = seconds_since(t0);
    c.require(el < 10.0, "runtime " + std::to_string(el) + " s at gamma " + std::to_string(gamma));
  }
  return c;
}

// --- 3. negative controls --------------------------------------------------

Check criterion_3() {
  Check c;
  const CertGrid grid{10000, 100};

  // deflating alpha1 to 1 must break the supercritical claim
  {
    const auto coef = coef_for(4.0);
    const auto k = derived_constants(4.0, 0.1);
    auto b = select_supercritical_params(4.0, k, 1.0, 1.0, 0.1);
    b.alpha1 = 1.0;
    b.s = b.alpha1 * (b.tau + b.delta);
    const auto cert = verify_E1(b, coef, kUnit, grid);
    c.require(!cert.pass && cert.worst_value > 0.0,
              "alpha1 control failed to fail (worst " + std::to_string(cert.worst_value) + ")");
  }
  // inflating delta by 1e6 must break the subcritical claim
  {
    const auto coef = coef_for(1.5);
    const auto k = derived_constants(1.5, 0.1);
    auto b = select_subcritical_params(1.5, k, 1.0, 0.1);
    b.delta *= 1e6;
    b.s = b.alpha1 * (b.tau + b.delta);
    const auto cert = verify_D1(b, coef, kUnit, grid);
    c.require(!cert.pass && cert.worst_value > 0.0,
              "delta control failed to fail (worst " + std::to_string(cert.worst_value) + ")");
  }
  return c;
}

// --- 4. solver convergence, conservation, comparison ------------------------

Check criterion_4() {
  Check c;
  // manufactured solution with a = 1
  double prev_err = 0.0;
  for (std::size_t n : {64, 128, 256, 512}) {
    ProblemSpec spec;
    spec.geom = kUnit;
    spec.coefficient.gamma = 0.0;
    spec.initial = [](double x) { return std::sin(M_PI * x); };
    spec.source = [](double x, double t) {
      return (M_PI * M_PI - 1.0) * std::exp(-t) * std::sin(M_PI * x);
    };
    spec.horizon = 0.25;
    spec.treatment = BoundaryTreatment::dirichlet(0.0, 0.0);
    const auto mesh = build_mesh(kUnit, n, 1.0);
    const auto traj = solve(spec, mesh, spec.horizon / static_cast<double>(n), 0.5);
    double err = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i)
      err = std::max(err, std::abs(traj.levels.back()[i] -
                                   std::exp(-0.25) * std::sin(M_PI * mesh.nodes[i])));
    if (prev_err > 0.0) {
      const double order = std::log2(prev_err / err);
      c.require(order >= 1.9, "order " + std::to_string(order) + " at n " + std::to_string(n));
    }
    prev_err = err;
  }

  // degenerate conservation + comparison principle
  ProblemSpec spec;
  spec.geom = kUnit;
  spec.coefficient.gamma = 4.0;
  spec.initial = [](double x) { return 0.5 + 0.5 * std::cos(2.0 * M_PI * x); };
  spec.horizon = 1.0;
  spec.treatment = BoundaryTreatment::flux_none();
  const auto mesh = build_mesh(kUnit, 256, 2.0);
  const auto traj = solve(spec, mesh, 1.0 / 2048.0, 1.0);
  double u0_min = 1e300, u0_max = -1e300, prev_mass = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    u0_min = std::min(u0_min, traj.levels[0][i]);
    u0_max = std::max(u0_max, traj.levels[0][i]);
    prev_mass += traj.levels[0][i] * mesh.volumes[i];
  }
  double worst_drift = 0.0, worst_overshoot = 0.0;
  for (std::size_t k = 1; k < traj.level_count(); ++k) {
    double mass = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) mass += traj.levels[k][i] * mesh.volumes[i];
    worst_drift = std::max(worst_drift, std::abs(mass - prev_mass));
    prev_mass = mass;
    for (double v : traj.levels[k])
      worst_overshoot = std::max(worst_overshoot, std::max(u0_min - v, v - u0_max));
  }
  c.require(worst_drift <= 1e-10, "mass drift " + std::to_string(worst_drift));
  c.require(worst_overshoot <= 1e-12, "comparison overshoot " + std::to_string(worst_overshoot));
  return c;
}

// --- 5. dichotomy in divergence form ----------------------------------------

Check criterion_5() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> sweep{0.2, 0.1, 0.05, 0.025};
  SolveOptions coarse;  // defaults: 512 nodes, dt = T/2048
  SolveOptions fine;
  fine.n_nodes = 1024;
  fine.dt = 0.5 / 4096.0;

  const auto r15 = uniqueness_probe(1.5, kUnit, {0.0, 1.0}, sweep, 0.5,
                                    OperatorForm::divergence, coarse);
  c.require(r15.verdict == Verdict::unique_trend,
            std::string("gamma 1.5 verdict ") + to_string(r15.verdict));
  const auto r05 = uniqueness_probe(0.5, kUnit, {0.0, 1.0}, sweep, 0.5,
                                    OperatorForm::divergence, coarse);
  c.require(r05.verdict == Verdict::nonunique_trend,
            std::string("gamma 0.5 verdict ") + to_string(r05.verdict));

  const auto r15f = uniqueness_probe(1.5, kUnit, {0.0, 1.0}, sweep, 0.5,
                                     OperatorForm::divergence, fine);
  const auto r05f = uniqueness_probe(0.5, kUnit, {0.0, 1.0}, sweep, 0.5,
                                     OperatorForm::divergence, fine);
  c.require(r15f.verdict == r15.verdict && r05f.verdict == r05.verdict,
            "verdict flipped under refinement");
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    c.require(std::abs(r15f.gaps[i] - r15.gaps[i]) < 0.10 * r15.gaps[i],
              "gamma 1.5 gap shift at eps " + std::to_string(sweep[i]));
    c.require(std::abs(r05f.gaps[i] - r05.gaps[i]) < 0.10 * r05.gaps[i],
              "gamma 0.5 gap shift at eps " + std::to_string(sweep[i]));
  }
  const double el = seconds_since(t0);
  c.require(el < 120.0, "runtime " + std::to_string(el) + " s");
  return c;
}

// --- 6. threshold contrast ---------------------------------------------------

Check criterion_6() {
  Check c;
  const auto table = form_threshold_contrast(kUnit, {0.5, 1.5, 2.5});
  auto verdict_of = [&](double gamma, OperatorForm form) {
    for (const auto& row : table)
      if (row.gamma == gamma && row.form == form) return row.verdict;
    return Verdict::inconclusive;
  };
  c.require(verdict_of(0.5, OperatorForm::divergence) == Verdict::nonunique_trend,
            "divergence gamma 0.5");
  c.require(verdict_of(1.5, OperatorForm::divergence) == Verdict::unique_trend,
            "divergence gamma 1.5");
  c.require(verdict_of(1.5, OperatorForm::nondivergence) == Verdict::nonunique_trend,
            "nondivergence gamma 1.5");
  c.require(verdict_of(2.5, OperatorForm::nondivergence) == Verdict::unique_trend,
            "nondivergence gamma 2.5");
  return c;
}

// --- 7. iteration replay ------------------------------------------------------

Check criterion_7() {
  Check c;
  // independent tail oracle: direct ascending-order partial sums
  auto zeta_partial_oracle = [](double q, std::size_t K) {
    double s = 0.0;
    for (std::size_t k = K; k >= 1; --k) s += std::pow(static_cast<double>(k), -q);
    return s;
  };

  {
    const auto rep = iteration_replay(4.0, kUnit, 0.5, 1.0);
    c.require(rep.fraction_satisfied == 1.0,
              "gamma 4 rungs " + std::to_string(rep.rungs_satisfied) + "/" +
                  std::to_string(rep.rung_count));
    // halving radii: tail is a geometric partial sum
    double oracle = 0.0;
    for (std::size_t k = 0; k < rep.rung_count; ++k)
      oracle += std::pow(rep.eps_start * std::pow(0.5, double(k)), rep.mu2);
    oracle *= rep.C_hat;
    c.require(std::abs(rep.telescoped_bound - oracle) <= 0.05 * oracle,
              "gamma 4 tail vs oracle");
    c.require(rep.telescoped_bound <=
                  rep.C_hat * std::pow(rep.eps_start, rep.mu2) / (1.0 - std::exp2(-rep.mu2)) *
                      (1.0 + 1e-12),
              "gamma 4 tail majorant");
  }
  {
    const auto rep = iteration_replay(1.5, kUnit, 0.5, 1.2);
    c.require(rep.fraction_satisfied == 1.0,
              "gamma 1.5 rungs " + std::to_string(rep.rungs_satisfied) + "/" +
                  std::to_string(rep.rung_count));
    const double S = zeta_partial_oracle(rep.mu2 / rep.mu1, rep.rung_count);
    const double oracle = rep.C_hat * std::pow(rep.eps_start, rep.mu2) * S;
    c.require(std::abs(rep.telescoped_bound - oracle) <= 0.05 * oracle,
              "gamma 1.5 tail vs zeta partial-sum oracle");
  }
  return c;
}

// --- 8. weighted-class checks --------------------------------------------------

Check criterion_8() {
  Check c;
  const std::vector<double> sweep{0.2, 0.1, 0.05, 0.025};

  // bounded field passes the supercritical condition for every theta
  auto one = [](double, double) { return 1.0; };
  for (double theta : {0.25, 1.0, 4.0}) {
    const auto rep = check_supercritical_class(one, theta, sweep, kUnit, 1.0, 4.0);
    c.require(rep.pass, "bounded field at theta " + std::to_string(theta));
    c.require(rep.fitted_C <= 1.0 + 1e-9, "fitted constant exceeds T |domain|");
    for (std::size_t i = 0; i < sweep.size(); ++i)
      c.require(std::abs(rep.lhs_values[i] - (1.0 - 2.0 * sweep[i])) <= 1e-6,
                "interior mass quadrature at eps " + std::to_string(sweep[i]));
  }

  // shell condition with the power field d^-0.3 at gamma 1.8, mu 0.5
  auto u_mild = [](double x, double) { return std::pow(std::min(x, 1.0 - x), -0.3); };
  const auto shell = check_shell_class(u_mild, 0.5, sweep, kUnit, 1.0, 1.8);
  c.require(shell.pass, "shell condition for d^-0.3");
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const double eps = sweep[i];
    const double closed = 4.0 * (std::sqrt(2.0 * eps / 3.0) - std::sqrt(0.5 * eps));
    c.require(std::abs(shell.lhs_values[i] - closed) <= 1e-6,
              "shell quadrature at eps " + std::to_string(eps));
  }

  // pointwise criterion rejects d^-0.5 at gamma 1.8 (threshold exponent 0.4)
  auto u_steep = [](double x, double) { return std::pow(std::min(x, 1.0 - x), -0.5); };
  const auto pw = check_pointwise_growth(u_steep, 0.39, kUnit, 1.0);
  c.require(!pw.holds, "d^-0.5 escaped the pointwise class");
  const auto pw_ok = check_pointwise_growth(u_mild, 0.3, kUnit, 1.0);
  c.require(pw_ok.holds && std::abs(pw_ok.C_bar - 1.0) <= 1e-9, "d^-0.3 pointwise constant");
  return c;
}

// --- 9. schedule arithmetic -----------------------------------------------------

Check criterion_9() {
  Check c;
  for (auto params : {std::tuple{0.1, 1.0, 2.0, 0.05, 1.0},
                      std::tuple{0.2, 1.0, 1.2, 0.01, 0.05},
                      std::tuple{0.15, 0.5, 1.1, 0.02, 2.0},
                      std::tuple{0.08, 2.0, 2.5, 0.03, 4.0}}) {
    const auto [eps, mu1, mu2, tau, cap] = params;
    const auto s = telescoping_schedule(eps, mu1, mu2, tau, cap);
    c.require(s.materialized, "schedule did not materialize");
    double running = 0.0;
    bool exact = true;
    for (std::size_t k = 0; k < s.rungs.size(); ++k) {
      running += s.rungs[k].delta;
      const double tau_next = k + 1 < s.rungs.size() ? s.rungs[k + 1].tau : 0.0;
      exact = exact && (s.tau - tau_next == running);
      exact = exact && (running == s.delta_partial_sums[k]);
    }
    c.require(exact, "bookkeeping identity broke");
    c.require(s.tau - s.delta_partial_sums.back() == 0.0, "walk missed zero");
  }
  bool rejected = false;
  try {
    telescoping_schedule(0.1, 2.0, 1.0, 0.05, 1.0);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  c.require(rejected, "mu2 <= mu1 was not rejected");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

  const std::vector<std::pair<const char*, std::function<Check()>>> criteria = {
      {"barrier certification, supercritical", criterion_1},
      {"barrier certification, subcritical", criterion_2},
      {"negative controls", criterion_3},
      {"solver convergence and conservation", criterion_4},
      {"dichotomy, divergence form", criterion_5},
      {"threshold contrast", criterion_6},
      {"iteration replay", criterion_7},
      {"weighted-class checks", criterion_8},
      {"schedule arithmetic", criterion_9},
  };

  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int idx = static_cast<int>(i) + 1;
    if (only != 0 && only != idx) continue;
    Check res;
    try {
      res = criteria[i].second();
    } catch (const std::exception& e) {
      res.ok = false;
      res.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %d (%s): %s%s%s\n", idx, criteria[i].first,
                res.ok ? "PASS" : "FAIL", res.detail.empty() ? "" : " -- ",
                res.detail.c_str());
    std::fflush(stdout);
    all_ok = all_ok && res.ok;
  }
  return all_ok ? 0 : 1;
}
