// dul: a numerical laboratory for degenerate parabolic uniqueness questions.
//
// Subcommands
//   verify-barrier : select admissible barrier parameters and certify the
//                    differential-inequality claims and cutoff bounds
//   solve          : run the finite-volume solver, export CSV + snapshot
//   experiment     : uniqueness probes, threshold contrast, nonuniqueness
//                    demo, iteration replay, existence bound fit
//   norm-check     : growth/class conditions for a trajectory snapshot
//   schedule       : print a telescoping backstep schedule
//
// Exit codes: 0 pass, 1 certified fail, 2 config error, 3 I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dul/config.hpp"
#include "dul/report.hpp"

namespace fs = std::filesystem;
using namespace dul;

namespace {

struct CliState {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  unsigned jobs = 0;                   // 0: take from config
};

KeyValueConfig load_config(const CliState& cli) {
  std::string text;
  if (!cli.config_path.empty()) {
    std::ifstream in(cli.config_path);
    if (!in) throw ConfigError("cannot read config file: " + cli.config_path);
    std::ostringstream os;
    os << in.rdbuf();
    text = os.str();
  }
  KeyValueConfig kv = KeyValueConfig::parse(text);
  for (const std::string& ov : cli.overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects section.key=value, got: " + ov);
    kv.set(ov.substr(0, eq), ov.substr(eq + 1));
  }
  return kv;
}

fs::path output_root(const RunConfig& rc) {
  if (const char* env = std::getenv("DUL_OUTPUT_DIR")) return fs::path(env);
  return fs::path(rc.output_dir);
}

BarrierConstants derive_constants(const RunConfig& rc) {
  const auto reg = rc.geom.regularity_constants(std::min(rc.barrier_eps, 0.99 * rc.geom.eps0()));
  const auto env = rc.coefficient.envelope();
  return {env.c_tilde0, env.c0, env.c1, reg.k0, reg.nu0};
}

int cmd_verify_barrier(const RunConfig& rc) {
  const WorkerPool pool(rc.jobs);
  const double gamma = rc.coefficient.gamma;
  const BarrierConstants k = derive_constants(rc);
  const CertGrid grid{rc.cert_space, rc.cert_time};

  Json report;
  report["gamma"] = gamma;
  std::vector<ClassCertificate> certs;

  // negative-control knobs: replace the selector's alpha1 or scale delta
  auto apply_overrides = [&](auto& b) {
    if (rc.barrier_alpha1_override > 0.0) b.alpha1 = rc.barrier_alpha1_override;
    b.delta *= rc.barrier_delta_scale;
    b.s = b.alpha1 * (b.tau + b.delta);
  };

  std::vector<double> t_samples;
  if (gamma > 2.0) {
    auto b = select_supercritical_params(gamma, k, rc.barrier_tau, rc.barrier_theta,
                                         rc.barrier_eps);
    apply_overrides(b);
    report["params"] = Json{{"c", b.c},       {"sigma", b.sigma}, {"alpha1", b.alpha1},
                            {"delta", b.delta}, {"beta", b.beta},   {"s", b.s}};
    certs.push_back(verify_E1(b, rc.coefficient, rc.geom, grid, pool));
    certs.push_back(verify_E2(rc.coefficient, rc.geom, rc.eps_sweep, grid, rc.barrier_tau, pool));
    for (int j = 0; j < 10; ++j)
      t_samples.push_back(b.tau - b.delta + b.delta * (j + 0.5) / 10.0);
    certs.push_back(normal_derivative_check(b, rc.geom, t_samples));
  } else if (gamma >= 1.0) {
    auto b = select_subcritical_params(gamma, k, rc.barrier_tau, rc.barrier_eps, rc.barrier_b);
    apply_overrides(b);
    report["params"] = Json{{"ell", b.ell},     {"sigma_bar", b.sigma_bar},
                            {"alpha1", b.alpha1}, {"delta", b.delta},
                            {"beta", b.beta},     {"s", b.s}};
    certs.push_back(verify_D1(b, rc.coefficient, rc.geom, grid, pool));
    certs.push_back(verify_D2(rc.coefficient, rc.geom, rc.eps_sweep, grid, rc.barrier_tau, pool));
    for (int j = 0; j < 10; ++j)
      t_samples.push_back(b.tau - b.delta + b.delta * (j + 0.5) / 10.0);
    certs.push_back(normal_derivative_check(b, rc.geom, t_samples));
  } else {
    throw ConfigError("config key coefficient.gamma: barrier certification needs gamma >= 1");
  }

  bool all_pass = true;
  Json jcerts = Json::array();
  for (const auto& c : certs) {
    all_pass = all_pass && c.pass;
    jcerts.push_back(to_json(c));
    std::cout << c.claim << ": " << (c.pass ? "pass" : "FAIL")
              << " (worst " << c.worst_value << ")\n";
  }
  report["certificates"] = jcerts;
  report["pass"] = all_pass;

  const fs::path dir = make_run_directory(output_root(rc), "verify-barrier",
                                          config_hash(rc.canonical_text));
  write_json_report(dir / "report.json", report);
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  return all_pass ? 0 : 1;
}

int cmd_solve(const RunConfig& rc) {
  ProblemSpec spec;
  spec.geom = rc.geom;
  spec.coefficient = rc.coefficient;
  spec.initial = rc.initial_field();
  spec.horizon = rc.horizon;
  spec.treatment = rc.boundary_treatment();

  const Mesh1D mesh =
      spec.treatment.kind == BoundaryTreatment::Kind::clamp_at_eps
          ? build_clamped_mesh(rc.geom, spec.treatment.clamp_eps, rc.solve_opts.n_nodes,
                               rc.solve_opts.grading)
          : build_mesh(rc.geom, rc.solve_opts.n_nodes, rc.solve_opts.grading);
  const Trajectory traj =
      solve(spec, mesh, rc.solve_opts.effective_dt(rc.horizon), rc.solve_opts.theta_scheme);

  const fs::path dir =
      make_run_directory(output_root(rc), "solve", config_hash(rc.canonical_text));
  write_trajectory_csv(traj, (dir / "trajectory.csv").string());
  write_trajectory_binary(traj, (dir / "trajectory.bin").string());

  Json report;
  report["levels"] = traj.level_count();
  report["nodes"] = mesh.size();
  report["residual"] = json_safe(residual(spec, mesh, traj));
  write_json_report(dir / "report.json", report);
  std::cout << "solved " << traj.level_count() << " levels on " << mesh.size()
            << " nodes; report: " << (dir / "report.json").string() << "\n";
  return 0;
}

int cmd_experiment(const RunConfig& rc) {
  const WorkerPool pool(rc.jobs);
  const fs::path dir =
      make_run_directory(output_root(rc), "experiment", config_hash(rc.canonical_text));
  Json report;
  report["experiment"] = rc.experiment;
  int rcode = 0;

  if (rc.experiment == "uniqueness_probe") {
    const auto rep = uniqueness_probe(rc.coefficient.gamma, rc.geom, {rc.g_lo, rc.g_hi},
                                      rc.eps_sweep, rc.horizon, rc.coefficient.form,
                                      rc.solve_opts, pool);
    report["result"] = to_json(rep);
    write_gaps_csv(dir / "gaps.csv", rep);
    std::cout << "verdict: " << to_string(rep.verdict) << "\n";
  } else if (rc.experiment == "nonuniqueness_demo") {
    const auto rep = nonuniqueness_demo(rc.coefficient.gamma, rc.geom, rc.horizon, rc.solve_opts);
    report["result"] = Json{{"gamma", rep.gamma},
                            {"separation", json_safe(rep.separation)},
                            {"residual_a", json_safe(rep.residual_a)},
                            {"residual_b", json_safe(rep.residual_b)},
                            {"bounded", rep.bounded}};
    std::cout << "separation: " << rep.separation << "\n";
  } else if (rc.experiment == "form_threshold_contrast") {
    ContrastDefaults defaults;
    defaults.horizon = rc.contrast_horizon;
    defaults.eps_sweep = rc.contrast_sweep;
    const auto table = form_threshold_contrast(rc.geom, rc.contrast_gammas, defaults,
                                               rc.solve_opts, pool);
    Json jt = Json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "gamma,form,verdict\n";
    for (const auto& row : table) {
      const char* f = row.form == OperatorForm::divergence ? "divergence" : "nondivergence";
      jt.push_back(Json{{"gamma", row.gamma}, {"form", f}, {"verdict", to_string(row.verdict)},
                        {"gaps", row.gaps}});
      csv << row.gamma << ',' << f << ',' << to_string(row.verdict) << '\n';
      std::cout << f << " gamma=" << row.gamma << " -> " << to_string(row.verdict) << "\n";
    }
    report["result"] = jt;
    write_text_file(dir / "contrast.csv", csv.str());
  } else if (rc.experiment == "iteration_replay") {
    const double par = rc.coefficient.gamma > 2.0 ? rc.barrier_theta : rc.barrier_mu;
    const auto rep = iteration_replay(rc.coefficient.gamma, rc.geom, rc.horizon, par,
                                      rc.solve_opts, rc.eps_sweep.back(), pool);
    report["result"] = to_json(rep);
    write_replay_csv(dir / "rungs.csv", rep);
    std::cout << "rungs " << rep.rungs_satisfied << "/" << rep.rung_count
              << " telescoped bound " << rep.telescoped_bound << "\n";
    rcode = rep.fraction_satisfied == 1.0 ? 0 : 1;
  } else if (rc.experiment == "existence_bound_check") {
    const double beta = std::min(rc.coefficient.gamma - 2.0, 2.0);
    const auto rep = existence_bound_check(rc.coefficient.gamma, beta, rc.barrier_tau,
                                           rc.horizon, rc.geom, rc.solve_opts);
    report["result"] = Json{{"beta", rep.beta},
                            {"tau", rep.tau_weight},
                            {"C_hat", json_safe(rep.C_hat)},
                            {"lambda", rep.lambda},
                            {"C_hat_refined", json_safe(rep.C_hat_refined)},
                            {"stable", rep.stable}};
    std::cout << "envelope fit C=" << rep.C_hat << " lambda=" << rep.lambda << "\n";
    rcode = rep.stable ? 0 : 1;
  } else {
    throw ConfigError("config key experiment.name: unknown experiment: " + rc.experiment);
  }

  write_json_report(dir / "report.json", report);
  std::cout << "report: " << (dir / "report.json").string() << "\n";
  return rcode;
}

int cmd_norm_check(const RunConfig& rc) {
  if (rc.snapshot_path.empty())
    throw ConfigError("missing config key: norm_check.snapshot");
  Trajectory traj;
  try {
    traj = read_trajectory_binary(rc.snapshot_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  const SpaceTimeField u = traj.field();

  Json report;
  report["kind"] = rc.norm_kind;
  bool pass = false;
  const fs::path dir =
      make_run_directory(output_root(rc), "norm-check", config_hash(rc.canonical_text));
  if (rc.norm_kind == "supercritical") {
    const auto rep = check_supercritical_class(u, rc.norm_theta, rc.eps_sweep, rc.geom,
                                               rc.horizon, rc.coefficient.gamma);
    report["result"] = to_json(rep);
    write_growth_csv(dir / "growth.csv", rep);
    pass = rep.pass;
  } else if (rc.norm_kind == "shell") {
    const auto rep = check_shell_class(u, rc.norm_mu, rc.eps_sweep, rc.geom, rc.horizon,
                                       rc.coefficient.gamma);
    report["result"] = to_json(rep);
    write_growth_csv(dir / "growth.csv", rep);
    pass = rep.pass;
  } else if (rc.norm_kind == "pointwise") {
    const auto rep = check_pointwise_growth(u, rc.norm_l, rc.geom, rc.horizon);
    report["result"] = Json{{"holds", rep.holds},
                            {"C_bar", json_safe(rep.C_bar)},
                            {"level_sups", rep.level_sups}};
    pass = rep.holds;
  } else {
    throw ConfigError("config key norm_check.kind: must be supercritical, shell or pointwise");
  }
  report["pass"] = pass;
  write_json_report(dir / "report.json", report);
  std::cout << (pass ? "pass" : "FAIL") << "; report: " << (dir / "report.json").string() << "\n";
  return pass ? 0 : 1;
}

int cmd_schedule(const RunConfig& rc) {
  const double mu1 = -2.0 * rc.coefficient.gamma + 4.0;
  TelescopingSchedule sched;
  if (rc.coefficient.gamma > 2.0) {
    sched = supercritical_schedule(rc.barrier_eps, rc.coefficient.gamma - 2.0, rc.barrier_tau,
                                   rc.barrier_mu);
  } else {
    sched = telescoping_schedule(rc.barrier_eps, mu1 > 0 ? mu1 : 1.0, rc.barrier_mu,
                                 rc.barrier_tau, 1.0);
  }
  std::cout << to_json(sched).dump(2) << "\n";
  if (sched.materialized) {
    std::cout << "k,eps,delta,tau\n";
    const std::size_t show = std::min<std::size_t>(sched.rungs.size(), 32);
    for (std::size_t i = 0; i < show; ++i)
      std::cout << (i + 1) << "," << sched.rungs[i].eps << "," << sched.rungs[i].delta << ","
                << sched.rungs[i].tau << "\n";
    if (show < sched.rungs.size())
      std::cout << "... (" << sched.rungs.size() - show << " more rungs)\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degenerate-diffusion uniqueness laboratory"};
  app.require_subcommand(1);

  CliState cli;
  app.add_option("-c,--config", cli.config_path, "run configuration file");
  app.add_option("--set", cli.overrides, "override a config key: section.key=value");
  app.add_option("-j,--jobs", cli.jobs, "worker count for sweeps");

  auto* sub_verify = app.add_subcommand("verify-barrier", "certify barrier claims");
  auto* sub_solve = app.add_subcommand("solve", "run the PDE solver");
  auto* sub_exp = app.add_subcommand("experiment", "run an experiment");
  auto* sub_norm = app.add_subcommand("norm-check", "check class conditions on a snapshot");
  auto* sub_sched = app.add_subcommand("schedule", "print a telescoping schedule");

  CLI11_PARSE(app, argc, argv);

  RunConfig rc;
  try {
    KeyValueConfig kv = load_config(cli);
    rc = build_run_config(kv);
    if (cli.jobs > 0) rc.jobs = cli.jobs;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sub_verify->parsed()) return cmd_verify_barrier(rc);
    if (sub_solve->parsed()) return cmd_solve(rc);
    if (sub_exp->parsed()) return cmd_experiment(rc);
    if (sub_norm->parsed()) return cmd_norm_check(rc);
    if (sub_sched->parsed()) return cmd_schedule(rc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    // precondition violations surface as config errors
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
