#pragma once

// Run configuration: flat "key = value" text grouped into [sections],
// sharing one schema across all subcommands.  Every block is validated
// against the module preconditions before any compute starts; validation
// failures carry the offending key.

#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dul/coefficients.hpp"
#include "dul/experiments.hpp"
#include "dul/geometry.hpp"
#include "dul/solver.hpp"

namespace dul {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = section + "." + trim(line.substr(0, eq));
      cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
  }

  void set(const std::string& dotted_key, const std::string& value) {
    values_[dotted_key] = value;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, std::optional<std::string> fallback = {}) const {
    const auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    if (fallback) return *fallback;
    throw ConfigError("missing config key: " + key);
  }

  double get_number(const std::string& key, std::optional<double> fallback = {}) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
      if (fallback) return *fallback;
      throw ConfigError("missing config key: " + key);
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing junk");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": not a number: " + it->second);
    }
  }

  std::vector<double> get_numbers(const std::string& key,
                                  std::optional<std::vector<double>> fallback = {}) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
      if (fallback) return *fallback;
      throw ConfigError("missing config key: " + key);
    }
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string tok;
    while (in >> tok) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ConfigError("config key " + key + ": not a number: " + tok);
      }
    }
    if (out.empty()) throw ConfigError("config key " + key + ": empty list");
    return out;
  }

  // Canonical text (sorted keys) for hashing.
  std::string canonical() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << "=" << v << "\n";
    return os.str();
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }
  std::map<std::string, std::string> values_;
};

struct RunConfig {
  DomainGeometry geom = DomainGeometry::interval(0.0, 1.0);
  DegenerateCoefficient coefficient;

  // barrier block
  double barrier_tau = 1.0;
  double barrier_theta = 1.0;
  double barrier_mu = 1.2;
  double barrier_eps = 0.1;
  double barrier_b = 1.0;
  double barrier_alpha1_override = 0.0;  // 0: keep the selector's value
  double barrier_delta_scale = 1.0;      // negative-control knob
  std::vector<double> eps_sweep{0.2, 0.1, 0.05, 0.025};

  // certification grid
  std::size_t cert_space = 10000;
  std::size_t cert_time = 100;

  // solver block
  SolveOptions solve_opts;
  double horizon = 0.5;
  std::string treatment = "flux_none";
  double g_lo = 0.0, g_hi = 1.0;
  double clamp_eps = 0.1;
  std::string initial = "zero";  // zero | one | cosine_bump

  // experiment block
  std::string experiment = "uniqueness_probe";
  double contrast_horizon = 8.0;
  std::vector<double> contrast_sweep{0.2, 0.02, 0.002, 5e-4};
  std::vector<double> contrast_gammas{0.5, 1.5, 2.5};

  // norm-check block
  std::string norm_kind = "supercritical";
  double norm_theta = 1.0;
  double norm_mu = 0.5;
  double norm_l = 0.3;
  std::string snapshot_path;

  std::string output_dir = "out";
  unsigned seed = 0;
  unsigned jobs = 1;

  std::string canonical_text;

  std::function<double(double)> initial_field() const {
    if (initial == "zero") return [](double) { return 0.0; };
    if (initial == "one") return [](double) { return 1.0; };
    if (initial == "cosine_bump") {
      const double lo = geom.coord_lo(), hi = geom.coord_hi();
      return [lo, hi](double x) {
        const double s = (x - lo) / (hi - lo);
        return 0.5 - 0.5 * std::cos(2.0 * M_PI * s);
      };
    }
    throw ConfigError("config key solver.u0: unknown initial datum: " + initial);
  }

  BoundaryTreatment boundary_treatment() const {
    if (treatment == "flux_none") return BoundaryTreatment::flux_none();
    if (treatment == "dirichlet") return BoundaryTreatment::dirichlet(g_lo, g_hi);
    if (treatment == "clamp") return BoundaryTreatment::clamp_at_eps(clamp_eps, g_lo, g_hi);
    throw ConfigError("config key solver.treatment: unknown treatment: " + treatment);
  }
};

inline RunConfig build_run_config(const KeyValueConfig& kv) {
  RunConfig rc;

  const std::string kind = kv.get_string("geometry.kind", std::string("interval"));
  if (kind == "interval") {
    rc.geom = DomainGeometry::interval(kv.get_number("geometry.x_lo", 0.0),
                                       kv.get_number("geometry.x_hi", 1.0));
  } else if (kind == "disk_radial") {
    rc.geom = DomainGeometry::disk_radial(kv.get_number("geometry.R", 1.0),
                                          static_cast<int>(kv.get_number("geometry.n", 2.0)));
  } else {
    throw ConfigError("config key geometry.kind: must be interval or disk_radial");
  }

  rc.coefficient.gamma = kv.get_number("coefficient.gamma", 2.0);
  rc.coefficient.C0 = kv.get_number("coefficient.C0", 1.0);
  const std::string mod = kv.get_string("coefficient.modulation", std::string("constant"));
  if (mod == "constant") {
    rc.coefficient.modulation = Modulation::constant(kv.get_number("coefficient.level", 1.0));
  } else if (mod == "cosine") {
    rc.coefficient.modulation = Modulation::cosine(kv.get_number("coefficient.m_lo", 0.5),
                                                   kv.get_number("coefficient.m_hi", 1.0),
                                                   kv.get_number("coefficient.period", 1.0));
  } else {
    throw ConfigError("config key coefficient.modulation: must be constant or cosine");
  }
  const std::string form = kv.get_string("coefficient.form", std::string("divergence"));
  if (form == "divergence") rc.coefficient.form = OperatorForm::divergence;
  else if (form == "nondivergence") rc.coefficient.form = OperatorForm::nondivergence;
  else throw ConfigError("config key coefficient.form: must be divergence or nondivergence");
  rc.coefficient.upper_exponent_s = kv.get_number("coefficient.upper_exponent_s", 0.0);
  try {
    rc.coefficient.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config section [coefficient]: ") + e.what());
  }

  rc.barrier_tau = kv.get_number("barrier.tau", 1.0);
  rc.barrier_theta = kv.get_number("barrier.theta", 1.0);
  rc.barrier_mu = kv.get_number("barrier.mu", 1.2);
  rc.barrier_eps = kv.get_number("barrier.eps", 0.1);
  rc.barrier_b = kv.get_number("barrier.b", 1.0);
  rc.barrier_alpha1_override = kv.get_number("barrier.alpha1", 0.0);
  rc.barrier_delta_scale = kv.get_number("barrier.delta_scale", 1.0);
  if (!(rc.barrier_delta_scale > 0.0))
    throw ConfigError("config key barrier.delta_scale: must be positive");
  rc.eps_sweep = kv.get_numbers("barrier.eps_sweep",
                                std::vector<double>{0.2, 0.1, 0.05, 0.025});
  if (!(rc.barrier_eps > 0.0) || rc.barrier_eps >= rc.geom.eps0())
    throw ConfigError("config key barrier.eps: must lie in (0, eps0)");
  for (double e : rc.eps_sweep)
    if (!(e > 0.0) || e >= rc.geom.half_width())
      throw ConfigError("config key barrier.eps_sweep: radii must lie in (0, half-width)");

  rc.cert_space = static_cast<std::size_t>(kv.get_number("certification.space_samples", 10000.0));
  rc.cert_time = static_cast<std::size_t>(kv.get_number("certification.time_samples", 100.0));
  if (rc.cert_space < 8 || rc.cert_time < 2)
    throw ConfigError("config section [certification]: grid too small");

  rc.solve_opts.n_nodes = static_cast<std::size_t>(kv.get_number("solver.n_nodes", 512.0));
  rc.solve_opts.dt = kv.get_number("solver.dt", 0.0);
  rc.solve_opts.theta_scheme = kv.get_number("solver.theta_scheme", 1.0);
  rc.solve_opts.grading = kv.get_number("solver.grading", 2.0);
  rc.horizon = kv.get_number("solver.T", 0.5);
  rc.treatment = kv.get_string("solver.treatment", std::string("flux_none"));
  rc.g_lo = kv.get_number("solver.g_lo", 0.0);
  rc.g_hi = kv.get_number("solver.g_hi", 1.0);
  rc.clamp_eps = kv.get_number("solver.clamp_eps", 0.1);
  rc.initial = kv.get_string("solver.u0", std::string("zero"));
  if (rc.solve_opts.n_nodes < 16) throw ConfigError("config key solver.n_nodes: need >= 16");
  if (!(rc.horizon > 0.0)) throw ConfigError("config key solver.T: must be positive");
  if (!(rc.solve_opts.theta_scheme >= 0.0 && rc.solve_opts.theta_scheme <= 1.0))
    throw ConfigError("config key solver.theta_scheme: must lie in [0, 1]");
  rc.initial_field();       // validates solver.u0
  rc.boundary_treatment();  // validates solver.treatment

  rc.experiment = kv.get_string("experiment.name", std::string("uniqueness_probe"));
  rc.contrast_horizon = kv.get_number("experiment.contrast_T", 8.0);
  rc.contrast_sweep = kv.get_numbers("experiment.contrast_sweep",
                                     std::vector<double>{0.2, 0.02, 0.002, 5e-4});
  rc.contrast_gammas =
      kv.get_numbers("experiment.gammas", std::vector<double>{0.5, 1.5, 2.5});

  rc.norm_kind = kv.get_string("norm_check.kind", std::string("supercritical"));
  rc.norm_theta = kv.get_number("norm_check.theta", 1.0);
  rc.norm_mu = kv.get_number("norm_check.mu", 0.5);
  rc.norm_l = kv.get_number("norm_check.l", 0.3);
  rc.snapshot_path = kv.get_string("norm_check.snapshot", std::string(""));

  rc.output_dir = kv.get_string("output.dir", std::string("out"));
  rc.seed = static_cast<unsigned>(kv.get_number("output.seed", 0.0));
  rc.jobs = static_cast<unsigned>(kv.get_number("output.jobs", 1.0));

  rc.canonical_text = kv.canonical();
  return rc;
}

}  // namespace dul
