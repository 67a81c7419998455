#pragma once

// Report serialization: JSON verdict files, CSV sweep tables, and the
// config hash that names run directories.  Reports are deterministic:
// ordered keys, shortest-roundtrip doubles, no timestamps.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dul/barriers.hpp"
#include "dul/experiments.hpp"
#include "dul/schedule.hpp"
#include "dul/weighted_norms.hpp"

namespace dul {

using Json = nlohmann::ordered_json;

inline double json_safe(double v) {
  if (std::isnan(v)) return 0.0;
  if (std::isinf(v)) return v > 0 ? 1e308 : -1e308;
  return v;
}

inline Json to_json(const ClassCertificate& c) {
  Json j;
  j["claim"] = c.claim;
  j["pass"] = c.pass;
  j["worst_value"] = json_safe(c.worst_value);
  j["worst_point"] = {json_safe(c.worst_point[0]), json_safe(c.worst_point[1])};
  j["grid_size"] = {c.grid_size[0], c.grid_size[1]};
  Json params = Json::object();
  for (const auto& [k, v] : c.params) params[k] = json_safe(v);
  j["params"] = params;
  return j;
}

inline Json to_json(const GrowthReport& r) {
  Json j;
  j["eps"] = r.eps_values;
  j["lhs"] = r.lhs_values;
  j["bound"] = r.bound_values;
  j["fitted_C"] = json_safe(r.fitted_C);
  j["pass"] = r.pass;
  j["exponent_used"] = r.exponent_used;
  return j;
}

inline Json to_json(const DichotomyReport& r) {
  Json j;
  j["gamma"] = r.gamma;
  j["form"] = r.form == OperatorForm::divergence ? "divergence" : "nondivergence";
  j["horizon"] = r.horizon;
  j["eps_ref"] = r.eps_ref;
  j["eps_sweep"] = r.eps_sweep;
  j["gaps"] = r.gaps;
  j["verdict"] = to_string(r.verdict);
  return j;
}

inline Json to_json(const TelescopingSchedule& s) {
  Json j;
  j["law"] = s.law == ScheduleLaw::shrinking_cap ? "shrinking_cap" : "constant_cap";
  j["tau"] = s.tau;
  j["eps"] = s.eps;
  j["mu1"] = s.mu1;
  j["mu2"] = s.mu2;
  j["c_cap"] = s.c_cap;
  j["materialized"] = s.materialized;
  j["rung_count"] = json_safe(s.rung_count);
  j["tail_bound"] = json_safe(s.tail_bound);
  j["tail_majorant"] = json_safe(s.tail_majorant);
  return j;
}

inline Json to_json(const ReplayReport& r) {
  Json j;
  j["gamma"] = r.gamma;
  j["mu1"] = r.mu1;
  j["mu2"] = r.mu2;
  j["tau"] = r.tau;
  j["eps_start"] = r.eps_start;
  j["c_cap"] = r.c_cap;
  j["C_hat"] = json_safe(r.C_hat);
  j["rung_count"] = r.rung_count;
  j["rungs_satisfied"] = r.rungs_satisfied;
  j["fraction_satisfied"] = r.fraction_satisfied;
  j["telescoped_bound"] = json_safe(r.telescoped_bound);
  j["oracle_tail"] = json_safe(r.oracle_tail);
  j["start_mass"] = json_safe(r.start_mass);
  return j;
}

// FNV-1a over the canonical config text; hex tag for run directory names.
inline std::string config_hash(const std::string& canonical_text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  for (int i = 15; i >= 0; --i) os << ((h >> (4 * i)) & 0xful);
  return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
  if (!out) throw std::runtime_error("short write to " + path.string());
}

inline void write_json_report(const std::filesystem::path& path, Json j) {
  j["schema_version"] = "1";
  write_text_file(path, j.dump(2) + "\n");
}

// CSV with one (eps, lhs, bound) row per sweep entry.
inline void write_growth_csv(const std::filesystem::path& path, const GrowthReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "eps,lhs,bound\n";
  for (std::size_t i = 0; i < r.eps_values.size(); ++i)
    os << r.eps_values[i] << ',' << r.lhs_values[i] << ',' << r.bound_values[i] << '\n';
  write_text_file(path, os.str());
}

inline void write_gaps_csv(const std::filesystem::path& path, const DichotomyReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "eps,gap\n";
  for (std::size_t i = 0; i < r.eps_sweep.size(); ++i)
    os << r.eps_sweep[i] << ',' << r.gaps[i] << '\n';
  write_text_file(path, os.str());
}

inline void write_replay_csv(const std::filesystem::path& path, const ReplayReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "k,eps,delta,tau,lhs,rhs,holds\n";
  for (std::size_t k = 0; k < r.rungs.size(); ++k) {
    const auto& g = r.rungs[k];
    os << (k + 1) << ',' << g.eps << ',' << g.delta << ',' << g.tau << ',' << g.lhs << ','
       << g.rhs << ',' << (g.holds ? 1 : 0) << '\n';
  }
  write_text_file(path, os.str());
}

// Fresh run directory <root>/<label>-<hash>; an existing directory is never
// overwritten, reruns get a numeric suffix.
inline std::filesystem::path make_run_directory(const std::filesystem::path& root,
                                                const std::string& label,
                                                const std::string& hash) {
  std::filesystem::create_directories(root);
  const std::filesystem::path base = root / (label + "-" + hash.substr(0, 12));
  std::filesystem::path dir = base;
  for (int k = 2; std::filesystem::exists(dir); ++k) {
    dir = base;
    dir += "-" + std::to_string(k);
  }
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace dul
