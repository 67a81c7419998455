#pragma once

// Finite-volume evolution of  dt u = div(a grad u) + f  (or a laplacian u + f)
// on boundary-graded meshes.
//
// The mesh is cell-centered: faces come from the grading map, unknowns sit
// at face midpoints, so no node ever touches the boundary or the ridge.
// Interior face conductances use the geometric mean of the two node values
// of a, which preserves the d^gamma decay rate at the boundary; the
// degenerate_flux_none treatment closes the boundary faces with zero flux
// (the discrete reading of posing no boundary condition), while dirichlet
// attaches the data through the resistance integral of 1/a across the
// boundary gap -- for gamma >= 1 that integral diverges and the data
// decouples, which is exactly the regime where the continuum problem stops
// accepting boundary conditions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dul/barriers.hpp"
#include "dul/coefficients.hpp"
#include "dul/geometry.hpp"
#include "dul/quadrature.hpp"

namespace dul {

struct Mesh1D {
  std::vector<double> faces;    // strictly increasing, size n+1; ends = solved segment ends
  std::vector<double> nodes;    // face midpoints, size n
  std::vector<double> volumes;  // cell measures (metric-weighted for the disk)
  std::vector<double> areas;    // face areas (metric-weighted), size n+1
  double grading = 1.0;
  double seg_lo = 0.0, seg_hi = 0.0;  // solved coordinate segment

  std::size_t size() const { return nodes.size(); }

  double min_spacing() const {
    double m = faces[1] - faces[0];
    for (std::size_t i = 1; i + 1 < faces.size(); ++i) m = std::min(m, faces[i + 1] - faces[i]);
    return m;
  }
  double max_spacing() const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < faces.size(); ++i) m = std::max(m, faces[i + 1] - faces[i]);
    return m;
  }
};

namespace detail {

inline void fill_cell_data(Mesh1D& mesh, const DomainGeometry& geom) {
  const std::size_t n = mesh.faces.size() - 1;
  mesh.nodes.resize(n);
  mesh.volumes.resize(n);
  mesh.areas.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) mesh.nodes[i] = 0.5 * (mesh.faces[i] + mesh.faces[i + 1]);
  if (geom.kind() == DomainKind::interval) {
    for (std::size_t i = 0; i < n; ++i) mesh.volumes[i] = mesh.faces[i + 1] - mesh.faces[i];
    for (std::size_t j = 0; j <= n; ++j) mesh.areas[j] = 1.0;
  } else {
    const double ang = geom.sphere_area_constant();
    const double nd = static_cast<double>(geom.dim());
    for (std::size_t i = 0; i < n; ++i)
      mesh.volumes[i] =
          ang * (std::pow(mesh.faces[i + 1], nd) - std::pow(mesh.faces[i], nd)) / nd;
    for (std::size_t j = 0; j <= n; ++j)
      mesh.areas[j] = ang * std::pow(mesh.faces[j], nd - 1.0);
  }
}

}  // namespace detail

// Full-domain mesh with cells clustering at the boundary (both interval ends,
// or the outer disk radius) per the grading law s -> s^grading.
inline Mesh1D build_mesh(const DomainGeometry& geom, std::size_t n_nodes, double grading = 2.0) {
  if (n_nodes < 16) throw std::invalid_argument("build_mesh: need at least 16 nodes");
  if (!(grading >= 1.0) || !(grading <= 8.0))
    throw std::invalid_argument("build_mesh: grading must lie in [1, 8]");
  Mesh1D mesh;
  mesh.grading = grading;
  mesh.seg_lo = geom.coord_lo();
  mesh.seg_hi = geom.coord_hi();
  if (geom.kind() == DomainKind::interval) {
    std::size_t half = (n_nodes + 1) / 2;
    const double mid = geom.ridge_coordinate();
    const double w = geom.half_width();
    mesh.faces.reserve(2 * half + 1);
    for (std::size_t j = 0; j <= half; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(half);
      mesh.faces.push_back(geom.coord_lo() + w * std::pow(s, grading));
    }
    mesh.faces.back() = mid;  // exact ridge face
    for (std::size_t j = 1; j <= half; ++j) {
      const double s = 1.0 - static_cast<double>(j) / static_cast<double>(half);
      mesh.faces.push_back(geom.coord_hi() - w * std::pow(s, grading));
    }
    mesh.faces.back() = geom.coord_hi();
  } else {
    mesh.faces.reserve(n_nodes + 1);
    for (std::size_t j = 0; j <= n_nodes; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(n_nodes);
      mesh.faces.push_back(geom.coord_hi() * (1.0 - std::pow(1.0 - s, grading)));
    }
    mesh.faces.back() = geom.coord_hi();
  }
  detail::fill_cell_data(mesh, geom);
  return mesh;
}

// Mesh over the clamped segment {d >= eps}, graded toward the clamp faces.
inline Mesh1D build_clamped_mesh(const DomainGeometry& geom, double eps, std::size_t n_nodes,
                                 double grading = 2.0) {
  if (!(eps > 0.0) || eps >= geom.half_width())
    throw std::invalid_argument("build_clamped_mesh: eps out of range");
  if (n_nodes < 16) throw std::invalid_argument("build_clamped_mesh: need at least 16 nodes");
  Mesh1D mesh;
  mesh.grading = grading;
  if (geom.kind() == DomainKind::interval) {
    mesh.seg_lo = geom.coord_lo() + eps;
    mesh.seg_hi = geom.coord_hi() - eps;
    const double mid = geom.ridge_coordinate();
    const double w = mid - mesh.seg_lo;
    std::size_t half = (n_nodes + 1) / 2;
    for (std::size_t j = 0; j <= half; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(half);
      mesh.faces.push_back(mesh.seg_lo + w * std::pow(s, grading));
    }
    mesh.faces.back() = mid;
    for (std::size_t j = 1; j <= half; ++j) {
      const double s = 1.0 - static_cast<double>(j) / static_cast<double>(half);
      mesh.faces.push_back(mesh.seg_hi - w * std::pow(s, grading));
    }
    mesh.faces.back() = mesh.seg_hi;
  } else {
    mesh.seg_lo = 0.0;
    mesh.seg_hi = geom.coord_hi() - eps;
    for (std::size_t j = 0; j <= n_nodes; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(n_nodes);
      mesh.faces.push_back(mesh.seg_hi * (1.0 - std::pow(1.0 - s, grading)));
    }
    mesh.faces.back() = mesh.seg_hi;
  }
  detail::fill_cell_data(mesh, geom);
  return mesh;
}

struct BoundaryTreatment {
  enum class Kind { degenerate_flux_none, dirichlet, clamp_at_eps };
  Kind kind = Kind::degenerate_flux_none;
  double g_lo = 0.0, g_hi = 0.0;
  double clamp_eps = 0.0;

  static BoundaryTreatment flux_none() { return {}; }
  static BoundaryTreatment dirichlet(double lo, double hi) {
    return {Kind::dirichlet, lo, hi, 0.0};
  }
  static BoundaryTreatment clamp_at_eps(double eps, double lo, double hi) {
    if (!(eps > 0.0)) throw std::invalid_argument("clamp_at_eps: eps must be positive");
    return {Kind::clamp_at_eps, lo, hi, eps};
  }
};

struct ProblemSpec {
  DomainGeometry geom = DomainGeometry::interval(0.0, 1.0);
  DegenerateCoefficient coefficient;
  std::function<double(double, double)> source;  // f(x,t); empty means 0
  std::function<double(double)> initial;         // u0(x)
  double horizon = 1.0;
  BoundaryTreatment treatment;

  void validate() const {
    coefficient.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("problem horizon must be positive");
    if (!initial) throw std::invalid_argument("problem initial data missing");
  }
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> levels;  // one grid function per time level
  Mesh1D mesh;

  std::size_t level_count() const { return levels.size(); }

  // Piecewise-linear space-time interpolant; outside the solved segment the
  // given extension value is used (difference fields extend by zero).
  double value(double x, double t, double extension = 0.0) const {
    if (x < mesh.seg_lo || x > mesh.seg_hi) return extension;
    if (times.empty()) throw std::runtime_error("empty trajectory");
    double tc = std::clamp(t, times.front(), times.back());
    const auto it = std::upper_bound(times.begin(), times.end(), tc);
    std::size_t k1 = std::min<std::size_t>(times.size() - 1,
                                           static_cast<std::size_t>(it - times.begin()));
    std::size_t k0 = k1 == 0 ? 0 : k1 - 1;
    const double dt = times[k1] - times[k0];
    const double wt = dt > 0.0 ? (tc - times[k0]) / dt : 0.0;
    auto space = [&](const std::vector<double>& u) {
      const auto& xs = mesh.nodes;
      if (x <= xs.front()) return u.front();
      if (x >= xs.back()) return u.back();
      const auto jt = std::upper_bound(xs.begin(), xs.end(), x);
      const std::size_t j1 = static_cast<std::size_t>(jt - xs.begin());
      const std::size_t j0 = j1 - 1;
      const double w = (x - xs[j0]) / (xs[j1] - xs[j0]);
      return (1.0 - w) * u[j0] + w * u[j1];
    };
    return (1.0 - wt) * space(levels[k0]) + wt * space(levels[k1]);
  }

  SpaceTimeField field(double extension = 0.0) const {
    return [this, extension](double x, double t) { return value(x, t, extension); };
  }
};

namespace detail {

// Per-face conductances and boundary data coupling at a fixed time.
struct OperatorStencil {
  std::vector<double> lower, diag, upper;  // tridiagonal of the spatial operator
  std::vector<double> affine;              // boundary-data contribution
};

// Resistance of the gap between the boundary face and the first node:
// integral of 1/a along the gap (power-law closed form for the coefficient
// family).  Infinite resistance decouples the data.
inline double boundary_gap_conductance(const ProblemSpec& spec, const Mesh1D& mesh, bool low_side,
                                       double t) {
  const DomainGeometry& geom = spec.geom;
  const double face = low_side ? mesh.faces.front() : mesh.faces.back();
  const double node = low_side ? mesh.nodes.front() : mesh.nodes.back();
  const double gap = std::abs(node - face);
  const double m = spec.coefficient.modulation.value(t) * spec.coefficient.C0;
  const double gamma = spec.coefficient.gamma;
  const double d_face = geom.distance(face);
  const double d_node = geom.distance(node);
  double resistance;
  if (d_face > 0.0 || gamma == 0.0) {
    // regular gap: 1/a integrates in closed form through the distance variable
    const double d0 = std::min(d_face, d_node), d1 = std::max(d_face, d_node);
    if (gamma == 1.0)
      resistance = std::log(d1 / std::max(d0, 1e-300)) / m;
    else
      resistance = (std::pow(d1, 1.0 - gamma) - std::pow(d0, 1.0 - gamma)) / ((1.0 - gamma) * m);
  } else {
    // face on the true boundary: integrable only below the critical exponent
    if (gamma >= 1.0) return 0.0;  // infinite resistance, data decouples
    resistance = std::pow(d_node, 1.0 - gamma) / ((1.0 - gamma) * m);
  }
  if (!(resistance > 0.0)) resistance = gap / std::max(m * std::pow(d_node, gamma), 1e-300);
  return 1.0 / resistance;
}

inline OperatorStencil assemble_operator(const ProblemSpec& spec, const Mesh1D& mesh, double t) {
  const std::size_t n = mesh.size();
  OperatorStencil st;
  st.lower.assign(n, 0.0);
  st.diag.assign(n, 0.0);
  st.upper.assign(n, 0.0);
  st.affine.assign(n, 0.0);
  const auto& coef = spec.coefficient;
  const DomainGeometry& geom = spec.geom;

  if (coef.form == OperatorForm::divergence) {
    // interior faces: geometric-mean conductance
    std::vector<double> cond(n + 1, 0.0);
    for (std::size_t j = 1; j < n; ++j) {
      const double a_half =
          std::sqrt(coef.value(geom, mesh.nodes[j - 1], t) * coef.value(geom, mesh.nodes[j], t));
      cond[j] = mesh.areas[j] * a_half / (mesh.nodes[j] - mesh.nodes[j - 1]);
    }
    // boundary faces
    const bool dirichlet = spec.treatment.kind != BoundaryTreatment::Kind::degenerate_flux_none;
    double c_lo = 0.0, c_hi = 0.0;
    if (dirichlet) {
      if (geom.kind() == DomainKind::interval)
        c_lo = mesh.areas.front() * boundary_gap_conductance(spec, mesh, true, t);
      c_hi = mesh.areas.back() * boundary_gap_conductance(spec, mesh, false, t);
    }
    // disk: the r = 0 face has zero area, so the center closes itself
    if (geom.kind() == DomainKind::disk_radial) c_lo = 0.0;

    for (std::size_t i = 0; i < n; ++i) {
      const double w = mesh.volumes[i];
      if (i > 0) {
        st.lower[i] = cond[i] / w;
        st.diag[i] -= cond[i] / w;
      }
      if (i + 1 < n) {
        st.upper[i] = cond[i + 1] / w;
        st.diag[i] -= cond[i + 1] / w;
      }
      if (i == 0 && c_lo > 0.0) {
        st.diag[i] -= c_lo / w;
        st.affine[i] += c_lo * spec.treatment.g_lo / w;
      }
      if (i + 1 == n && c_hi > 0.0) {
        st.diag[i] -= c_hi / w;
        st.affine[i] += c_hi * spec.treatment.g_hi / w;
      }
    }
  } else {
    // non-divergence: a at the node times the unit-coefficient conservative
    // laplacian (the radial metric in the areas supplies the first-order
    // term for the disk).  Assembled in the same operation order as the
    // divergence branch so constant coefficients give identical rows.
    const bool dirichlet = spec.treatment.kind != BoundaryTreatment::Kind::degenerate_flux_none;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = coef.value(geom, mesh.nodes[i], t);
      const double w = mesh.volumes[i];
      if (i > 0) {
        const double c = mesh.areas[i] * a / (mesh.nodes[i] - mesh.nodes[i - 1]) / w;
        st.lower[i] = c;
        st.diag[i] -= c;
      }
      if (i + 1 < n) {
        const double c = mesh.areas[i + 1] * a / (mesh.nodes[i + 1] - mesh.nodes[i]) / w;
        st.upper[i] = c;
        st.diag[i] -= c;
      }
      if (i == 0 && dirichlet && geom.kind() == DomainKind::interval) {
        const double c = mesh.areas.front() * a / (mesh.nodes.front() - mesh.faces.front()) / w;
        st.diag[i] -= c;
        st.affine[i] += c * spec.treatment.g_lo;
      }
      if (i + 1 == n && dirichlet) {
        const double c = mesh.areas.back() * a / (mesh.faces.back() - mesh.nodes.back()) / w;
        st.diag[i] -= c;
        st.affine[i] += c * spec.treatment.g_hi;
      }
    }
  }
  return st;
}

inline void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                         std::vector<double>& upper, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) throw std::runtime_error("singular tridiagonal system");
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) throw std::runtime_error("singular tridiagonal system");
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace detail

// Spatial operator applied to a grid function: div(a grad u) + boundary data
// coupling (no source term).
inline std::vector<double> apply_operator(const ProblemSpec& spec, const Mesh1D& mesh,
                                          const std::vector<double>& u, double t) {
  if (u.size() != mesh.size()) throw std::invalid_argument("apply_operator: size mismatch");
  const auto st = detail::assemble_operator(spec, mesh, t);
  std::vector<double> out(u.size(), 0.0);
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = st.diag[i] * u[i] + st.affine[i];
    if (i > 0) v += st.lower[i] * u[i - 1];
    if (i + 1 < n) v += st.upper[i] * u[i + 1];
    out[i] = v;
  }
  return out;
}

// One theta-scheme step: u_new solves
//   (I - theta dt A(t+dt)) u_new = (I + (1-theta) dt A(t)) u + dt blended sources.
inline std::vector<double> step_theta(const ProblemSpec& spec, const Mesh1D& mesh,
                                      const std::vector<double>& u, double t, double dt,
                                      double theta_scheme) {
  if (!(theta_scheme >= 0.0 && theta_scheme <= 1.0))
    throw std::invalid_argument("theta_scheme must lie in [0, 1]");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const std::size_t n = mesh.size();
  if (u.size() != n) throw std::invalid_argument("step_theta: size mismatch");

  const auto st_old = detail::assemble_operator(spec, mesh, t);
  const auto st_new = theta_scheme > 0.0 ? detail::assemble_operator(spec, mesh, t + dt) : st_old;

  if (theta_scheme < 0.5) {
    // explicit part must respect the stiffness bound
    double rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) rate = std::max(rate, -st_old.diag[i]);
    const double dt_cap = 1.0 / ((1.0 - 2.0 * theta_scheme) * std::max(rate, 1e-300));
    if (dt > dt_cap)
      throw std::runtime_error("explicit step violates the stability bound dt <= " +
                               std::to_string(dt_cap));
  }

  std::vector<double> rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = u[i] + (1.0 - theta_scheme) * dt *
                          (st_old.diag[i] * u[i] + (i > 0 ? st_old.lower[i] * u[i - 1] : 0.0) +
                           (i + 1 < n ? st_old.upper[i] * u[i + 1] : 0.0) + st_old.affine[i]);
    v += theta_scheme * dt * st_new.affine[i];
    if (spec.source)
      v += dt * ((1.0 - theta_scheme) * spec.source(mesh.nodes[i], t) +
                 theta_scheme * spec.source(mesh.nodes[i], t + dt));
    rhs[i] = v;
  }

  if (theta_scheme == 0.0) return rhs;

  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = 1.0 - theta_scheme * dt * st_new.diag[i];
    if (i > 0) lower[i] = -theta_scheme * dt * st_new.lower[i];
    if (i + 1 < n) upper[i] = -theta_scheme * dt * st_new.upper[i];
  }
  detail::thomas_solve(lower, diag, upper, rhs);
  return rhs;
}

inline Trajectory solve(const ProblemSpec& spec, const Mesh1D& mesh, double dt,
                        double theta_scheme = 1.0) {
  spec.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("solve: dt must be positive");
  const std::size_t steps = static_cast<std::size_t>(std::ceil(spec.horizon / dt - 1e-12));
  const double dt_eff = spec.horizon / static_cast<double>(steps);

  Trajectory traj;
  traj.mesh = mesh;
  traj.times.reserve(steps + 1);
  traj.levels.reserve(steps + 1);
  std::vector<double> u(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) u[i] = spec.initial(mesh.nodes[i]);
  traj.times.push_back(0.0);
  traj.levels.push_back(u);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = dt_eff * static_cast<double>(k);
    u = step_theta(spec, mesh, u, t, dt_eff, theta_scheme);
    for (double v : u)
      if (!std::isfinite(v) || std::abs(v) > 1e12)
        throw std::runtime_error("solution blow-up detected at t = " + std::to_string(t + dt_eff));
    traj.times.push_back(dt_eff * static_cast<double>(k + 1));
    traj.levels.push_back(u);
  }
  return traj;
}

// Max interior defect |dt u - div(a grad u) - f| with centered time
// differences.  Nodes hugging the boundary are excluded: the discrete
// solution need not be smooth there for low exponents, so the measurement
// stays on cells with d at least a few local widths.
inline double residual(const ProblemSpec& spec, const Mesh1D& mesh, const Trajectory& traj,
                        double t_lo = 0.0) {
  if (traj.level_count() < 3) throw std::invalid_argument("residual: need at least 3 levels");
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < traj.level_count(); ++k) {
    const double t = traj.times[k];
    if (t < t_lo) continue;
    const double dt_c = traj.times[k + 1] - traj.times[k - 1];
    const auto op = apply_operator(spec, mesh, traj.levels[k], t);
    for (std::size_t i = 2; i + 2 < mesh.size(); ++i) {
      const double local_w = mesh.faces[i + 1] - mesh.faces[i];
      if (spec.geom.distance(mesh.nodes[i]) < 4.0 * local_w) continue;
      const double du = (traj.levels[k + 1][i] - traj.levels[k - 1][i]) / dt_c;
      const double f = spec.source ? spec.source(mesh.nodes[i], t) : 0.0;
      worst = std::max(worst, std::abs(du - op[i] - f));
    }
  }
  return worst;
}

struct SubsolutionCertificate {
  bool pass = false;
  double worst_value = 0.0;  // largest dt psi(u) - div(a grad psi(u)) - psi'(u) f
  double tolerance = 0.0;
};

// Discrete check that psi_alpha(u) is a subsolution along a computed
// trajectory; the tolerance rides on the trajectory's own PDE residual.
inline SubsolutionCertificate subsolution_check(const Trajectory& traj, double alpha,
                                                const ProblemSpec& spec, const Mesh1D& mesh) {
  if (!(alpha > 0.0))
    throw std::invalid_argument("subsolution_check: regularizer alpha must be positive");
  const Regularizer psi{alpha};
  SubsolutionCertificate cert;
  cert.tolerance = 10.0 * std::max(residual(spec, mesh, traj), 1e-12);

  ProblemSpec plain = spec;  // operator applied to psi(u) without boundary data coupling
  plain.treatment = BoundaryTreatment::flux_none();
  plain.source = nullptr;

  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < traj.level_count(); ++k) {
    const double t = traj.times[k];
    const double dt_c = traj.times[k + 1] - traj.times[k - 1];
    std::vector<double> v(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) v[i] = psi.value(traj.levels[k][i]);
    const auto op = apply_operator(plain, mesh, v, t);
    for (std::size_t i = 2; i + 2 < mesh.size(); ++i) {
      const double local_w = mesh.faces[i + 1] - mesh.faces[i];
      if (spec.geom.distance(mesh.nodes[i]) < 4.0 * local_w) continue;
      const double dpsi =
          (psi.value(traj.levels[k + 1][i]) - psi.value(traj.levels[k - 1][i])) / dt_c;
      const double f = spec.source ? spec.source(mesh.nodes[i], t) : 0.0;
      const double defect = dpsi - op[i] - psi.d1(traj.levels[k][i]) * f;
      worst = std::max(worst, defect);
    }
  }
  cert.worst_value = worst;
  cert.pass = worst <= cert.tolerance;
  return cert;
}

// ---------------------------------------------------------------------------
// Trajectory snapshots: CSV (t,x,u) and the compact binary format.
// ---------------------------------------------------------------------------

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.precision(17);
  out << "t,x,u\n";
  for (std::size_t k = 0; k < traj.level_count(); ++k)
    for (std::size_t i = 0; i < traj.mesh.size(); ++i)
      out << traj.times[k] << ',' << traj.mesh.nodes[i] << ',' << traj.levels[k][i] << '\n';
}

// Binary layout: magic "DUL1", u32 version, u64 node count, u64 level count,
// then little-endian doubles: nodes, times, levels (row-major).
inline void write_trajectory_binary(const Trajectory& traj, const std::string& path) {
  static_assert(sizeof(double) == 8);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const char magic[4] = {'D', 'U', 'L', '1'};
  out.write(magic, 4);
  const std::uint32_t version = 1;
  const std::uint64_t n = traj.mesh.size(), m = traj.level_count();
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  auto put = [&](const double* p, std::size_t count) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(count * 8));
  };
  put(traj.mesh.nodes.data(), n);
  put(traj.times.data(), m);
  for (const auto& level : traj.levels) put(level.data(), n);
  if (!out) throw std::runtime_error("short write to " + path);
}

inline Trajectory read_trajectory_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "DUL1", 4) != 0)
    throw std::runtime_error("not a trajectory snapshot: " + path);
  std::uint32_t version = 0;
  std::uint64_t n = 0, m = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  if (!in || version != 1 || n == 0 || m == 0 || n > (1u << 26) || m > (1u << 26))
    throw std::runtime_error("corrupt trajectory snapshot: " + path);
  Trajectory traj;
  traj.mesh.nodes.resize(n);
  traj.times.resize(m);
  traj.levels.assign(m, std::vector<double>(n));
  auto get = [&](double* p, std::size_t count) {
    in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(count * 8));
  };
  get(traj.mesh.nodes.data(), n);
  get(traj.times.data(), m);
  for (auto& level : traj.levels) get(level.data(), n);
  if (!in) throw std::runtime_error("truncated trajectory snapshot: " + path);
  traj.mesh.seg_lo = traj.mesh.nodes.front();
  traj.mesh.seg_hi = traj.mesh.nodes.back();
  return traj;
}

}  // namespace dul
