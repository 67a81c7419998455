#pragma once

// Quadrature over distance-defined regions (full domain, interior sets,
// shells, boundary layers).
//
// Each region decomposes into coordinate segments that never cross the
// ridge.  A segment touching the domain boundary is integrated through the
// graded map x(s) = boundary + W s^2 (node density ~ d^(-1/2)), everything
// else through an affine map; composite Simpson runs in the mapped
// coordinate.  The square map makes the rule exact for affine integrands
// and turns d^(-1/2)-type weights into smooth integrands.  When the
// integrand is singular at a boundary endpoint, the end cell falls back to
// a local power fit, which integrates d^p weights with p > -1 exactly.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "dul/geometry.hpp"

namespace dul {

using ScalarField = std::function<double(double)>;
using SpaceTimeField = std::function<double(double, double)>;

struct QuadOptions {
  std::size_t space_cells = 2048;  // Simpson cells across a region
  std::size_t time_cells = 64;     // Simpson cells across [0, T]
};

namespace detail {

// One mapped segment: x(s) for s in [0,1], integrand f(x) dx = f(x(s)) x'(s) ds.
struct MappedSegment {
  double x0 = 0.0;       // image of s = 0
  double span = 0.0;     // signed width of the affine part
  bool graded = false;   // x = x0 + span * s^2 (x0 sits on the domain boundary)
  bool singular_end_allowed = false;

  double x(double s) const { return graded ? x0 + span * s * s : x0 + span * s; }
  double dx(double s) const { return graded ? 2.0 * span * s : span; }
};

inline double simpson_segment(const MappedSegment& seg, const ScalarField& f,
                              std::size_t cells) {
  if (cells < 2) cells = 2;
  auto g = [&](double s) { return f(seg.x(s)) * seg.dx(s); };
  const double h = 1.0 / static_cast<double>(cells);
  double total = 0.0;
  std::size_t first_cell = 0;

  if (seg.singular_end_allowed) {
    // probe the s = 0 endpoint; a non-finite value routes the first cell
    // through a power fit in the physical coordinate
    const double g0 = g(0.0);
    if (!std::isfinite(g0)) {
      const double x1 = seg.x(h), xh = seg.x(0.5 * h);
      const double f1 = f(x1), fh = f(xh);
      if (!std::isfinite(f1) || !std::isfinite(fh) || f1 * fh <= 0.0)
        throw std::runtime_error("quadrature: integrand not power-like at the boundary near x = " +
                                 std::to_string(x1));
      const double d1 = std::abs(seg.x(h) - seg.x0);
      const double dh = std::abs(seg.x(0.5 * h) - seg.x0);
      const double p = std::log(f1 / fh) / std::log(d1 / dh);
      if (p <= -1.0)
        throw std::runtime_error("quadrature: non-integrable boundary singularity (exponent " +
                                 std::to_string(p) + ")");
      total += (seg.span < 0.0 ? -1.0 : 1.0) * f1 * d1 / (p + 1.0);
      first_cell = 1;
    }
  }

  for (std::size_t c = first_cell; c < cells; ++c) {
    const double a = static_cast<double>(c) * h;
    const double ga = g(a), gm = g(a + 0.5 * h), gb = g(a + h);
    if (!std::isfinite(ga) || !std::isfinite(gm) || !std::isfinite(gb))
      throw std::runtime_error("quadrature: non-finite integrand sample near x = " +
                               std::to_string(seg.x(a + 0.5 * h)));
    total += h / 6.0 * (ga + 4.0 * gm + gb);
  }
  return total;
}

// Nudge applied to segment ends that would land exactly on the ridge.
inline double ridge_pullback(const DomainGeometry& geom) {
  return 1e-12 * (geom.coord_hi() - geom.coord_lo());
}

}  // namespace detail

// Region of integration described by a distance band (d_lo, d_hi].
// d_lo = 0 touches the boundary; d_hi >= half-width reaches the ridge.
struct DistanceBand {
  double d_lo = 0.0;
  double d_hi = std::numeric_limits<double>::infinity();
};

inline std::vector<detail::MappedSegment> band_segments(const DomainGeometry& geom,
                                                        const DistanceBand& band) {
  const double d_cap = geom.half_width() - detail::ridge_pullback(geom);
  const double lo = std::max(band.d_lo, 0.0);
  const double hi = std::min(band.d_hi, d_cap);
  std::vector<detail::MappedSegment> segs;
  if (!(hi > lo)) return segs;

  auto add_side = [&](double boundary, double inward_sign) {
    detail::MappedSegment seg;
    if (lo == 0.0) {
      // graded from the boundary: x = boundary + sign * hi * s^2
      seg.x0 = boundary;
      seg.span = inward_sign * hi;
      seg.graded = true;
      seg.singular_end_allowed = true;
    } else {
      seg.x0 = boundary + inward_sign * lo;
      seg.span = inward_sign * (hi - lo);
      seg.graded = false;
    }
    segs.push_back(seg);
  };

  if (geom.kind() == DomainKind::interval) {
    add_side(geom.coord_lo(), +1.0);
    add_side(geom.coord_hi(), -1.0);
  } else {
    add_side(geom.coord_hi(), -1.0);
  }
  return segs;
}

// Integral of f over the region {d_lo < d <= d_hi}, with the metric factor.
inline double integrate_band(const DomainGeometry& geom, const DistanceBand& band,
                             const ScalarField& f, const QuadOptions& opts = {}) {
  const auto segs = band_segments(geom, band);
  double total = 0.0;
  for (const auto& seg : segs) {
    auto weighted = [&](double x) { return f(x) * geom.metric_weight(x); };
    const double oriented = detail::simpson_segment(
        seg, weighted, std::max<std::size_t>(opts.space_cells / segs.size(), 32));
    total += seg.span < 0.0 ? -oriented : oriented;  // undo the map orientation
  }
  return total;
}

inline double integrate_domain(const DomainGeometry& geom, const ScalarField& f,
                               const QuadOptions& opts = {}) {
  return integrate_band(geom, DistanceBand{}, f, opts);
}

inline double integrate_interior(const DomainGeometry& geom, double eps, const ScalarField& f,
                                 const QuadOptions& opts = {}) {
  return integrate_band(geom, DistanceBand{eps, std::numeric_limits<double>::infinity()}, f, opts);
}

inline double integrate_shell(const DomainGeometry& geom, double d_lo, double d_hi,
                              const ScalarField& f, const QuadOptions& opts = {}) {
  return integrate_band(geom, DistanceBand{d_lo, d_hi}, f, opts);
}

// Space-time integral over region x [0, T]: Simpson in t of the space integral.
inline double integrate_band_time(const DomainGeometry& geom, const DistanceBand& band,
                                  const SpaceTimeField& f, double T,
                                  const QuadOptions& opts = {}) {
  if (!(T > 0.0)) throw std::invalid_argument("time horizon must be positive");
  const std::size_t nt = std::max<std::size_t>(opts.time_cells, 1);
  auto space_at = [&](double t) {
    return integrate_band(geom, band, [&](double x) { return f(x, t); }, opts);
  };
  const double h = T / static_cast<double>(nt);
  double total = 0.0;
  for (std::size_t c = 0; c < nt; ++c) {
    const double a = static_cast<double>(c) * h;
    total += h / 6.0 * (space_at(a) + 4.0 * space_at(a + 0.5 * h) + space_at(a + h));
  }
  return total;
}

}  // namespace dul
