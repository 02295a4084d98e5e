#pragma once

// Phase accumulation along trajectories and across spanning surfaces.
//
// The open-path functional splits into four named parts:
//   ac_spatial        mu * integral (shat x E) . dr
//   ac_relativistic   mu * integral ((s_vec - shat) x E) . dr
//   sab_temporal     -mu * integral (s_vec . B) dt
//   sab_relativistic -mu * integral s0 (B . dr)
// with (s0, s_vec) the boosted four-spin and shat the rest polarization;
// total() is their exact sum.  Every component is integrated by adaptive
// Gauss-Kronrod panels that split at spatial breakpoints and at the
// parameter images of the field's time breakpoints, so discontinuous pulse
// edges never straddle a panel.  Reversed trajectories are integrated
// forward and negated component-wise, which makes reversal exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "tphase/core.hpp"
#include "tphase/effective_gauge.hpp"
#include "tphase/errors.hpp"
#include "tphase/fields.hpp"
#include "tphase/path.hpp"
#include "tphase/quadrature.hpp"
#include "tphase/spinor.hpp"

namespace tphase {

struct PhaseOptions {
  double abs_tol = 1e-10;  // per phase component
  int max_depth = 30;
};

struct PhaseBreakdown {
  double ac_spatial = 0.0;
  double ac_relativistic = 0.0;
  double sab_temporal = 0.0;
  double sab_relativistic = 0.0;
  double quadrature_error = 0.0;
  long evaluations = 0;

  double total() const {
    return ac_spatial + ac_relativistic + sab_temporal + sab_relativistic;
  }
};

namespace detail {

struct SegmentPlan {
  std::vector<double> breaks;   // panel boundaries in u, 0 to 1
  std::vector<double> weight;   // per-segment share of the tolerance budget
};

// Panel boundaries: spatial breakpoints plus the parameter images of the
// field's time breakpoints; tolerance shares follow arc-length shares with a
// floor so zero-length (stationary) segments still get a budget.
inline SegmentPlan plan_segments(const SpacetimePath& path, const EmField* field) {
  std::vector<double> b = path.parameter_breakpoints();
  if (field)
    for (const double tb : field->time_breakpoints())
      for (const double u : path.parameters_at_time(tb)) b.push_back(u);
  std::sort(b.begin(), b.end());
  SegmentPlan plan;
  plan.breaks.push_back(0.0);
  for (const double v : b)
    if (v > plan.breaks.back() + 1e-12 && v < 1.0) plan.breaks.push_back(v);
  plan.breaks.push_back(1.0);

  const std::size_t nseg = plan.breaks.size() - 1;
  std::vector<double> len(nseg, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < nseg; ++k) {
    const double lo = plan.breaks[k], hi = plan.breaks[k + 1];
    for (int i = 0; i < 8; ++i) {
      const double u = lo + (hi - lo) * (i + 0.5) / 8.0;
      len[k] += norm(path.spatial().at(u).tangent) * (hi - lo) / 8.0;
    }
    total += len[k];
  }
  plan.weight.resize(nseg);
  const double floor_share = 1.0 / (4.0 * static_cast<double>(nseg));
  for (std::size_t k = 0; k < nseg; ++k)
    plan.weight[k] = total > 0.0 ? std::max(len[k] / total, floor_share) : 1.0 / nseg;
  return plan;
}

template <class G>
void add_component(const SegmentPlan& plan, const PhaseOptions& opt, G&& g, double& value,
                   double& error, long& evals) {
  for (std::size_t k = 0; k + 1 < plan.breaks.size(); ++k) {
    const QuadratureResult r = integrate_adaptive(g, plan.breaks[k], plan.breaks[k + 1],
                                                  opt.abs_tol * plan.weight[k], opt.max_depth);
    value += r.value;
    error += r.error_estimate;
    evals += r.evaluations;
  }
}

}  // namespace detail

// Full four-component phase of a particle state carried along a timed
// trajectory through a field.
inline PhaseBreakdown open_path_phase(const EmField& field, const PolarizedParticle& particle,
                                      const SpacetimePath& path, const PhaseOptions& opt = {}) {
  particle.validate();
  const double mu = particle.moment;
  const FourVector s = four_spin(particle);
  const Vec3 shat = particle.polarization;
  const Vec3 sv = s.spatial();
  const double s0 = s.t;
  const SpatialPath& sp = path.spatial();
  const auto plan = detail::plan_segments(path, &field);

  PhaseBreakdown out;
  detail::add_component(
      plan, opt,
      [&](double u) {
        const PathPoint p = sp.at(u);
        const FieldSample f = field.sample({path.time(u), p.position});
        return mu * dot(cross(shat, f.electric), p.tangent);
      },
      out.ac_spatial, out.quadrature_error, out.evaluations);
  detail::add_component(
      plan, opt,
      [&](double u) {
        const PathPoint p = sp.at(u);
        const FieldSample f = field.sample({path.time(u), p.position});
        return mu * dot(cross(sv - shat, f.electric), p.tangent);
      },
      out.ac_relativistic, out.quadrature_error, out.evaluations);
  detail::add_component(
      plan, opt,
      [&](double u) {
        const FieldSample f = field.sample(path.event(u));
        return -mu * dot(sv, f.magnetic) * path.time_rate(u);
      },
      out.sab_temporal, out.quadrature_error, out.evaluations);
  detail::add_component(
      plan, opt,
      [&](double u) {
        const PathPoint p = sp.at(u);
        const FieldSample f = field.sample({path.time(u), p.position});
        return -mu * s0 * dot(f.magnetic, p.tangent);
      },
      out.sab_relativistic, out.quadrature_error, out.evaluations);

  if (path.is_reversed()) {
    out.ac_spatial = -out.ac_spatial;
    out.ac_relativistic = -out.ac_relativistic;
    out.sab_temporal = -out.sab_temporal;
    out.sab_relativistic = -out.sab_relativistic;
  }
  return out;
}

// Spin-coupled loop phase for a spin dragged with constant velocity: the
// spatial term uses the rest polarization and the relativistic term the
// velocity-induced correction gamma^2 (v . shat) / (gamma + 1) v, which is
// exactly the boosted-minus-rest spatial spin (the mass cancels).
inline PhaseBreakdown ac_phase(const EmField& field, double mu, const Vec3& spin_direction,
                               const Vec3& velocity, const SpacetimePath& path,
                               const PhaseOptions& opt = {}) {
  if (std::abs(norm(spin_direction) - 1.0) > 1e-10)
    throw Error("spin direction must be a unit vector");
  const double v2 = dot(velocity, velocity);
  if (!(v2 < 1.0)) throw Error("speed must be below 1 (c = 1)");
  const double gamma = 1.0 / std::sqrt(1.0 - v2);
  const Vec3 correction =
      (gamma * gamma * dot(velocity, spin_direction) / (gamma + 1.0)) * velocity;
  const SpatialPath& sp = path.spatial();
  const auto plan = detail::plan_segments(path, &field);

  PhaseBreakdown out;
  detail::add_component(
      plan, opt,
      [&](double u) {
        const PathPoint p = sp.at(u);
        const FieldSample f = field.sample({path.time(u), p.position});
        return mu * dot(cross(spin_direction, f.electric), p.tangent);
      },
      out.ac_spatial, out.quadrature_error, out.evaluations);
  detail::add_component(
      plan, opt,
      [&](double u) {
        const PathPoint p = sp.at(u);
        const FieldSample f = field.sample({path.time(u), p.position});
        return mu * dot(cross(correction, f.electric), p.tangent);
      },
      out.ac_relativistic, out.quadrature_error, out.evaluations);

  if (path.is_reversed()) {
    out.ac_spatial = -out.ac_spatial;
    out.ac_relativistic = -out.ac_relativistic;
  }
  return out;
}

// Time-projected loop phase for a spin direction held fixed:
// -mu integral (shat . B) dt - mu integral (v . shat) (B . dr), with the
// velocity taken from the trajectory (or its constant override).
inline PhaseBreakdown sab_phase(const EmField& field, double mu, const Vec3& spin_direction,
                                const SpacetimePath& path, const PhaseOptions& opt = {}) {
  if (std::abs(norm(spin_direction) - 1.0) > 1e-10)
    throw Error("spin direction must be a unit vector");
  const SpatialPath& sp = path.spatial();
  const auto plan = detail::plan_segments(path, &field);

  PhaseBreakdown out;
  detail::add_component(
      plan, opt,
      [&](double u) {
        const FieldSample f = field.sample(path.event(u));
        return -mu * dot(spin_direction, f.magnetic) * path.time_rate(u);
      },
      out.sab_temporal, out.quadrature_error, out.evaluations);
  detail::add_component(
      plan, opt,
      [&](double u) {
        const PathPoint p = sp.at(u);
        const FieldSample f = field.sample({path.time(u), p.position});
        const double br = dot(f.magnetic, p.tangent);
        if (br == 0.0) return 0.0;
        const Vec3 v = path.velocity(u);
        if (!(dot(v, v) < 1.0)) throw Error("superluminal trajectory segment");
        return -mu * dot(v, spin_direction) * br;
      },
      out.sab_relativistic, out.quadrature_error, out.evaluations);

  if (path.is_reversed()) {
    out.sab_temporal = -out.sab_temporal;
    out.sab_relativistic = -out.sab_relativistic;
  }
  return out;
}

struct LinePhaseResult {
  double phase = 0.0;
  double quadrature_error = 0.0;
  long evaluations = 0;
};

// The phase functional phi = mu * integral (a_vec . dr - a0 dt) for an
// arbitrary potential sampler (for example a gauge-transformed one).  Pass
// the underlying field when available so its time breakpoints split panels.
inline LinePhaseResult potential_line_phase(const PotentialFn& pot, double mu,
                                            const SpacetimePath& path,
                                            const PhaseOptions& opt = {},
                                            const EmField* field_hint = nullptr) {
  if (!pot) throw Error("line phase needs a potential sampler");
  const SpatialPath& sp = path.spatial();
  const auto plan = detail::plan_segments(path, field_hint);
  LinePhaseResult out;
  detail::add_component(
      plan, opt,
      [&](double u) {
        const Event ev = path.event(u);
        const PotentialValue v = pot(ev);
        return mu * (dot(v.vector, sp.at(u).tangent) - v.scalar * path.time_rate(u));
      },
      out.phase, out.quadrature_error, out.evaluations);
  if (path.is_reversed()) out.phase = -out.phase;
  return out;
}

// ---------------------------------------------------------------------------
// Surface flux
// ---------------------------------------------------------------------------

namespace detail {

inline double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double dd = dot(ab, ab);
  if (dd == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / dd, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

// Closest-point distance from p to triangle abc via barycentric region
// classification; degenerate triangles fall back to edge distances.
inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                                      const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return norm(p - a);

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return norm(p - b);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return norm(p - (a + v * ab));
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return norm(p - c);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return norm(p - (a + w * ac));
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return norm(p - (b + w * (c - b)));
  }

  const double denom = va + vb + vc;
  if (denom == 0.0)
    return std::min({point_segment_distance(p, a, b), point_segment_distance(p, b, c),
                     point_segment_distance(p, c, a)});
  const double v = vb / denom, w = vc / denom;
  return norm(p - (a + v * ab + w * ac));
}

// Distance from an infinite line to a triangle: project onto the plane
// perpendicular to the line (the line becomes the origin) and measure the
// planar point-triangle distance.
inline double line_triangle_distance(const Vec3& line_point, const Vec3& line_dir,
                                     const Vec3& a, const Vec3& b, const Vec3& c) {
  const double len = norm(line_dir);
  if (!(len > 0.0)) throw Error("line direction must be nonzero");
  const Vec3 d = line_dir / len;
  auto project = [&](const Vec3& p) {
    const Vec3 rel = p - line_point;
    return rel - dot(rel, d) * d;
  };
  return point_triangle_distance(Vec3{}, project(a), project(b), project(c));
}

}  // namespace detail

struct SurfaceFluxOptions {
  double refine_tol = 1e-6;  // successive-refinement agreement target
  int max_levels = 6;
  int initial_sectors = 1024;
  int initial_rings = 8;
  double fd_step = kFdStep;
};

// Flux of the effective magnetic field through a fan-triangulated surface
// spanning the loop, mu * surface integral curl(a_vec) . dS, with the
// surface normal oriented by the loop traversal.  The mesh is refined until
// two successive levels agree to refine_tol.  Throws
// SurfaceCrossesSingularity when any element comes within the exclusion
// radius of one of the field's singular lines.
inline double surface_flux_phase(const EffectivePotential& potential, double mu,
                                 const SpatialPath& loop, double at_time,
                                 const SurfaceFluxOptions& opt = {}) {
  if (!loop.closed()) throw Error("surface flux requires a closed boundary loop");
  if (opt.initial_sectors < 3 || opt.initial_rings < 1 || opt.max_levels < 2)
    throw Error("surface flux mesh options out of range");
  const std::vector<AxisLine> axes = potential.field().singular_lines();

  auto triangle_flux = [&](const Vec3& a, const Vec3& b, const Vec3& c) {
    for (const AxisLine& ax : axes)
      if (detail::line_triangle_distance(ax.point, ax.direction, a, b, c) < ax.exclusion)
        throw SurfaceCrossesSingularity(
            "spanning surface element crosses a singular filament");
    const Vec3 nds = 0.5 * cross(b - a, c - a);
    if (dot(nds, nds) == 0.0) return 0.0;
    const Vec3 centroid = (a + b + c) / 3.0;
    return dot(potential.b_identity({at_time, centroid}, opt.fd_step), nds);
  };

  double prev = 0.0;
  bool have_prev = false;
  for (int level = 0; level < opt.max_levels; ++level) {
    const int sectors = opt.initial_sectors << level;
    const int rings = opt.initial_rings << level;
    std::vector<Vec3> rim(static_cast<std::size_t>(sectors));
    Vec3 center{};
    for (int i = 0; i < sectors; ++i) {
      rim[static_cast<std::size_t>(i)] = loop.at(static_cast<double>(i) / sectors).position;
      center += rim[static_cast<std::size_t>(i)];
    }
    center = center / static_cast<double>(sectors);

    double flux = 0.0;
    for (int ring = 0; ring < rings; ++ring) {
      const double f0 = static_cast<double>(ring) / rings;
      const double f1 = static_cast<double>(ring + 1) / rings;
      for (int i = 0; i < sectors; ++i) {
        const Vec3& p0 = rim[static_cast<std::size_t>(i)];
        const Vec3& p1 = rim[static_cast<std::size_t>((i + 1) % sectors)];
        const Vec3 a = center + f0 * (p0 - center);
        const Vec3 b = center + f0 * (p1 - center);
        const Vec3 c = center + f1 * (p1 - center);
        const Vec3 d = center + f1 * (p0 - center);
        // (a, c, b) and (a, d, c): normals follow the loop traversal, so a
        // counter-clockwise boundary gives the Stokes-consistent surface
        // orientation.
        flux += triangle_flux(a, c, b);
        flux += triangle_flux(a, d, c);
      }
    }
    const double phase = mu * flux;
    if (have_prev && std::abs(phase - prev) < opt.refine_tol) return phase;
    prev = phase;
    have_prev = true;
  }
  throw QuadratureNonconvergence("surface flux did not stabilize under mesh refinement");
}

}  // namespace tphase
