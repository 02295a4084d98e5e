#pragma once

// Time evolution of lattice spinor states under the Foldy-Wouthuysen grid
// Hamiltonian: Crank-Nicolson stepping with a matrix-free BiCGSTAB solve,
// a discrete continuity-equation check, and a two-arm packet interferometer.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "core.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "hamiltonian.hpp"
#include "path.hpp"
#include "phase.hpp"
#include "spinor.hpp"
#include "spinor_grid.hpp"

namespace tphase {

struct EvolveOptions {
  double dt = 0.01;
  int steps = 1;
  double solve_tol = 1e-12;        // relative residual target per linear solve
  int max_solver_iterations = 10000;
  bool static_field = true;        // when false, resample couplings at each step midpoint
  FwBuildOptions build{};
};

struct EvolveReport {
  int steps = 0;
  int peak_solver_iterations = 0;
  double max_norm_drift = 0.0;  // max |norm_sq(t) - norm_sq(0)| seen during the run
};

namespace detail {

// Solves (I + i c H) x = b with right diagonal preconditioning; x holds the
// initial guess on entry. Returns the iteration count.
inline int solve_crank_nicolson(const HamiltonianTerms& H, double c, const std::vector<cplx>& b,
                                std::vector<cplx>& x, double tol, int max_iterations) {
  const std::size_t dim = b.size();
  const cplx ic = kImag * c;
  std::vector<cplx> tmp(dim);
  auto apply_a = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
    H.apply(in, tmp);
    out.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) out[k] = in[k] + ic * tmp[k];
  };
  const std::vector<double> hdiag = H.diagonal();
  std::vector<cplx> precond_diag(dim);
  for (std::size_t k = 0; k < dim; ++k) precond_diag[k] = 1.0 / (1.0 + ic * hdiag[k]);

  auto dot_ch = [&](const std::vector<cplx>& u, const std::vector<cplx>& v) {
    cplx s{};
    for (std::size_t k = 0; k < dim; ++k) s += std::conj(u[k]) * v[k];
    return s;
  };
  auto norm2 = [&](const std::vector<cplx>& u) { return std::sqrt(std::abs(dot_ch(u, u))); };

  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x.assign(dim, cplx{});
    return 0;
  }
  std::vector<cplx> r(dim), rhat, p(dim, cplx{}), v(dim, cplx{}), phat(dim), shat(dim), t(dim),
      s(dim);
  apply_a(x, r);
  for (std::size_t k = 0; k < dim; ++k) r[k] = b[k] - r[k];
  rhat = r;
  cplx rho{1.0}, alpha{1.0}, omega{1.0};
  // Once the tolerance is met, keep iterating briefly: the stopping tolerance
  // bounds the residual, but the leftover residual is biased along the
  // dominant modes and would otherwise accumulate as a secular norm drift
  // over thousands of steps.  Up to two polish iterations, ending early once
  // the residual sits two orders below the requested tolerance.
  int polish_left = 2;
  int it = 0;
  while (true) {
    const double resid = norm2(r);
    if (resid <= tol * bnorm) {
      const double floor_resid =
          std::max(0.01 * tol, 64.0 * std::numeric_limits<double>::epsilon()) * bnorm;
      if (polish_left == 0 || resid <= floor_resid) return it;
      --polish_left;
    }
    if (it++ >= max_iterations) {
      throw SolverNonconvergence("linear solve did not reach tolerance within the iteration limit");
    }
    const cplx rho1 = dot_ch(rhat, r);
    if (std::abs(rho1) < 1e-300) {
      if (resid <= tol * bnorm) return it - 1;
      throw SolverNonconvergence("linear solver breakdown (rho)");
    }
    if (it == 1) {
      p = r;
    } else {
      const cplx beta = (rho1 / rho) * (alpha / omega);
      for (std::size_t k = 0; k < dim; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
    }
    rho = rho1;
    for (std::size_t k = 0; k < dim; ++k) phat[k] = precond_diag[k] * p[k];
    apply_a(phat, v);
    const cplx denom = dot_ch(rhat, v);
    if (std::abs(denom) < 1e-300) {
      if (resid <= tol * bnorm) return it - 1;
      throw SolverNonconvergence("linear solver breakdown (alpha)");
    }
    alpha = rho / denom;
    for (std::size_t k = 0; k < dim; ++k) s[k] = r[k] - alpha * v[k];
    for (std::size_t k = 0; k < dim; ++k) shat[k] = precond_diag[k] * s[k];
    apply_a(shat, t);
    const double tt = std::abs(dot_ch(t, t));
    if (tt < 1e-300) {
      // s is (numerically) zero: alpha alone finishes the step.
      for (std::size_t k = 0; k < dim; ++k) {
        x[k] += alpha * phat[k];
        r[k] = s[k];
      }
      continue;
    }
    omega = dot_ch(t, s) / tt;
    for (std::size_t k = 0; k < dim; ++k) {
      x[k] += alpha * phat[k] + omega * shat[k];
      r[k] = s[k] - omega * t[k];
    }
  }
}

}  // namespace detail

// Advances the state through opt.steps Crank-Nicolson steps of size opt.dt.
// The couplings are sampled at each step's midpoint time (once, when the
// field is declared static). Preconditions: dt > 0 and dt times the largest
// sampled coupling magnitude below 1/2 (accuracy guard).
inline EvolveReport evolve(SpinorGrid& state, std::shared_ptr<const EmField> field,
                           const PolarizedParticle& particle, const EvolveOptions& opt) {
  if (!(opt.dt > 0.0)) throw Error("time step must be positive");
  if (opt.steps < 1) throw Error("step count must be at least 1");
  if (!(opt.solve_tol > 0.0)) throw Error("solver tolerance must be positive");
  const double norm0 = state.norm_sq();
  const double half = 0.5 * opt.dt;
  HamiltonianTerms H;
  bool built = false;
  EvolveReport report;
  std::vector<cplx> rhs(state.amp.size()), tmp(state.amp.size());
  for (int step = 0; step < opt.steps; ++step) {
    if (!built || !opt.static_field) {
      H = build_fw_hamiltonian(field, particle, state.geom, state.time + half, opt.build);
      built = true;
      if (opt.dt * H.max_field_energy() >= 0.5) {
        throw Error("time step too large for the sampled couplings (dt * max energy >= 1/2)");
      }
    }
    H.apply(state.amp, tmp);
    for (std::size_t k = 0; k < rhs.size(); ++k) {
      rhs[k] = state.amp[k] - kImag * half * tmp[k];
    }
    // state.amp doubles as the initial guess and receives the solution.
    const int iters = detail::solve_crank_nicolson(H, half, rhs, state.amp, opt.solve_tol,
                                                   opt.max_solver_iterations);
    report.peak_solver_iterations = std::max(report.peak_solver_iterations, iters);
    state.time += opt.dt;
    report.max_norm_drift = std::max(report.max_norm_drift, std::abs(state.norm_sq() - norm0));
  }
  report.steps = opt.steps;
  return report;
}

struct CurrentCheckResult {
  double max_residual = 0.0;
  double rms_residual = 0.0;
  int interior_nodes = 0;
};

// Discrete continuity check d|psi|^2/dt + div j on interior nodes, using
// three equally spaced time slices and the couplings at the middle time.
// j = (1/m)[Im(psi^dag grad psi) - mu A |psi|^2]; this is the current of the
// kinetic and potential terms, so the residual is meaningful when the
// effective electric field (whose spin-orbit coupling transports additional
// current) vanishes on the grid.
inline CurrentCheckResult probability_current_check(const SpinorGrid& before,
                                                    const SpinorGrid& middle,
                                                    const SpinorGrid& after,
                                                    const HamiltonianTerms& terms,
                                                    int margin = 2) {
  if (!before.geom.same_shape(middle.geom) || !middle.geom.same_shape(after.geom) ||
      !terms.geom.same_shape(middle.geom)) {
    throw Error("continuity check requires identical grid geometry on all inputs");
  }
  const double dt1 = middle.time - before.time;
  const double dt2 = after.time - middle.time;
  if (!(dt1 > 0.0) || std::abs(dt2 - dt1) > 1e-9 * std::max(dt1, std::abs(dt2))) {
    throw Error("continuity check requires equally spaced, increasing time slices");
  }
  if (margin < 2) throw Error("continuity check needs a margin of at least 2 nodes");
  const GridGeometry& g = middle.geom;
  const int nx = g.nx, ny = g.ny;
  if (nx <= 2 * margin || ny <= 2 * margin) throw Error("grid too small for the chosen margin");
  const double h = g.spacing;
  const double inv2h = 1.0 / (2.0 * h);
  const double invm = 1.0 / terms.mass;

  auto density = [](const SpinorGrid& s, std::size_t n) {
    return std::norm(s.amp[2 * n]) + std::norm(s.amp[2 * n + 1]);
  };
  auto current = [&](int i, int j, int dir) {
    const std::size_t n = g.index(i, j);
    const std::size_t np = dir == 0 ? g.index(i + 1, j) : g.index(i, j + 1);
    const std::size_t nm = dir == 0 ? g.index(i - 1, j) : g.index(i, j - 1);
    double im = 0.0;
    for (int c = 0; c < 2; ++c) {
      im += std::imag(std::conj(middle.amp[2 * n + c]) *
                      (middle.amp[2 * np + c] - middle.amp[2 * nm + c]) * inv2h);
    }
    const double acomp = dir == 0 ? terms.a[n].x : terms.a[n].y;
    return invm * (im - terms.moment * acomp * density(middle, n));
  };

  CurrentCheckResult result;
  double sum_sq = 0.0;
  for (int j = margin; j < ny - margin; ++j) {
    for (int i = margin; i < nx - margin; ++i) {
      const std::size_t n = g.index(i, j);
      const double rho_dot = (density(after, n) - density(before, n)) / (2.0 * dt1);
      const double div_j = (current(i + 1, j, 0) - current(i - 1, j, 0)) * inv2h +
                           (current(i, j + 1, 1) - current(i, j - 1, 1)) * inv2h;
      const double r = std::abs(rho_dot + div_j);
      result.max_residual = std::max(result.max_residual, r);
      sum_sq += r * r;
      ++result.interior_nodes;
    }
  }
  if (result.interior_nodes > 0) {
    result.rms_residual = std::sqrt(sum_sq / result.interior_nodes);
  }
  return result;
}

// Two-arm packet interferometer. A packet is split in momentum only: one copy
// runs source -> waypoint -> drain, the other runs the mirror path reflected
// across the source-drain axis. Each arm gets a redirecting momentum kick at
// the waypoint and an aligning kick at recombination that removes the
// transverse momentum; the returned phase is arg<upper|lower> there, whose
// reference value is the line-integral phase of the closed circuit traversed
// lower arm forward, upper arm backward (counterclockwise when the waypoint
// lies on the +y side of the axis).
struct InterferometryParams {
  GridGeometry geom{};          // default 256 x 256, box [-18, 18]^2
  double sigma0 = 1.0;          // initial packet width
  double momentum = 4.0;        // packet momentum magnitude along each leg
  Vec3 source{-9.0, 0.0, 0.0};
  Vec3 waypoint{0.0, 7.0, 0.0};
  Vec3 drain{9.0, 0.0, 0.0};
  double dt = 0.01;
  double solve_tol = 1e-12;
  int max_solver_iterations = 10000;
  double min_axis_clearance_widths = 5.0;  // arms stay this many sigma0 off singular lines
  double min_overlap = 1e-3;
  FwBuildOptions build{};
};

struct InterferometryResult {
  double phase = 0.0;             // arg<upper|lower> at recombination
  double loop_reference = 0.0;    // line-integral phase of the closed circuit
  double discrepancy = 0.0;       // |phase - loop_reference|, wrapped to (-pi, pi]
  double overlap_magnitude = 0.0;
  int steps_per_leg = 0;
};

namespace detail {

// Least distance between a segment [a, b] and the infinite line through
// `point` along `dir`.
inline double segment_line_distance(Vec3 a, Vec3 b, Vec3 point, Vec3 dir) {
  const Vec3 u = normalized(dir);
  const Vec3 c0 = cross(a - point, u);
  const Vec3 c1 = cross(b - a, u);
  const double denom = dot(c1, c1);
  double t = 0.0;
  if (denom > 0.0) t = std::clamp(-dot(c0, c1) / denom, 0.0, 1.0);
  return norm(c0 + t * c1);
}

inline double wrap_angle(double x) {
  while (x > std::numbers::pi) x -= 2.0 * std::numbers::pi;
  while (x <= -std::numbers::pi) x += 2.0 * std::numbers::pi;
  return x;
}

}  // namespace detail

// Spin-1/2 amplitude pointing along the unit vector shat (sigma.shat = +1).
inline std::array<cplx, 2> spin_amplitude_along(Vec3 shat) {
  if (std::abs(norm(shat) - 1.0) > 1e-10) throw Error("spin direction must be a unit vector");
  if (shat.z < -1.0 + 1e-12) return {cplx{0.0, 0.0}, cplx{1.0, 0.0}};
  const double w = std::sqrt(2.0 * (1.0 + shat.z));
  return {cplx{(1.0 + shat.z) / w, 0.0}, cplx{shat.x, shat.y} / w};
}

inline InterferometryResult interferometric_phase(std::shared_ptr<const EmField> field,
                                                  const PolarizedParticle& particle,
                                                  const InterferometryParams& p) {
  if (!field) throw Error("interferometry requires a field");
  particle.validate();
  p.geom.validate();
  if (!(p.sigma0 > 0.0) || !(p.momentum > 0.0)) {
    throw Error("packet width and momentum must be positive");
  }

  const Vec3 axis_dir = p.drain - p.source;
  if (norm(axis_dir) == 0.0) throw Error("source and drain must be distinct");
  const Vec3 u = normalized(axis_dir);
  const Vec3 w = p.waypoint - p.source;
  const Vec3 mirrored = p.source + 2.0 * dot(w, u) * u - w;  // waypoint reflected across axis

  // Both arms must clear every singular line by the requested multiple of
  // the packet width.
  const double clearance = p.min_axis_clearance_widths * p.sigma0;
  for (const AxisLine& line : field->singular_lines()) {
    const double d = std::min(
        std::min(detail::segment_line_distance(p.source, p.waypoint, line.point, line.direction),
                 detail::segment_line_distance(p.waypoint, p.drain, line.point, line.direction)),
        std::min(detail::segment_line_distance(p.source, mirrored, line.point, line.direction),
                 detail::segment_line_distance(mirrored, p.drain, line.point, line.direction)));
    if (d < clearance) {
      throw Error("interferometer arm passes closer to a field singular line than the "
                  "required clearance in packet widths");
    }
  }

  const double speed = p.momentum / particle.mass;
  const double t_leg1 = norm(p.waypoint - p.source) / speed;
  const double t_leg2 = norm(p.drain - p.waypoint) / speed;
  const int steps1 = std::max(1, static_cast<int>(std::llround(t_leg1 / p.dt)));
  const int steps2 = std::max(1, static_cast<int>(std::llround(t_leg2 / p.dt)));

  const std::array<cplx, 2> chi = spin_amplitude_along(particle.polarization);
  auto run_arm = [&](const Vec3& via) {
    const Vec3 p1 = p.momentum * normalized(via - p.source);
    const Vec3 p2 = p.momentum * normalized(p.drain - via);
    SpinorGrid psi = make_gaussian_packet(p.geom, p.source, p1, p.sigma0, chi);
    EvolveOptions opt;
    opt.dt = p.dt;
    opt.solve_tol = p.solve_tol;
    opt.max_solver_iterations = p.max_solver_iterations;
    opt.build = p.build;
    opt.steps = steps1;
    evolve(psi, field, particle, opt);
    momentum_kick(psi, p2 - p1);
    opt.steps = steps2;
    evolve(psi, field, particle, opt);
    momentum_kick(psi, dot(p2, u) * u - p2);  // drop the transverse momentum
    return psi;
  };

  const SpinorGrid upper = run_arm(p.waypoint);
  const SpinorGrid lower = run_arm(mirrored);
  const cplx overlap = inner_product(upper, lower);
  InterferometryResult result;
  result.overlap_magnitude = std::abs(overlap);
  if (result.overlap_magnitude < p.min_overlap) {
    throw OverlapTooSmall("arm overlap at recombination is below the interference threshold");
  }
  result.phase = std::arg(overlap);
  result.steps_per_leg = steps1;

  // Ground truth: the closed circuit lower arm forward, upper arm backward.
  auto loop = std::make_shared<PolylinePath>(
      std::vector<Vec3>{p.source, mirrored, p.drain, p.waypoint, p.source});
  SpacetimePath circuit(loop, 0.0, 1.0);
  result.loop_reference =
      ac_phase(*field, particle.moment, particle.polarization, Vec3{}, circuit).total();
  result.discrepancy = std::abs(detail::wrap_angle(result.phase - result.loop_reference));
  return result;
}

}  // namespace tphase
