#pragma once

// Spin autocorrelation operators from time-ordered 2x2 propagators.
//
// Heisenberg operators are referenced to the interval start t_i (so
// sigma_a(t_i) is the bare Pauli matrix) and evolved under the spin
// Hamiltonian H(t) = -mu sigma . drive_field(t) supplied by a driver:
//   sigma_a(t_f) = U^dagger sigma_a U,   U = time-ordered product over
//   midpoint-sampled steps of exp(i mu dt sigma . B).
// Reported quantities:
//   c_op  = 1/4 [sx(tf) sx(ti) + sy(tf) sy(ti) + h.c.]   (in-plane correlator)
//   s_op  = 1/4 [sy(tf) sx(ti) - sx(tf) sy(ti) + h.c.]
//   flip_plus  = sigma_-(tf) sigma_+(ti),  flip_minus = sigma_+(tf) sigma_-(ti)
//   symmetrized_residual = c_op - 1/2 [(flip_plus + flip_minus) + h.c.]
//     (zero by operator algebra for every driver; the unsymmetrized
//      c_op = flip_plus + flip_minus needs the cross-time commutators
//      to vanish, which they generally do not)
//   commutator_norms[a][b] = ||[sigma_a(tf), sigma_b(ti)]||_2
// plus expectation values of c_op and s_op in the spin state polarized along
// a given direction at t_i.  The propagator step count is doubled until one
// halving moves every matrix entry by less than step_tolerance.

#include <array>
#include <cmath>

#include "tphase/core.hpp"
#include "tphase/errors.hpp"
#include "tphase/matrix.hpp"

namespace tphase {

struct AutocorrelationOptions {
  int initial_steps = 16;
  int max_steps = 1 << 22;
  double step_tolerance = 1e-10;
};

struct AutocorrelationResult {
  double t_i = 0.0;
  double t_f = 0.0;
  Mat2 c_op;
  Mat2 s_op;
  Mat2 flip_plus;
  Mat2 flip_minus;
  Mat2 symmetrized_residual;
  std::array<std::array<double, 3>, 3> commutator_norms{};  // [a][b], axes x,y,z
  double c_expectation = 0.0;
  double s_expectation = 0.0;
  int steps_used = 0;
};

namespace detail {

inline double max_entry_distance(const Mat2& x, const Mat2& y) {
  double m = 0.0;
  for (int i = 0; i < 4; ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
  return m;
}

// Time-ordered product of midpoint-sampled steps, latest factor leftmost.
template <typename Driver>
Mat2 spin_propagator(const Driver& driver, double t_i, double t_f, int steps) {
  const double dt = (t_f - t_i) / steps;
  Mat2 u = Mat2::identity();
  for (int k = 0; k < steps; ++k) {
    const Vec3 b = driver.drive_field(t_i + (k + 0.5) * dt);
    const double bn = norm(b);
    if (bn == 0.0) continue;
    u = pauli_rotation(driver.moment() * dt * bn, (1.0 / bn) * b) * u;
  }
  return u;
}

}  // namespace detail

template <typename Driver>
AutocorrelationResult autocorrelation(const Driver& driver, Vec3 polarization, double t_i,
                                      double t_f, const AutocorrelationOptions& opt = {}) {
  if (!(t_f >= t_i)) throw Error("autocorrelation needs a non-negative time interval");
  if (opt.initial_steps < 1) throw Error("autocorrelation needs at least one propagator step");
  if (opt.max_steps < opt.initial_steps) throw Error("autocorrelation step cap below start");
  if (!(opt.step_tolerance > 0.0)) throw Error("autocorrelation step tolerance must be positive");
  const double pn = norm(polarization);
  if (pn == 0.0) throw Error("autocorrelation needs a nonzero polarization direction");

  AutocorrelationResult res;
  res.t_i = t_i;
  res.t_f = t_f;

  Mat2 u = Mat2::identity();
  if (t_f > t_i) {
    int steps = opt.initial_steps;
    Mat2 prev = detail::spin_propagator(driver, t_i, t_f, steps);
    while (true) {
      if (2 * steps > opt.max_steps) {
        throw Error("autocorrelation propagator did not settle within the step cap");
      }
      steps *= 2;
      const Mat2 next = detail::spin_propagator(driver, t_i, t_f, steps);
      if (detail::max_entry_distance(next, prev) < opt.step_tolerance) {
        u = next;
        break;
      }
      prev = next;
    }
    res.steps_used = steps;
  }

  const Mat2 ud = adjoint(u);
  std::array<Mat2, 3> at_i{sigma(1), sigma(2), sigma(3)};
  std::array<Mat2, 3> at_f;
  for (int a = 0; a < 3; ++a) at_f[a] = ud * at_i[a] * u;

  const Mat2 cc = at_f[0] * at_i[0] + at_f[1] * at_i[1];
  res.c_op = 0.25 * (cc + adjoint(cc));
  const Mat2 ss = at_f[1] * at_i[0] - at_f[0] * at_i[1];
  res.s_op = 0.25 * (ss + adjoint(ss));

  const cplx half_i{0.0, 0.5};
  const Mat2 plus_i = 0.5 * at_i[0] + half_i * at_i[1];
  const Mat2 minus_i = 0.5 * at_i[0] - half_i * at_i[1];
  const Mat2 plus_f = 0.5 * at_f[0] + half_i * at_f[1];
  const Mat2 minus_f = 0.5 * at_f[0] - half_i * at_f[1];
  res.flip_plus = minus_f * plus_i;
  res.flip_minus = plus_f * minus_i;
  const Mat2 flip_sum = res.flip_plus + res.flip_minus;
  res.symmetrized_residual = res.c_op - 0.5 * (flip_sum + adjoint(flip_sum));

  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      res.commutator_norms[a][b] = spectral_norm(commutator(at_f[a], at_i[b]));
    }
  }

  // Expectations in the state polarized along the given direction at t_i,
  // via the density matrix (I + sigma . nhat) / 2.
  const Mat2 density = 0.5 * Mat2::identity() + 0.5 * sigma_dot((1.0 / pn) * polarization);
  res.c_expectation = trace(res.c_op * density).real();
  res.s_expectation = trace(res.s_op * density).real();
  return res;
}

}  // namespace tphase
