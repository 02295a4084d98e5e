#pragma once

// Second-order central finite differences over spacetime callables.
//
// Scalar callables map Event -> double, vector callables Event -> Vec3.
// All operators have O(h^2) truncation error; the default step balances
// truncation against rounding for order-unity fields.  Stencils propagate
// any exception thrown by the callable (e.g. AxisProximity near a filament).

#include <utility>

#include "tphase/core.hpp"

namespace tphase {

inline constexpr double kFdStep = 1e-4;

namespace detail {

inline Event shifted(Event at, int mu, double d) {
  if (mu == 0)
    at.t += d;
  else
    at.r[mu - 1] += d;
  return at;
}

}  // namespace detail

// d f / d x^mu with mu in {0: t, 1: x, 2: y, 3: z}.
template <class F>
double fd_partial(F&& f, const Event& at, int mu, double h = kFdStep) {
  return (f(detail::shifted(at, mu, h)) - f(detail::shifted(at, mu, -h))) / (2.0 * h);
}

// Spatial gradient of a scalar callable.
template <class F>
Vec3 fd_gradient(F&& f, const Event& at, double h = kFdStep) {
  return {fd_partial(f, at, 1, h), fd_partial(f, at, 2, h), fd_partial(f, at, 3, h)};
}

// Divergence of a vector callable.
template <class V>
double fd_divergence(V&& v, const Event& at, double h = kFdStep) {
  double div = 0.0;
  for (int i = 0; i < 3; ++i)
    div += fd_partial([&](const Event& e) { return v(e)[i]; }, at, i + 1, h);
  return div;
}

// Curl of a vector callable.
template <class V>
Vec3 fd_curl(V&& v, const Event& at, double h = kFdStep) {
  Vec3 curl{};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    curl[i] = fd_partial([&](const Event& e) { return v(e)[k]; }, at, j + 1, h) -
              fd_partial([&](const Event& e) { return v(e)[j]; }, at, k + 1, h);
  }
  return curl;
}

// Directional derivative (a . grad) v of a vector callable.
template <class V>
Vec3 fd_directional_derivative(V&& v, const Event& at, Vec3 a, double h = kFdStep) {
  Vec3 r{};
  for (int i = 0; i < 3; ++i) {
    const Vec3 d = fd_gradient([&](const Event& e) { return v(e)[i]; }, at, h);
    r[i] = dot(a, d);
  }
  return r;
}

// Time derivative of a vector callable.
template <class V>
Vec3 fd_time_derivative(V&& v, const Event& at, double h = kFdStep) {
  return (v(detail::shifted(at, 0, h)) - v(detail::shifted(at, 0, -h))) / (2.0 * h);
}

}  // namespace tphase
