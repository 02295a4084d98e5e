#pragma once

// Adaptive Gauss-Kronrod (G7/K15) quadrature with bisection refinement.
//
// The error of each panel is estimated as |K15 - G7|; panels above the
// locally allocated tolerance are bisected, halving the allocation, up to a
// maximum depth.  Exceeding the depth with the tolerance unmet is an error,
// never a silent best effort.  Node/weight constants are validated in the
// test suite by polynomial exactness (G7 exact through degree 13, K15
// through degree 22).

#include <cmath>

#include "tphase/errors.hpp"

namespace tphase {

namespace detail {

// Positive Kronrod abscissae on [-1, 1]; odd indices are the Gauss-7 nodes.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

// Gauss-7 weights paired with kKronrodNodes[1], [3], [5], [7].
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace detail

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

// Integrates f over [a, b] to the requested absolute tolerance.  Throws
// QuadratureNonconvergence if bisection reaches max_depth with the local
// error estimate still above its allocation.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-10,
                                    int max_depth = 30) {
  struct Worker {
    F& fn;
    int max_depth;
    QuadratureResult out;

    void run(double lo, double hi, double tol, int depth) {
      const double mid = 0.5 * (lo + hi);
      const double half = 0.5 * (hi - lo);
      double gauss = 0.0, kronrod = 0.0;
      for (int i = 0; i < 8; ++i) {
        const double off = half * detail::kKronrodNodes[i];
        double v;
        if (i == 7) {
          v = fn(mid);
          out.evaluations += 1;
        } else {
          v = fn(mid - off) + fn(mid + off);
          out.evaluations += 2;
        }
        kronrod += detail::kKronrodWeights[i] * v;
        if (i % 2 == 1) gauss += detail::kGaussWeights[i / 2] * v;
      }
      const double value = kronrod * half;
      const double err = std::abs(kronrod - gauss) * half;
      if (err <= tol || half == 0.0) {
        out.value += value;
        out.error_estimate += err;
        return;
      }
      if (depth >= max_depth)
        throw QuadratureNonconvergence(
            "adaptive quadrature failed to reach tolerance at maximum depth");
      run(lo, mid, 0.5 * tol, depth + 1);
      run(mid, hi, 0.5 * tol, depth + 1);
    }
  };

  Worker w{f, max_depth, {}};
  w.run(a, b, abs_tol, 0);
  return w.out;
}

}  // namespace tphase
