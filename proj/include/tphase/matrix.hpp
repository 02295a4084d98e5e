#pragma once

// Small dense complex matrices: 2x2 (Pauli algebra) and 4x4 (Clifford algebra).

#include <algorithm>
#include <array>
#include <cmath>

#include "tphase/core.hpp"

namespace tphase {

// ---------------------------------------------------------------------------
// 2x2 complex matrices
// ---------------------------------------------------------------------------

struct Mat2 {
  std::array<cplx, 4> a{};  // row-major

  cplx operator()(int r, int c) const { return a[2 * r + c]; }
  cplx& operator()(int r, int c) { return a[2 * r + c]; }

  static Mat2 zero() { return {}; }
  static Mat2 identity() { return {{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{1, 0}}}; }
};

inline Mat2 operator+(const Mat2& x, const Mat2& y) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}
inline Mat2 operator-(const Mat2& x, const Mat2& y) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}
inline Mat2 operator*(cplx c, const Mat2& x) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.a[i] = c * x.a[i];
  return r;
}
inline Mat2 operator*(const Mat2& x, cplx c) { return c * x; }
inline Mat2 operator*(const Mat2& x, const Mat2& y) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
  return r;
}

inline Mat2 adjoint(const Mat2& x) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = std::conj(x(j, i));
  return r;
}
inline cplx trace(const Mat2& x) { return x(0, 0) + x(1, 1); }
inline cplx det(const Mat2& x) { return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0); }

inline double frobenius_norm(const Mat2& x) {
  double s = 0;
  for (const auto& v : x.a) s += std::norm(v);
  return std::sqrt(s);
}

// Largest singular value, from the exact eigenvalues of A^dagger A.
inline double spectral_norm(const Mat2& x) {
  const Mat2 g = adjoint(x) * x;
  const double tr = trace(g).real();
  const double dt = std::norm(det(x));  // det(A^dagger A) = |det A|^2
  const double disc = std::max(0.0, tr * tr - 4.0 * dt);
  return std::sqrt(0.5 * (tr + std::sqrt(disc)));
}

// max-entry distance from Hermiticity.
inline double hermiticity_defect(const Mat2& x) {
  double m = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      m = std::max(m, std::abs(x(i, j) - std::conj(x(j, i))));
  return m;
}

inline Mat2 commutator(const Mat2& x, const Mat2& y) { return x * y - y * x; }

// Pauli matrices; sigma(k) for k = 1,2,3.
inline Mat2 sigma(int k) {
  switch (k) {
    case 1: return {{cplx{0, 0}, cplx{1, 0}, cplx{1, 0}, cplx{0, 0}}};
    case 2: return {{cplx{0, 0}, cplx{0, -1}, cplx{0, 1}, cplx{0, 0}}};
    default: return {{cplx{1, 0}, cplx{0, 0}, cplx{0, 0}, cplx{-1, 0}}};
  }
}

inline Mat2 sigma_dot(Vec3 v) {
  Mat2 r;
  r(0, 0) = cplx{v.z, 0};
  r(0, 1) = cplx{v.x, -v.y};
  r(1, 0) = cplx{v.x, v.y};
  r(1, 1) = cplx{-v.z, 0};
  return r;
}

// exp(i theta sigma.nhat) = cos(theta) I + i sin(theta) sigma.nhat, |nhat| = 1.
inline Mat2 pauli_rotation(double theta, Vec3 nhat) {
  return std::cos(theta) * Mat2::identity() + cplx{0, std::sin(theta)} * sigma_dot(nhat);
}

// ---------------------------------------------------------------------------
// 4x4 complex matrices
// ---------------------------------------------------------------------------

struct Mat4 {
  std::array<cplx, 16> a{};  // row-major

  cplx operator()(int r, int c) const { return a[4 * r + c]; }
  cplx& operator()(int r, int c) { return a[4 * r + c]; }

  static Mat4 zero() { return {}; }
  static Mat4 identity() {
    Mat4 m;
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
  }
};

inline Mat4 operator+(const Mat4& x, const Mat4& y) {
  Mat4 r;
  for (int i = 0; i < 16; ++i) r.a[i] = x.a[i] + y.a[i];
  return r;
}
inline Mat4 operator-(const Mat4& x, const Mat4& y) {
  Mat4 r;
  for (int i = 0; i < 16; ++i) r.a[i] = x.a[i] - y.a[i];
  return r;
}
inline Mat4 operator*(cplx c, const Mat4& x) {
  Mat4 r;
  for (int i = 0; i < 16; ++i) r.a[i] = c * x.a[i];
  return r;
}
inline Mat4 operator*(const Mat4& x, cplx c) { return c * x; }
inline Mat4 operator*(const Mat4& x, const Mat4& y) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      const cplx v = x(i, k);
      if (v == cplx{}) continue;
      for (int j = 0; j < 4; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

inline Mat4 adjoint(const Mat4& x) {
  Mat4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = std::conj(x(j, i));
  return r;
}
inline cplx trace(const Mat4& x) { return x(0, 0) + x(1, 1) + x(2, 2) + x(3, 3); }

inline double frobenius_norm(const Mat4& x) {
  double s = 0;
  for (const auto& v : x.a) s += std::norm(v);
  return std::sqrt(s);
}
inline double max_abs(const Mat4& x) {
  double m = 0;
  for (const auto& v : x.a) m = std::max(m, std::abs(v));
  return m;
}

inline Mat4 commutator(const Mat4& x, const Mat4& y) { return x * y - y * x; }
inline Mat4 anticommutator(const Mat4& x, const Mat4& y) { return x * y + y * x; }

}  // namespace tphase
