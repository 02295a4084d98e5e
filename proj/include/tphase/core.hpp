#pragma once

// Core types and the global sign conventions.
//
// Metric signature (+,-,-,-); Levi-Civita symbol fixed by eps^{0123} = +1,
// hence eps_{0123} = -1 (lowering four indices multiplies by det g = -1).
// Every epsilon contraction in the library routes through the two functions
// below; no other file defines its own epsilon sign.

#include <array>
#include <cmath>
#include <complex>

namespace tphase {

using cplx = std::complex<double>;
inline constexpr cplx kImag{0.0, 1.0};

// ---------------------------------------------------------------------------
// 3-vectors
// ---------------------------------------------------------------------------

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double c, Vec3 a) { return {c * a.x, c * a.y, c * a.z}; }
inline Vec3 operator*(Vec3 a, double c) { return c * a; }
inline Vec3 operator/(Vec3 a, double c) { return {a.x / c, a.y / c, a.z / c}; }
inline Vec3& operator+=(Vec3& a, Vec3 b) { a = a + b; return a; }
inline Vec3& operator-=(Vec3& a, Vec3 b) { a = a - b; return a; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return a / norm(a); }

// ---------------------------------------------------------------------------
// Events and four-vectors
// ---------------------------------------------------------------------------

// A spacetime sampling point (t, x, y, z) in natural units (hbar = c = 1).
struct Event {
  double t = 0.0;
  Vec3 r{};
};

// Contravariant components v^mu = (t, x, y, z).
struct FourVector {
  double t = 0.0, x = 0.0, y = 0.0, z = 0.0;

  double operator[](int mu) const {
    return mu == 0 ? t : (mu == 1 ? x : (mu == 2 ? y : z));
  }
  double& operator[](int mu) {
    return mu == 0 ? t : (mu == 1 ? x : (mu == 2 ? y : z));
  }
  Vec3 spatial() const { return {x, y, z}; }
};

// Diagonal of g_{mu nu} for signature (+,-,-,-).
constexpr double metric_diag(int mu) { return mu == 0 ? 1.0 : -1.0; }

// v_mu = g_{mu nu} v^nu.
inline double lower_component(const FourVector& v, int mu) {
  return metric_diag(mu) * v[mu];
}

inline double minkowski_dot(const FourVector& a, const FourVector& b) {
  return a.t * b.t - a.x * b.x - a.y * b.y - a.z * b.z;
}

// ---------------------------------------------------------------------------
// Levi-Civita symbols
// ---------------------------------------------------------------------------

// Sign of (a,b,c,d) as a permutation of (0,1,2,3); 0 if any index repeats.
constexpr int permutation_sign4(int a, int b, int c, int d) {
  const int idx[4] = {a, b, c, d};
  int sign = 1;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) sign = -sign;
    }
  }
  return sign;
}

// eps^{abcd} with eps^{0123} = +1.  THE sign anchor of the library.
constexpr int levi_civita_upper(int a, int b, int c, int d) {
  return permutation_sign4(a, b, c, d);
}

// eps_{abcd} = det(g) * eps^{abcd} = -eps^{abcd} for (+,-,-,-).
constexpr int levi_civita_lower(int a, int b, int c, int d) {
  return -permutation_sign4(a, b, c, d);
}

// Euclidean 3-index symbol over (0,1,2) = (x,y,z); eps3(0,1,2) = +1.
constexpr int eps3(int i, int j, int k) {
  const int idx[3] = {i, j, k};
  int sign = 1;
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      if (idx[a] == idx[b]) return 0;
      if (idx[a] > idx[b]) sign = -sign;
    }
  }
  return sign;
}

}  // namespace tphase
