#pragma once

// Antisymmetric electromagnetic field tensor F^{mu nu} housing (E, B).
//
// Convention: F^{i0} = E^i and F^{ij} = -eps3(i,j,k) B^k, chosen so that the
// effective-potential contraction reproduces the pair (s.B, s x E) used by
// the nonrelativistic Hamiltonian (see effective_gauge.hpp).

#include <array>

#include "tphase/core.hpp"

namespace tphase {

struct FieldTensor {
  // contravariant components F^{mu nu}
  std::array<std::array<double, 4>, 4> f{};

  double upper(int mu, int nu) const { return f[mu][nu]; }
  // F_{mu nu} = g_{mu a} g_{nu b} F^{ab}
  double lower(int mu, int nu) const {
    return metric_diag(mu) * metric_diag(nu) * f[mu][nu];
  }
};

inline FieldTensor assemble_field_tensor(Vec3 e, Vec3 b) {
  FieldTensor t;
  for (int i = 0; i < 3; ++i) {
    t.f[i + 1][0] = e[i];
    t.f[0][i + 1] = -e[i];
    for (int j = 0; j < 3; ++j) {
      double v = 0;
      for (int k = 0; k < 3; ++k) v -= eps3(i, j, k) * b[k];
      t.f[i + 1][j + 1] = v;
    }
  }
  return t;
}

inline Vec3 electric_field(const FieldTensor& t) {
  return {t.f[1][0], t.f[2][0], t.f[3][0]};
}

inline Vec3 magnetic_field(const FieldTensor& t) {
  Vec3 b{};
  // B^m = -1/2 eps3(i,j,m) F^{ij}
  for (int m = 0; m < 3; ++m) {
    double v = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) v += eps3(i, j, m) * t.f[i + 1][j + 1];
    b[m] = -0.5 * v;
  }
  return b;
}

inline double antisymmetry_defect(const FieldTensor& t) {
  double m = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double d = t.f[a][b] + t.f[b][a];
      if (std::abs(d) > m) m = std::abs(d);
    }
  return m;
}

}  // namespace tphase
