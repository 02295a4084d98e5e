#pragma once

// Clifford-algebra engine in the Dirac (standard) representation:
//   gamma^0 = diag(I, -I),  gamma^i = [[0, sigma_i], [-sigma_i, 0]],
//   gamma^5 = i gamma^0 gamma^1 gamma^2 gamma^3 = [[0, I], [I, 0]],
//   sigma^{mu nu} = (i/2) [gamma^mu, gamma^nu],
//   Sigma_k = diag(sigma_k, sigma_k).
// Satisfies {gamma^mu, gamma^nu} = 2 g^{mu nu} I exactly (entries are exact).

#include <array>

#include "tphase/core.hpp"
#include "tphase/field_tensor.hpp"
#include "tphase/matrix.hpp"

namespace tphase {

struct GammaBasis {
  Mat4 unit;
  std::array<Mat4, 4> gamma;           // gamma^mu, contravariant index
  Mat4 gamma5;
  Mat4 beta;                           // == gamma^0
  std::array<Mat4, 3> spin;            // Sigma_k = diag(sigma_k, sigma_k)
  std::array<std::array<Mat4, 4>, 4> sigma_uv;  // sigma^{mu nu}

  GammaBasis() {
    unit = Mat4::identity();

    // gamma^0
    gamma[0] = Mat4::zero();
    gamma[0](0, 0) = 1.0;
    gamma[0](1, 1) = 1.0;
    gamma[0](2, 2) = -1.0;
    gamma[0](3, 3) = -1.0;

    // gamma^k from Pauli blocks
    for (int k = 1; k <= 3; ++k) {
      const Mat2 s = sigma(k);
      Mat4 g = Mat4::zero();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          g(i, 2 + j) = s(i, j);
          g(2 + i, j) = -s(i, j);
        }
      gamma[k] = g;
    }

    gamma5 = kImag * (gamma[0] * gamma[1] * gamma[2] * gamma[3]);
    beta = gamma[0];

    for (int k = 0; k < 3; ++k) {
      const Mat2 s = sigma(k + 1);
      Mat4 g = Mat4::zero();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          g(i, j) = s(i, j);
          g(2 + i, 2 + j) = s(i, j);
        }
      spin[k] = g;
    }

    for (int mu = 0; mu < 4; ++mu)
      for (int nu = 0; nu < 4; ++nu)
        sigma_uv[mu][nu] = (kImag * 0.5) * commutator(gamma[mu], gamma[nu]);
  }
};

inline const GammaBasis& gamma_basis() {
  static const GammaBasis basis;
  return basis;
}

// gamma^mu x_mu for covariant components x_mu (no metric applied here).
inline Mat4 gamma_contract_lower(const std::array<double, 4>& x_lower) {
  const GammaBasis& gb = gamma_basis();
  Mat4 r = Mat4::zero();
  for (int mu = 0; mu < 4; ++mu) r = r + x_lower[mu] * gb.gamma[mu];
  return r;
}

// Feynman slash of a contravariant four-vector: gamma^mu v_mu.
inline Mat4 feynman_slash(const FourVector& v) {
  return gamma_contract_lower({v.t, -v.x, -v.y, -v.z});
}

// sigma^{mu nu} F_{mu nu}, summed over all 16 index pairs.
inline Mat4 sigma_field_contraction(const FieldTensor& f) {
  const GammaBasis& gb = gamma_basis();
  Mat4 r = Mat4::zero();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      const double v = f.lower(mu, nu);
      if (v != 0.0) r = r + v * gb.sigma_uv[mu][nu];
    }
  return r;
}

}  // namespace tphase
