#pragma once

// Foldy-Wouthuysen grid Hamiltonian for a neutral spin-1/2 particle with
// anomalous moment mu, expressed through the effective potentials: covariant
// kinetic term (discrete derivative - i mu A)^2 / 2m via unitary link phases,
// scalar coupling mu A0, Zeeman coupling to the effective magnetic field,
// a symmetrized spin-orbit coupling to the effective electric field, and the
// scalar Darwin-like divergence term. Rest mass is dropped.

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "core.hpp"
#include "effective_gauge.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "matrix.hpp"
#include "spinor.hpp"
#include "spinor_grid.hpp"

namespace tphase {

enum class FwTerm { kinetic, scalar_potential, zeeman, spin_orbit, darwin };

inline constexpr std::array<FwTerm, 5> kFwTerms = {FwTerm::kinetic, FwTerm::scalar_potential,
                                                   FwTerm::zeeman, FwTerm::spin_orbit,
                                                   FwTerm::darwin};

// Finite-difference steps used when sampling the couplings. First derivatives
// (effective fields) use derivative_step; the Laplacian of the scalar
// potential (divergence of the effective electric field) uses the larger
// laplacian_step to keep second-difference roundoff in check.
struct FwBuildOptions {
  double derivative_step = 1e-5;
  double laplacian_step = 1e-3;
};

// Per-node sampled couplings plus the derived kinetic link phases. Storage is
// row-major over nodes (j * nx + i); spinor amplitudes pair with amp layout
// in SpinorGrid. After editing any coefficient array, call finalize() to
// refresh the link phases and term activity flags.
struct HamiltonianTerms {
  GridGeometry geom;
  double mass = 1.0;
  double moment = 1.0;
  double time = 0.0;

  std::vector<double> a0;     // effective scalar potential
  std::vector<Vec3> a;        // effective vector potential
  std::vector<Vec3> b_eff;    // effective magnetic field
  std::vector<Vec3> e_eff;    // effective electric field
  std::vector<double> div_e;  // divergence of the effective electric field

  // exp(i mu h * mean vector-potential component) along +x / +y links.
  std::vector<cplx> link_x, link_y;
  std::array<bool, 5> active_terms{true, false, false, false, false};

  void resize_coefficients() {
    const std::size_t n = geom.nodes();
    a0.assign(n, 0.0);
    a.assign(n, Vec3{});
    b_eff.assign(n, Vec3{});
    e_eff.assign(n, Vec3{});
    div_e.assign(n, 0.0);
    link_x.assign(n, cplx{1.0, 0.0});
    link_y.assign(n, cplx{1.0, 0.0});
  }

  bool active(FwTerm t) const { return active_terms[static_cast<int>(t)]; }

  void finalize() {
    geom.validate();
    if (!(mass > 0.0)) throw Error("particle mass must be positive");
    const std::size_t n = geom.nodes();
    if (a0.size() != n || a.size() != n || b_eff.size() != n || e_eff.size() != n ||
        div_e.size() != n) {
      throw Error("coefficient arrays must have one entry per grid node");
    }
    link_x.assign(n, cplx{1.0, 0.0});
    link_y.assign(n, cplx{1.0, 0.0});
    const double hm = moment * geom.spacing;
    for (int j = 0; j < geom.ny; ++j) {
      for (int i = 0; i < geom.nx; ++i) {
        const std::size_t k = geom.index(i, j);
        // Forward-hop parallel transporter for the (p - mu*a)^2 kinetic
        // term: exp(-i*mu*integral of a along the bond), trapezoid rule.
        if (i + 1 < geom.nx) {
          link_x[k] = std::exp(-kImag * (0.5 * hm * (a[k].x + a[geom.index(i + 1, j)].x)));
        }
        if (j + 1 < geom.ny) {
          link_y[k] = std::exp(-kImag * (0.5 * hm * (a[k].y + a[geom.index(i, j + 1)].y)));
        }
      }
    }
    auto any_nonzero_v = [](const std::vector<Vec3>& v) {
      for (const Vec3& u : v)
        if (u.x != 0.0 || u.y != 0.0 || u.z != 0.0) return true;
      return false;
    };
    auto any_nonzero_s = [](const std::vector<double>& v) {
      for (double u : v)
        if (u != 0.0) return true;
      return false;
    };
    active_terms[static_cast<int>(FwTerm::kinetic)] = true;
    active_terms[static_cast<int>(FwTerm::scalar_potential)] = any_nonzero_s(a0);
    active_terms[static_cast<int>(FwTerm::zeeman)] = any_nonzero_v(b_eff);
    active_terms[static_cast<int>(FwTerm::spin_orbit)] = any_nonzero_v(e_eff);
    active_terms[static_cast<int>(FwTerm::darwin)] = any_nonzero_s(div_e);
  }

  // out += (term) in. Boundaries are hard walls (the state vanishes outside).
  void apply_add(FwTerm term, const std::vector<cplx>& in, std::vector<cplx>& out) const {
    const std::size_t dim = 2 * geom.nodes();
    if (in.size() != dim || out.size() != dim) throw Error("state size does not match the grid");
    const int nx = geom.nx, ny = geom.ny;
    const double h = geom.spacing;
    switch (term) {
      case FwTerm::kinetic: {
        const double kin = 1.0 / (2.0 * mass * h * h);
        const double zsq = moment * moment / (2.0 * mass);
        for (int j = 0; j < ny; ++j) {
          for (int i = 0; i < nx; ++i) {
            const std::size_t n = geom.index(i, j);
            const double diag_z = zsq * a[n].z * a[n].z;
            for (int c = 0; c < 2; ++c) {
              cplx acc = 4.0 * in[2 * n + c];
              if (i + 1 < nx) acc -= link_x[n] * in[2 * (n + 1) + c];
              if (i > 0) acc -= std::conj(link_x[n - 1]) * in[2 * (n - 1) + c];
              if (j + 1 < ny) acc -= link_y[n] * in[2 * (n + nx) + c];
              if (j > 0) acc -= std::conj(link_y[n - nx]) * in[2 * (n - nx) + c];
              out[2 * n + c] += kin * acc + diag_z * in[2 * n + c];
            }
          }
        }
        break;
      }
      case FwTerm::scalar_potential: {
        for (std::size_t n = 0; n < geom.nodes(); ++n) {
          const double v = moment * a0[n];
          out[2 * n] += v * in[2 * n];
          out[2 * n + 1] += v * in[2 * n + 1];
        }
        break;
      }
      case FwTerm::zeeman: {
        const double pref = -moment / (2.0 * mass);
        for (std::size_t n = 0; n < geom.nodes(); ++n) {
          const Vec3 b = b_eff[n];
          const cplx up = in[2 * n], dn = in[2 * n + 1];
          out[2 * n] += pref * (b.z * up + cplx{b.x, -b.y} * dn);
          out[2 * n + 1] += pref * (cplx{b.x, b.y} * up - b.z * dn);
        }
        break;
      }
      case FwTerm::spin_orbit: {
        // -(mu/8m^2) [sigma.(E x p) + h.c.] as neighbor couplings
        // i*pref*(M_d(n) + M_d(n+-e_d)) with M_d = sigma.(E x e_d); Hermitian
        // by construction and equal in the continuum to the operator pair
        // -(mu/4m^2) sigma.(E x p) - (i mu/8m^2) sigma.(curl E).
        const double pref = moment / (16.0 * mass * mass * h);
        auto m_of = [&](const Vec3& e, int dir) -> Vec3 {
          return dir == 0 ? Vec3{0.0, e.z, -e.y} : Vec3{-e.z, 0.0, e.x};
        };
        auto add_pair = [&](std::size_t n, std::size_t nb, int dir, double sign,
                            const std::vector<cplx>& src, std::vector<cplx>& dst) {
          const Vec3 m = m_of(e_eff[n], dir) + m_of(e_eff[nb], dir);
          const cplx f = kImag * (pref * sign);
          const cplx up = src[2 * nb], dn = src[2 * nb + 1];
          dst[2 * n] += f * (m.z * up + cplx{m.x, -m.y} * dn);
          dst[2 * n + 1] += f * (cplx{m.x, m.y} * up - m.z * dn);
        };
        for (int j = 0; j < ny; ++j) {
          for (int i = 0; i < nx; ++i) {
            const std::size_t n = geom.index(i, j);
            if (i + 1 < nx) add_pair(n, n + 1, 0, 1.0, in, out);
            if (i > 0) add_pair(n, n - 1, 0, -1.0, in, out);
            if (j + 1 < ny) add_pair(n, n + nx, 1, 1.0, in, out);
            if (j > 0) add_pair(n, n - nx, 1, -1.0, in, out);
          }
        }
        break;
      }
      case FwTerm::darwin: {
        const double pref = -moment / (8.0 * mass * mass);
        for (std::size_t n = 0; n < geom.nodes(); ++n) {
          const double v = pref * div_e[n];
          out[2 * n] += v * in[2 * n];
          out[2 * n + 1] += v * in[2 * n + 1];
        }
        break;
      }
    }
  }

  void apply_term(FwTerm term, const std::vector<cplx>& in, std::vector<cplx>& out) const {
    out.assign(in.size(), cplx{});
    apply_add(term, in, out);
  }

  // out = H in, summing the active terms.
  void apply(const std::vector<cplx>& in, std::vector<cplx>& out) const {
    out.assign(in.size(), cplx{});
    for (FwTerm t : kFwTerms) {
      if (active(t)) apply_add(t, in, out);
    }
  }

  // Real diagonal of H per (node, component), for preconditioning.
  std::vector<double> diagonal() const {
    const std::size_t nn = geom.nodes();
    std::vector<double> d(2 * nn, 0.0);
    const double kin = 2.0 / (mass * geom.spacing * geom.spacing);
    const double zsq = moment * moment / (2.0 * mass);
    const double zee = -moment / (2.0 * mass);
    const double dar = -moment / (8.0 * mass * mass);
    for (std::size_t n = 0; n < nn; ++n) {
      double base = kin + zsq * a[n].z * a[n].z;
      if (active(FwTerm::scalar_potential)) base += moment * a0[n];
      if (active(FwTerm::darwin)) base += dar * div_e[n];
      double split = active(FwTerm::zeeman) ? zee * b_eff[n].z : 0.0;
      d[2 * n] = base + split;
      d[2 * n + 1] = base - split;
    }
    return d;
  }

  // Largest per-node magnitude of the sampled coupling terms. This is the
  // scale the time-step accuracy guard compares against; the kinetic spectrum
  // is excluded because the Crank-Nicolson propagator is unconditionally
  // stable and its accuracy there is governed by the state the caller builds.
  double max_field_energy() const {
    double worst = 0.0;
    const double pi_over_h = std::numbers::pi / geom.spacing;
    for (std::size_t n = 0; n < geom.nodes(); ++n) {
      double e = std::abs(moment * a0[n]);
      e += 0.5 * std::abs(moment) * norm(b_eff[n]) / mass;
      e += moment * moment * dot(a[n], a[n]) / (2.0 * mass);
      e += 0.25 * std::abs(moment) * norm(e_eff[n]) * pi_over_h / (mass * mass);
      e += 0.125 * std::abs(moment) * std::abs(div_e[n]) / (mass * mass);
      worst = std::max(worst, e);
    }
    return worst;
  }
};

// Samples every coupling of the effective-potential Hamiltonian at the grid
// nodes at the given time, using the rest-frame spin direction of the
// particle. Field singularities inside the grid propagate as AxisProximity.
inline HamiltonianTerms build_fw_hamiltonian(std::shared_ptr<const EmField> field,
                                             const PolarizedParticle& particle,
                                             const GridGeometry& geom, double time = 0.0,
                                             const FwBuildOptions& opt = {}) {
  particle.validate();
  geom.validate();
  if (!(opt.derivative_step > 0.0) || !(opt.laplacian_step > 0.0)) {
    throw Error("finite-difference steps must be positive");
  }
  const EffectivePotential pot(std::move(field), particle, SpinModel::rest);
  HamiltonianTerms H;
  H.geom = geom;
  H.mass = particle.mass;
  H.moment = particle.moment;
  H.time = time;
  H.resize_coefficients();
  const double hl = opt.laplacian_step;
  for (int j = 0; j < geom.ny; ++j) {
    for (int i = 0; i < geom.nx; ++i) {
      const std::size_t n = geom.index(i, j);
      const Event ev{time, geom.position(i, j)};
      const PotentialValue v = pot(ev);
      H.a0[n] = v.scalar;
      H.a[n] = v.vector;
      H.b_eff[n] = pot.b_identity(ev, opt.derivative_step);
      H.e_eff[n] = pot.e_identity(ev, opt.derivative_step);
      double lap = 0.0;
      for (int axis = 0; axis < 3; ++axis) {
        Vec3 step{};
        (axis == 0 ? step.x : axis == 1 ? step.y : step.z) = hl;
        const double plus = pot({ev.t, ev.r + step}).scalar;
        const double minus = pot({ev.t, ev.r - step}).scalar;
        lap += (plus - 2.0 * v.scalar + minus) / (hl * hl);
      }
      H.div_e[n] = -lap;
    }
  }
  H.finalize();
  return H;
}

// Dense (2 nodes)^2 matrix of a term or of the full Hamiltonian, row-major.
// Intended for small diagnostic grids; refuses anything above 32x32 nodes.
namespace detail {

template <typename ApplyFn>
std::vector<cplx> assemble_dense(std::size_t dim, ApplyFn&& apply_fn) {
  std::vector<cplx> out(dim * dim);
  std::vector<cplx> basis(dim, cplx{}), column(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    basis[c] = 1.0;
    apply_fn(basis, column);
    for (std::size_t r = 0; r < dim; ++r) out[r * dim + c] = column[r];
    basis[c] = 0.0;
  }
  return out;
}

inline void check_dense_size(const HamiltonianTerms& H) {
  if (H.geom.nodes() > 1024) {
    throw Error("dense assembly is limited to diagnostic grids of at most 1024 nodes");
  }
}

}  // namespace detail

inline std::vector<cplx> dense_matrix(const HamiltonianTerms& H) {
  detail::check_dense_size(H);
  return detail::assemble_dense(2 * H.geom.nodes(),
                                [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
                                  H.apply(x, y);
                                });
}

inline std::vector<cplx> dense_matrix(const HamiltonianTerms& H, FwTerm term) {
  detail::check_dense_size(H);
  return detail::assemble_dense(2 * H.geom.nodes(),
                                [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
                                  H.apply_term(term, x, y);
                                });
}

// max_{rc} |M[r][c] - conj(M[c][r])| for a row-major square matrix.
inline double hermiticity_defect(const std::vector<cplx>& m, std::size_t dim) {
  if (m.size() != dim * dim) throw Error("matrix size does not match the declared dimension");
  double worst = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r; c < dim; ++c) {
      worst = std::max(worst, std::abs(m[r * dim + c] - std::conj(m[c * dim + r])));
    }
  }
  return worst;
}

}  // namespace tphase
