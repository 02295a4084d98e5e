#pragma once

// The spin-dependent effective gauge structure seen by a neutral particle
// with an anomalous magnetic moment.
//
// The covariant components are the epsilon contraction
//   c_alpha = -1/2 eps_{alpha beta mu nu} s^beta F^{mu nu},
// routed through the central Levi-Civita definitions (via the spinor-layer
// contraction helper).  The exposed potential pair is its negation,
//   a0 = -c_0 = s_vec . B,        a_vec = -c_i = s_vec x E - s0 B,
// which at rest reduces to a0 = shat . B and a_vec = shat x E.  Effective
// fields come in two independently computed forms (a closed-form identity
// using derivatives of E and B, and direct numeric curl/gradient of the
// contraction) whose agreement is a library invariant.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tphase/core.hpp"
#include "tphase/differential.hpp"
#include "tphase/errors.hpp"
#include "tphase/field_tensor.hpp"
#include "tphase/fields.hpp"
#include "tphase/spinor.hpp"

namespace tphase {

// Exposed potential pair (a0, a_vec); the interaction Hamiltonian contains
// +mu a0 and minimal coupling p -> p - mu a_vec, and the accumulated phase is
// phi = mu * integral(a_vec . dr - a0 dt).
struct PotentialValue {
  double scalar = 0.0;
  Vec3 vector{};
};

inline PotentialValue potential_from_covariant(const std::array<double, 4>& c) {
  return {-c[0], {-c[1], -c[2], -c[3]}};
}

inline std::array<double, 4> covariant_from_potential(const PotentialValue& p) {
  return {-p.scalar, -p.vector.x, -p.vector.y, -p.vector.z};
}

// Closed form of the same contraction, bypassing the epsilon machinery.
inline PotentialValue closed_form_potential(const FourVector& spin, const FieldSample& f) {
  const Vec3 sv = spin.spatial();
  return {dot(sv, f.magnetic), cross(sv, f.electric) - spin.t * f.magnetic};
}

// Which spin four-vector enters the contraction: the rest-frame limit
// (0, shat) or the boosted four-spin of the particle state.
enum class SpinModel { rest, boosted };

inline FourVector spin_for_model(const PolarizedParticle& particle, SpinModel model) {
  particle.validate();
  if (model == SpinModel::rest) {
    const Vec3 n = particle.polarization;
    return {0.0, n.x, n.y, n.z};
  }
  return four_spin(particle);
}

class EffectivePotential {
 public:
  EffectivePotential(std::shared_ptr<const EmField> field, FourVector spin)
      : field_(std::move(field)), spin_(spin) {
    if (!field_) throw Error("effective potential needs a field");
  }

  EffectivePotential(std::shared_ptr<const EmField> field, const PolarizedParticle& particle,
                     SpinModel model = SpinModel::boosted)
      : EffectivePotential(std::move(field), spin_for_model(particle, model)) {}

  const FourVector& spin() const { return spin_; }
  const EmField& field() const { return *field_; }
  std::shared_ptr<const EmField> field_ptr() const { return field_; }

  // Closed-form potential pair.
  PotentialValue operator()(const Event& at) const {
    return closed_form_potential(spin_, field_->sample(at));
  }

  // Covariant components c_alpha = -1/2 epsilon_{alpha beta mu nu} s^beta
  // F^{mu nu} through the brute-force epsilon contraction.
  std::array<double, 4> covariant(const Event& at) const {
    auto c = epsilon_spin_field_contraction(spin_, assemble_field_tensor(field_->sample(at)));
    for (double& v : c) v *= -0.5;
    return c;
  }

  // Potential pair recovered from the contraction (independent route).
  PotentialValue from_contraction(const Event& at) const {
    return potential_from_covariant(covariant(at));
  }

  // Effective magnetic field, identity form: for constant spin,
  // curl(a_vec) = s_vec (div E) - (s_vec . grad) E - s0 curl B.  The
  // directional derivative uses a two-point stencil along s_vec directly.
  Vec3 b_identity(const Event& at, double h = kFdStep) const {
    auto efn = [this](const Event& e) { return field_->sample(e).electric; };
    auto bfn = [this](const Event& e) { return field_->sample(e).magnetic; };
    const Vec3 sv = spin_.spatial();
    const Vec3 along =
        (field_->sample({at.t, at.r + h * sv}).electric -
         field_->sample({at.t, at.r - h * sv}).electric) /
        (2.0 * h);
    return fd_divergence(efn, at, h) * sv - along - spin_.t * fd_curl(bfn, at, h);
  }

  // Effective magnetic field, direct form: numeric curl of the potential
  // recovered from the contraction.
  Vec3 b_direct(const Event& at, double h = kFdStep) const {
    auto afn = [this](const Event& e) { return from_contraction(e).vector; };
    return fd_curl(afn, at, h);
  }

  // Effective electric field, identity form: -grad(s_vec . B).
  Vec3 e_identity(const Event& at, double h = kFdStep) const {
    const Vec3 sv = spin_.spatial();
    auto sb = [this, sv](const Event& e) { return dot(sv, field_->sample(e).magnetic); };
    return -fd_gradient(sb, at, h);
  }

  // Effective electric field, direct form: -grad of the contraction scalar.
  Vec3 e_direct(const Event& at, double h = kFdStep) const {
    auto a0 = [this](const Event& e) { return from_contraction(e).scalar; };
    return -fd_gradient(a0, at, h);
  }

  // Effective field-strength tensor F_{alpha beta} = d_alpha c_beta -
  // d_beta c_alpha by central differences in (t, x, y, z); antisymmetric by
  // construction (the lower triangle mirrors the upper).
  std::array<std::array<double, 4>, 4> field_strength(const Event& at, double h = kFdStep) const {
    std::array<std::array<double, 4>, 4> dc{};
    for (int alpha = 0; alpha < 4; ++alpha) {
      const auto plus = covariant(detail::shifted(at, alpha, h));
      const auto minus = covariant(detail::shifted(at, alpha, -h));
      for (int beta = 0; beta < 4; ++beta)
        dc[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(beta)] =
            (plus[static_cast<std::size_t>(beta)] - minus[static_cast<std::size_t>(beta)]) /
            (2.0 * h);
    }
    std::array<std::array<double, 4>, 4> f{};
    for (int alpha = 0; alpha < 4; ++alpha)
      for (int beta = alpha + 1; beta < 4; ++beta) {
        const double v = dc[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(beta)] -
                         dc[static_cast<std::size_t>(beta)][static_cast<std::size_t>(alpha)];
        f[static_cast<std::size_t>(alpha)][static_cast<std::size_t>(beta)] = v;
        f[static_cast<std::size_t>(beta)][static_cast<std::size_t>(alpha)] = -v;
      }
    return f;
  }

 private:
  std::shared_ptr<const EmField> field_;
  FourVector spin_;
};

// ---------------------------------------------------------------------------
// Gauge transformations
// ---------------------------------------------------------------------------

using PotentialFn = std::function<PotentialValue(const Event&)>;
using ScalarFn = std::function<double(const Event&)>;

inline PotentialFn potential_fn(EffectivePotential pot) {
  return [pot = std::move(pot)](const Event& at) { return pot(at); };
}

// Applies a0 -> a0 + sign d_t chi, a_vec -> a_vec + sign grad chi
// (equivalently c_alpha -> c_alpha - sign d_alpha chi).  Derivatives of chi
// are taken by central differences with step h.
inline PotentialFn gauge_transform(PotentialFn base, ScalarFn chi, int sign,
                                   double h = kFdStep) {
  if (sign != 1 && sign != -1) throw Error("gauge sign must be +1 or -1");
  if (!base || !chi) throw Error("gauge transform needs a potential and a gauge function");
  return [base = std::move(base), chi = std::move(chi), sign, h](const Event& at) {
    PotentialValue v = base(at);
    v.scalar += sign * fd_partial(chi, at, 0, h);
    v.vector += static_cast<double>(sign) * fd_gradient(chi, at, h);
    return v;
  };
}

// ---------------------------------------------------------------------------
// Topology-protection condition checks
// ---------------------------------------------------------------------------

// Axis-aligned sampling box with an optional cylindrical annulus filter
// around an axis (points with perpendicular distance outside
// [rho_min, rho_max] are skipped).
struct RegionSpec {
  Vec3 center{};
  Vec3 half_extent{1.0, 1.0, 1.0};
  int samples_per_axis = 32;
  Vec3 axis_point{};
  Vec3 axis_direction{0.0, 0.0, 1.0};
  double rho_min = 0.0;
  double rho_max = std::numeric_limits<double>::infinity();
};

struct ConditionReport {
  std::string condition;
  bool passed = false;
  double worst_value = 0.0;
  Event worst_point{};
  long points_checked = 0;
  double tolerance = 0.0;
};

namespace detail {

template <class F>
ConditionReport scan_region(const RegionSpec& region, double t, double tol, std::string name,
                            F&& violation) {
  if (region.samples_per_axis < 2) throw Error("region scan needs at least two samples per axis");
  const Vec3 dhat = normalized(region.axis_direction);
  ConditionReport rep;
  rep.condition = std::move(name);
  rep.tolerance = tol;
  const int n = region.samples_per_axis;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 frac{-1.0 + 2.0 * i / (n - 1.0), -1.0 + 2.0 * j / (n - 1.0),
                        -1.0 + 2.0 * k / (n - 1.0)};
        const Vec3 p = region.center + Vec3{frac.x * region.half_extent.x,
                                            frac.y * region.half_extent.y,
                                            frac.z * region.half_extent.z};
        const Vec3 rel = p - region.axis_point;
        const double rho = norm(rel - dot(rel, dhat) * dhat);
        if (rho < region.rho_min || rho > region.rho_max) continue;
        const Event ev{t, p};
        const double v = violation(ev);
        ++rep.points_checked;
        if (v > rep.worst_value) {
          rep.worst_value = v;
          rep.worst_point = ev;
        }
      }
  if (rep.points_checked == 0)
    throw Error("region filter excluded every sample point");
  rep.passed = rep.worst_value <= tol;
  return rep;
}

}  // namespace detail

// Conditions for the closed-loop phase to be purely topological with the
// spin held along shat: the electric field must be divergence-free and
// constant along shat throughout the region the loop may be deformed in.
inline std::vector<ConditionReport> check_ac_conditions(const EmField& field, const Vec3& shat,
                                                        const RegionSpec& region, double t = 0.0,
                                                        double tol = 1e-6, double h = kFdStep) {
  if (std::abs(norm(shat) - 1.0) > 1e-10) throw Error("spin direction must be a unit vector");
  auto efn = [&field](const Event& e) { return field.sample(e).electric; };
  auto div_rep = detail::scan_region(
      region, t, tol, "electric divergence vanishes",
      [&](const Event& e) { return std::abs(fd_divergence(efn, e, h)); });
  auto dir_rep = detail::scan_region(
      region, t, tol, "electric field constant along the spin direction",
      [&](const Event& e) { return norm(fd_directional_derivative(efn, e, shat, h)); });
  return {std::move(div_rep), std::move(dir_rep)};
}

// Condition for the time-integrated phase to be independent of position:
// the projection of B on shat must be spatially uniform.
inline ConditionReport check_sab_condition(const EmField& field, const Vec3& shat,
                                           const RegionSpec& region, double t = 0.0,
                                           double tol = 1e-6, double h = kFdStep) {
  if (std::abs(norm(shat) - 1.0) > 1e-10) throw Error("spin direction must be a unit vector");
  auto sb = [&field, shat](const Event& e) { return dot(shat, field.sample(e).magnetic); };
  return detail::scan_region(
      region, t, tol, "spin-projected magnetic field spatially uniform",
      [&](const Event& e) { return norm(fd_gradient(sb, e, h)); });
}

}  // namespace tphase
