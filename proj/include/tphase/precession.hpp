#pragma once

// Bloch-vector spin precession under the two candidate torque laws.
//
// The applied-field form drives the spin with the lab magnetic field,
//   sigma' = 2 mu sigma x B(t),
// while the effective-field form uses the fields derived from the effective
// potential pair along a straight worldline x(t) = start + v t,
//   sigma' = 2 mu sigma x (B_eff(t) + E_eff(t) x v).
// Both are integrated with classic fourth-order Runge-Kutta.  In a
// configuration that passes the topological-phase conditions the effective
// drive vanishes identically and the trajectory is constant.

#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "tphase/core.hpp"
#include "tphase/effective_gauge.hpp"
#include "tphase/errors.hpp"
#include "tphase/fields.hpp"

namespace tphase {

struct SpinState {
  double time = 0.0;
  Vec3 sigma{};  // Bloch vector <sigma>
};

// Torque from the lab magnetic field: sigma' = 2 mu sigma x B(t).  The field
// is either an explicit function of time or an EM configuration sampled at a
// fixed position.
class AppliedFieldDriver {
 public:
  AppliedFieldDriver(double moment, std::function<Vec3(double)> b_of_t)
      : moment_(moment), b_(std::move(b_of_t)) {
    if (!b_) throw Error("applied-field driver needs a field function");
  }

  AppliedFieldDriver(double moment, std::shared_ptr<const EmField> field, Vec3 position)
      : moment_(moment) {
    if (!field) throw Error("applied-field driver needs a field");
    b_ = [field = std::move(field), position](double t) {
      return field->sample({t, position}).magnetic;
    };
  }

  double moment() const { return moment_; }
  // The field entering the torque (and the propagator Hamiltonian
  // H = -mu sigma . drive_field).
  Vec3 drive_field(double t) const { return b_(t); }
  Vec3 rate(double t, const Vec3& sigma) const {
    return 2.0 * moment_ * cross(sigma, b_(t));
  }

 private:
  double moment_ = 0.0;
  std::function<Vec3(double)> b_;
};

// Torque from the effective fields seen along a straight worldline:
// sigma' = 2 mu sigma x (B_eff(t) + E_eff(t) x v).
class EffectiveFieldDriver {
 public:
  EffectiveFieldDriver(double moment, std::function<Vec3(double)> b_eff,
                       std::function<Vec3(double)> e_eff, Vec3 velocity)
      : moment_(moment), velocity_(velocity), b_(std::move(b_eff)), e_(std::move(e_eff)) {
    if (!b_ || !e_) throw Error("effective-field driver needs both field functions");
  }

  // Samples the effective-field identities of the potential pair built from
  // the particle's rest-frame polarization, along x(t) = start + v t.  The
  // finite-difference step defaults below the general-purpose one because
  // truncation noise in the sampled fields acts as a tiny coherent torque
  // over long integrations.
  EffectiveFieldDriver(const PolarizedParticle& particle, std::shared_ptr<const EmField> field,
                       Vec3 start, Vec3 velocity, double fd_step = 1e-5)
      : moment_(particle.moment), velocity_(velocity) {
    if (!field) throw Error("effective-field driver needs a field");
    auto pot = std::make_shared<EffectivePotential>(std::move(field), particle, SpinModel::rest);
    b_ = [pot, start, velocity, fd_step](double t) {
      return pot->b_identity({t, start + t * velocity}, fd_step);
    };
    e_ = [pot, start, velocity, fd_step](double t) {
      return pot->e_identity({t, start + t * velocity}, fd_step);
    };
  }

  double moment() const { return moment_; }
  Vec3 velocity() const { return velocity_; }
  Vec3 drive_field(double t) const { return b_(t) + cross(e_(t), velocity_); }
  Vec3 rate(double t, const Vec3& sigma) const {
    return 2.0 * moment_ * cross(sigma, drive_field(t));
  }

 private:
  double moment_ = 0.0;
  Vec3 velocity_{};
  std::function<Vec3(double)> b_, e_;
};

struct PrecessionOptions {
  double dt = 1e-3;
  int steps = 1000;
  int record_every = 1;  // keep every k-th state; the final state is always kept
};

// Fourth-order Runge-Kutta trajectory of the Bloch vector, starting from and
// including the initial state.
template <typename Driver>
std::vector<SpinState> precess(const SpinState& initial, const Driver& driver,
                               const PrecessionOptions& opt = {}) {
  if (!(opt.dt > 0.0)) throw Error("precession needs a positive time step");
  if (opt.steps < 1) throw Error("precession needs at least one step");
  if (opt.record_every < 1) throw Error("precession recording stride must be positive");

  std::vector<SpinState> traj;
  traj.reserve(static_cast<std::size_t>(opt.steps / opt.record_every) + 2);
  traj.push_back(initial);
  Vec3 s = initial.sigma;
  for (int k = 1; k <= opt.steps; ++k) {
    const double t = initial.time + (k - 1) * opt.dt;
    const double h = opt.dt;
    const Vec3 k1 = driver.rate(t, s);
    const Vec3 k2 = driver.rate(t + 0.5 * h, s + 0.5 * h * k1);
    const Vec3 k3 = driver.rate(t + 0.5 * h, s + 0.5 * h * k2);
    const Vec3 k4 = driver.rate(t + h, s + h * k3);
    s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (k % opt.record_every == 0 || k == opt.steps) {
      traj.push_back({initial.time + k * opt.dt, s});
    }
  }
  return traj;
}

}  // namespace tphase
