#pragma once

// Prescribed electromagnetic environments (Heaviside-Lorentz natural units).
//
// Every configuration is immutable after construction; sampling is pure and
// concurrently callable.  Singular configurations refuse evaluation inside
// an exclusion radius around their axis instead of returning infinities.

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tphase/core.hpp"
#include "tphase/errors.hpp"
#include "tphase/expression.hpp"
#include "tphase/field_tensor.hpp"

namespace tphase {

inline constexpr double kAxisExclusionRadius = 1e-6;

struct FieldSample {
  Vec3 electric{};
  Vec3 magnetic{};
};

inline FieldTensor assemble_field_tensor(const FieldSample& sample) {
  return assemble_field_tensor(sample.electric, sample.magnetic);
}

// A straight line near which sampling is singular; surface integrators
// refuse to place elements closer to it than the exclusion radius.
struct AxisLine {
  Vec3 point{};
  Vec3 direction{0.0, 0.0, 1.0};
  double exclusion = kAxisExclusionRadius;
};

class EmField {
 public:
  virtual ~EmField() = default;
  virtual FieldSample sample(const Event& at) const = 0;

  // Lines on which the configuration is singular (empty for smooth fields).
  virtual std::vector<AxisLine> singular_lines() const { return {}; }

  // Instants where the field is discontinuous or kinked in time; path
  // integrators split quadrature panels there so adaptive refinement never
  // straddles a jump.
  virtual std::vector<double> time_breakpoints() const { return {}; }
};

// ---------------------------------------------------------------------------
// Built-in configurations
// ---------------------------------------------------------------------------

class UniformField final : public EmField {
 public:
  UniformField(Vec3 electric, Vec3 magnetic)
      : sample_{electric, magnetic} {}
  FieldSample sample(const Event&) const override { return sample_; }

 private:
  FieldSample sample_;
};

// Infinite straight filament of uniform linear charge density lambda along
// an arbitrary axis: E = lambda / (2 pi rho) rho_hat, B = 0, where rho is
// the perpendicular distance from the axis.  Queries with rho below the
// exclusion radius throw AxisProximity.
class LineChargeField final : public EmField {
 public:
  LineChargeField(double lambda, Vec3 axis_point, Vec3 axis_direction,
                  double exclusion_radius = kAxisExclusionRadius)
      : lambda_(lambda), point_(axis_point), exclusion_(exclusion_radius) {
    const double len = norm(axis_direction);
    if (!(len > 0.0)) throw Error("line charge axis direction must be nonzero");
    if (!(exclusion_radius > 0.0))
      throw Error("line charge exclusion radius must be positive");
    direction_ = axis_direction / len;
  }

  double lambda() const { return lambda_; }
  Vec3 axis_point() const { return point_; }
  Vec3 axis_direction() const { return direction_; }
  double exclusion_radius() const { return exclusion_; }

  std::vector<AxisLine> singular_lines() const override {
    return {{point_, direction_, exclusion_}};
  }

  FieldSample sample(const Event& at) const override {
    const Vec3 rel = at.r - point_;
    const Vec3 perp = rel - dot(rel, direction_) * direction_;
    const double rho = norm(perp);
    if (rho < exclusion_)
      throw AxisProximity("field query within the exclusion radius of the filament");
    const double scale = lambda_ / (2.0 * std::numbers::pi * rho * rho);
    return {scale * perp, Vec3{}};
  }

 private:
  double lambda_;
  Vec3 point_;
  Vec3 direction_{};
  double exclusion_;
};

// Spatially uniform magnetic pulse B(t) = B0 * envelope(t) with E = 0.
// The default envelope rises and falls with a C^1 cubic smoothstep ramp of
// width ramp_fraction * (t_off - t_on) at each end; ramp_fraction = 0 gives
// a hard square window (value 1 on [t_on, t_off), 0 elsewhere).
class PulsedUniformBField final : public EmField {
 public:
  PulsedUniformBField(Vec3 b0, double t_on, double t_off, double ramp_fraction = 0.05)
      : b0_(b0), t_on_(t_on), t_off_(t_off), ramp_fraction_(ramp_fraction) {
    if (!(t_on < t_off)) throw Error("pulse window requires t_on < t_off");
    if (!(ramp_fraction >= 0.0 && ramp_fraction <= 0.5))
      throw Error("pulse ramp fraction must lie in [0, 0.5]");
    ramp_width_ = ramp_fraction * (t_off - t_on);
  }

  Vec3 amplitude() const { return b0_; }
  double t_on() const { return t_on_; }
  double t_off() const { return t_off_; }
  double ramp_width() const { return ramp_width_; }

  double envelope(double t) const {
    if (ramp_width_ == 0.0) return (t >= t_on_ && t < t_off_) ? 1.0 : 0.0;
    if (t <= t_on_ || t >= t_off_) return 0.0;
    if (t < t_on_ + ramp_width_) return smoothstep((t - t_on_) / ramp_width_);
    if (t > t_off_ - ramp_width_) return smoothstep((t_off_ - t) / ramp_width_);
    return 1.0;
  }

  // Closed form of integral envelope(t) dt over the whole pulse: each cubic
  // ramp contributes half its width, so smooth pulses integrate to
  // (t_off - t_on) - ramp_width and hard pulses to (t_off - t_on).
  double integrated_envelope() const { return t_off_ - t_on_ - ramp_width_; }

  std::vector<double> time_breakpoints() const override {
    if (ramp_width_ == 0.0) return {t_on_, t_off_};
    return {t_on_, t_on_ + ramp_width_, t_off_ - ramp_width_, t_off_};
  }

  FieldSample sample(const Event& at) const override {
    return {Vec3{}, envelope(at.t) * b0_};
  }

 private:
  static double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }

  Vec3 b0_;
  double t_on_, t_off_, ramp_fraction_, ramp_width_;
};

// Field with each Cartesian component given by an expression in
// {t, x, y, z, rho, phi}; empty source strings mean identically zero.
struct ExpressionFieldSources {
  std::string ex, ey, ez, bx, by, bz;
};

class ExpressionField final : public EmField {
 public:
  explicit ExpressionField(const ExpressionFieldSources& sources) {
    const std::string* src[6] = {&sources.ex, &sources.ey, &sources.ez,
                                 &sources.bx, &sources.by, &sources.bz};
    for (int i = 0; i < 6; ++i)
      if (!src[i]->empty()) components_[i] = Expression::parse(*src[i]);
  }

  FieldSample sample(const Event& at) const override {
    FieldSample s;
    for (int i = 0; i < 3; ++i) s.electric[i] = components_[i](at);
    for (int i = 0; i < 3; ++i) s.magnetic[i] = components_[3 + i](at);
    return s;
  }

 private:
  Expression components_[6];  // default-constructed: literal zero
};

}  // namespace tphase
