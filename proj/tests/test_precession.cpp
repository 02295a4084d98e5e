#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <numbers>

#include "tphase/fields.hpp"
#include "tphase/matrix.hpp"
#include "tphase/precession.hpp"

using namespace tphase;

namespace {

// Exact Bloch vector under a constant drive field: conjugate the Pauli
// matrices with the closed-form propagator exp(i mu t sigma . B) and take
// expectations in the initial state.
Vec3 bloch_oracle(double moment, Vec3 b, Vec3 sigma0, double t) {
  const double bn = norm(b);
  const Mat2 u =
      bn == 0.0 ? Mat2::identity() : pauli_rotation(moment * t * bn, (1.0 / bn) * b);
  const Mat2 ud = adjoint(u);
  const Mat2 rho0 = 0.5 * Mat2::identity() + 0.5 * sigma_dot(sigma0);
  Vec3 out;
  out.x = trace(rho0 * (ud * sigma(1) * u)).real();
  out.y = trace(rho0 * (ud * sigma(2) * u)).real();
  out.z = trace(rho0 * (ud * sigma(3) * u)).real();
  return out;
}

double max_component_error(const Vec3& a, const Vec3& b) {
  return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

}  // namespace

TEST_CASE("axial applied field rotates the spin at twice the coupling rate") {
  const double mu = 1.0;
  const double b0 = std::numbers::pi / 2.0;  // mu*b0 = pi/2, so half a turn by t = 1
  AppliedFieldDriver driver(mu, [b0](double) { return Vec3{0, 0, b0}; });

  PrecessionOptions opt;
  opt.dt = 1e-3;
  opt.steps = 1000;
  opt.record_every = 100;
  const auto traj = precess({0.0, Vec3{1, 0, 0}}, driver, opt);

  REQUIRE(traj.size() == 11);
  for (const SpinState& s : traj) {
    const Vec3 exact = bloch_oracle(mu, Vec3{0, 0, b0}, Vec3{1, 0, 0}, s.time);
    CHECK(max_component_error(s.sigma, exact) < 1e-8);
  }
  CHECK(traj.back().time == Catch::Approx(1.0).margin(1e-12));
  CHECK(traj.back().sigma.x == Catch::Approx(-1.0).margin(1e-8));
  CHECK(std::abs(traj.back().sigma.y) < 1e-8);

  // The same drive expressed as an EM configuration sampled at a point.
  auto field = std::make_shared<UniformField>(Vec3{}, Vec3{0, 0, b0});
  AppliedFieldDriver from_field(mu, field, Vec3{4.0, -1.0, 2.5});
  const auto traj2 = precess({0.0, Vec3{1, 0, 0}}, from_field, opt);
  REQUIRE(traj2.size() == traj.size());
  CHECK(max_component_error(traj2.back().sigma, traj.back().sigma) < 1e-15);
}

TEST_CASE("off-axis constant drive follows the exact rotation") {
  const double mu = 0.6;
  const Vec3 b = 0.9 * normalized(Vec3{1.0, 2.0, -2.0});
  AppliedFieldDriver driver(mu, [b](double) { return b; });

  PrecessionOptions opt;
  opt.dt = 2e-3;
  opt.steps = 2000;
  opt.record_every = 250;
  const Vec3 s0{1, 0, 0};
  const auto traj = precess({0.0, s0}, driver, opt);
  for (const SpinState& s : traj) {
    CHECK(max_component_error(s.sigma, bloch_oracle(mu, b, s0, s.time)) < 1e-8);
  }
}

TEST_CASE("norm is conserved over a hundred thousand steps") {
  AppliedFieldDriver driver(0.9, [](double t) {
    return Vec3{0.4 * std::sin(t), 0.3 * std::cos(2.0 * t), 0.5 + 0.2 * std::sin(0.5 * t)};
  });
  PrecessionOptions opt;
  opt.dt = 1e-3;
  opt.steps = 100000;
  opt.record_every = 5000;
  const auto traj = precess({0.0, normalized(Vec3{0.2, -0.5, 0.8})}, driver, opt);
  REQUIRE(traj.size() == 21);
  double worst = 0.0;
  for (const SpinState& s : traj) worst = std::max(worst, std::abs(norm(s.sigma) - 1.0));
  CHECK(worst < 1e-8);
}

TEST_CASE("zero effective drive leaves the spin bitwise constant") {
  EffectiveFieldDriver driver(
      0.8, [](double) { return Vec3{}; }, [](double) { return Vec3{}; }, Vec3{0.3, 0.1, 0.0});
  const Vec3 s0{0.36, -0.48, 0.8};
  const auto traj = precess({1.5, s0}, driver, {0.01, 400, 50});
  for (const SpinState& s : traj) {
    CHECK(s.sigma.x == s0.x);
    CHECK(s.sigma.y == s0.y);
    CHECK(s.sigma.z == s0.z);
  }
}

TEST_CASE("field parallel to the spin produces no motion") {
  const Vec3 n = normalized(Vec3{0.3, -0.4, 0.866025403784438647});
  AppliedFieldDriver driver(1.1, [n](double) { return 1.7 * n; });
  const auto traj = precess({0.0, n}, driver, {1e-3, 1000, 100});
  for (const SpinState& s : traj) CHECK(max_component_error(s.sigma, n) < 1e-14);
}

TEST_CASE("certified line-charge configuration gives a constant trajectory") {
  auto field = std::make_shared<LineChargeField>(2.0, Vec3{}, Vec3{0, 0, 1});
  PolarizedParticle particle;
  particle.moment = 0.5;
  particle.polarization = {0, 0, 1};
  EffectiveFieldDriver driver(particle, field, Vec3{2.0, 0.0, 0.3}, Vec3{-0.3, 0.4, 0.1});

  const Vec3 s0 = normalized(Vec3{0.6, 0.0, 0.8});
  const auto traj = precess({0.0, s0}, driver, {1e-3, 1000, 100});
  for (const SpinState& s : traj) CHECK(max_component_error(s.sigma, s0) < 1e-10);
}

TEST_CASE("effective drive includes the motional electric term") {
  // B = (1 + 0.2 x) zhat with zhat polarization: the potential scalar is
  // 1 + 0.2 x, its gradient drives the spin through the cross product with
  // the velocity: drive = (-0.2, 0, 0) x (0, 0.5, 0) = (0, 0, -0.1).
  ExpressionFieldSources src;
  src.bz = "1 + 0.2*x";
  auto field = std::make_shared<ExpressionField>(src);
  PolarizedParticle particle;
  particle.moment = 0.8;
  particle.polarization = {0, 0, 1};
  const Vec3 v{0.0, 0.5, 0.0};
  EffectiveFieldDriver driver(particle, field, Vec3{}, v);

  CHECK(max_component_error(driver.drive_field(0.7), Vec3{0, 0, -0.1}) < 1e-9);

  PrecessionOptions opt;
  opt.dt = 2e-3;
  opt.steps = 1000;
  opt.record_every = 200;
  const Vec3 s0{1, 0, 0};
  const auto traj = precess({0.0, s0}, driver, opt);
  for (const SpinState& s : traj) {
    CHECK(max_component_error(s.sigma, bloch_oracle(0.8, Vec3{0, 0, -0.1}, s0, s.time)) < 1e-8);
  }
}

TEST_CASE("precession validates drivers and options") {
  AppliedFieldDriver ok(1.0, [](double) { return Vec3{0, 0, 1}; });
  CHECK_THROWS_AS(precess({0.0, Vec3{1, 0, 0}}, ok, {0.0, 10, 1}), Error);
  CHECK_THROWS_AS(precess({0.0, Vec3{1, 0, 0}}, ok, {0.1, 0, 1}), Error);
  CHECK_THROWS_AS(precess({0.0, Vec3{1, 0, 0}}, ok, {0.1, 10, 0}), Error);
  CHECK_THROWS_AS(AppliedFieldDriver(1.0, std::function<Vec3(double)>{}), Error);
  CHECK_THROWS_AS(AppliedFieldDriver(1.0, nullptr, Vec3{}), Error);
  CHECK_THROWS_AS(EffectiveFieldDriver(1.0, nullptr, [](double) { return Vec3{}; }, Vec3{}),
                  Error);
  PolarizedParticle particle;
  CHECK_THROWS_AS(EffectiveFieldDriver(particle, nullptr, Vec3{}, Vec3{}), Error);
}

TEST_CASE("trajectory recording keeps the stride and the endpoint") {
  EffectiveFieldDriver driver(
      1.0, [](double) { return Vec3{}; }, [](double) { return Vec3{}; }, Vec3{});
  const auto traj = precess({0.7, Vec3{0, 0, 1}}, driver, {0.1, 25, 10});
  REQUIRE(traj.size() == 4);
  CHECK(traj[0].time == Catch::Approx(0.7).margin(1e-12));
  CHECK(traj[1].time == Catch::Approx(1.7).margin(1e-12));
  CHECK(traj[2].time == Catch::Approx(2.7).margin(1e-12));
  CHECK(traj[3].time == Catch::Approx(3.2).margin(1e-12));
}
