#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "tphase/differential.hpp"
#include "tphase/fields.hpp"
#include "tphase/rng.hpp"

using namespace tphase;

namespace {

// E(event) of a configuration as a Vec3 callable for the FD operators.
auto electric_of(const EmField& f) {
  return [&f](const Event& at) { return f.sample(at).electric; };
}
auto magnetic_of(const EmField& f) {
  return [&f](const Event& at) { return f.sample(at).magnetic; };
}

}  // namespace

TEST_CASE("line charge field") {
  SECTION("magnitude and direction on the z axis configuration") {
    const LineChargeField f(4.0 * std::numbers::pi, {0, 0, 0}, {0, 0, 1});
    const FieldSample s = f.sample({0, {2, 0, 0}});
    REQUIRE(norm(s.electric) == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(s.electric.x == Catch::Approx(1.0).margin(1e-14));
    REQUIRE(s.electric.y == 0.0);
    REQUIRE(s.electric.z == 0.0);
    REQUIRE(norm(s.magnetic) == 0.0);

    const FieldSample far = f.sample({3, {0, 4, 7}});
    REQUIRE(norm(far.electric) == Catch::Approx(0.5).margin(1e-14));
    REQUIRE(far.electric.y == Catch::Approx(0.5).margin(1e-14));
  }

  SECTION("arbitrary axis") {
    const Vec3 a{1, 2, 3};
    const Vec3 d = normalized({1, 1, 1});
    const LineChargeField f(2.0 * std::numbers::pi, a, {1, 1, 1});
    const Vec3 perp = 2.0 * normalized(cross(d, Vec3{0, 0, 1}));
    const FieldSample s = f.sample({0, a + 5.0 * d + perp});
    REQUIRE(std::abs(dot(s.electric, d)) < 1e-14);
    REQUIRE(norm(s.electric) == Catch::Approx(0.5).margin(1e-13));
    REQUIRE(dot(normalized(s.electric), normalized(perp)) ==
            Catch::Approx(1.0).margin(1e-13));
  }

  SECTION("exclusion radius") {
    const LineChargeField f(1.0, {0, 0, 0}, {0, 0, 1});
    REQUIRE_THROWS_AS(f.sample({0, {0, 0, 5}}), AxisProximity);
    REQUIRE_THROWS_AS(f.sample({0, {1e-7, 0, 0}}), AxisProximity);
    REQUIRE_NOTHROW(f.sample({0, {1e-5, 0, 0}}));
    REQUIRE_THROWS_AS(LineChargeField(1.0, {0, 0, 0}, {0, 0, 0}), Error);
  }

  SECTION("divergence and curl vanish off axis") {
    const LineChargeField f(4.0 * std::numbers::pi, {0, 0, 0}, {0, 0, 1});
    RngStream rng(5, "line-charge-points");
    double worst_div = 0, worst_curl = 0;
    for (int i = 0; i < 100; ++i) {
      const double rho = rng.uniform(0.75, 5.0);
      const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const Event at{0, {rho * std::cos(phi), rho * std::sin(phi),
                         rng.uniform(-3.0, 3.0)}};
      worst_div = std::max(worst_div, std::abs(fd_divergence(electric_of(f), at)));
      worst_curl = std::max(worst_curl, norm(fd_curl(electric_of(f), at)));
    }
    REQUIRE(worst_div < 1e-6);
    REQUIRE(worst_curl < 1e-6);
  }

  SECTION("Richardson extrapolation confirms zero divergence at rho = 1") {
    const LineChargeField f(4.0 * std::numbers::pi, {0, 0, 0}, {0, 0, 1});
    const Event at{0, {1, 0, 0}};
    const double d1 = fd_divergence(electric_of(f), at, 1e-4);
    const double d2 = fd_divergence(electric_of(f), at, 5e-5);
    const double richardson = (4.0 * d2 - d1) / 3.0;
    REQUIRE(std::abs(d1) < 1e-6);
    REQUIRE(std::abs(richardson) < 1e-9);
  }

  SECTION("stencil touching the axis raises the proximity error") {
    const LineChargeField f(1.0, {0, 0, 0}, {0, 0, 1});
    REQUIRE_THROWS_AS(fd_divergence(electric_of(f), Event{0, {1e-4, 0, 0}}),
                      AxisProximity);
  }
}

TEST_CASE("pulsed uniform magnetic field") {
  SECTION("hard square window") {
    const PulsedUniformBField f({0, 0, 2}, 0.0, 5.0, 0.0);
    REQUIRE(norm(f.sample({7, {}}).magnetic) == 0.0);
    REQUIRE(f.sample({2.5, {}}).magnetic.z == 2.0);
    REQUIRE(f.sample({0.0, {}}).magnetic.z == 2.0);
    REQUIRE(f.sample({5.0, {}}).magnetic.z == 0.0);
    REQUIRE(norm(f.sample({2.5, {}}).electric) == 0.0);
    REQUIRE(f.integrated_envelope() == 5.0);
  }

  SECTION("smooth ramp values") {
    const PulsedUniformBField f({1, 0, 0}, 0.0, 10.0);  // ramp width 0.5
    REQUIRE(f.ramp_width() == 0.5);
    REQUIRE(f.envelope(0.0) == 0.0);
    REQUIRE(f.envelope(0.25) == 0.5);
    REQUIRE(f.envelope(0.5) == 1.0);
    REQUIRE(f.envelope(5.0) == 1.0);
    REQUIRE(f.envelope(9.75) == 0.5);
    REQUIRE(f.envelope(10.0) == 0.0);
    REQUIRE(f.envelope(-1.0) == 0.0);
    REQUIRE(f.envelope(11.0) == 0.0);
  }

  SECTION("ramp is C1: derivative vanishes at both ends of each ramp") {
    const PulsedUniformBField f({1, 0, 0}, 0.0, 10.0);
    const double d = 1e-5;
    for (const double t : {0.0, 0.5, 9.5, 10.0}) {
      const double slope = (f.envelope(t + d) - f.envelope(t - d)) / (2.0 * d);
      REQUIRE(std::abs(slope) < 1e-4);
    }
  }

  SECTION("closed-form envelope integral matches dense quadrature") {
    const PulsedUniformBField f({1, 0, 0}, 0.0, 10.0);
    REQUIRE(f.integrated_envelope() == 9.5);
    // composite Simpson over [-1, 11]
    const int n = 120000;
    const double a = -1.0, b = 11.0, h = (b - a) / n;
    double acc = f.envelope(a) + f.envelope(b);
    for (int i = 1; i < n; ++i)
      acc += f.envelope(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    REQUIRE(acc * h / 3.0 == Catch::Approx(9.5).margin(1e-9));
  }

  SECTION("time derivative through the FD operator") {
    const PulsedUniformBField f({0, 0, 2}, 0.0, 10.0);
    const Vec3 mid_ramp = fd_time_derivative(magnetic_of(f), {0.25, {}});
    REQUIRE(mid_ramp.z == Catch::Approx(6.0).margin(1e-6));
    const Vec3 plateau = fd_time_derivative(magnetic_of(f), {5.0, {}});
    REQUIRE(norm(plateau) == 0.0);
  }

  SECTION("validation") {
    REQUIRE_THROWS_AS(PulsedUniformBField({1, 0, 0}, 5.0, 5.0), Error);
    REQUIRE_THROWS_AS(PulsedUniformBField({1, 0, 0}, 6.0, 5.0), Error);
    REQUIRE_THROWS_AS(PulsedUniformBField({1, 0, 0}, 0.0, 5.0, 0.6), Error);
  }
}

TEST_CASE("expression field") {
  SECTION("component wiring") {
    ExpressionFieldSources src;
    src.ex = "sin(pi/2)*x";
    const ExpressionField f(src);
    const FieldSample s = f.sample({0, {3, 0, 0}});
    REQUIRE(s.electric.x == Catch::Approx(3.0).margin(1e-14));
    REQUIRE(s.electric.y == 0.0);
    REQUIRE(s.electric.z == 0.0);
    REQUIRE(norm(s.magnetic) == 0.0);
  }

  SECTION("time dependence and cylindrical variables") {
    ExpressionFieldSources src;
    src.bz = "2*exp(-t)";
    src.ey = "rho*cos(phi)";
    const ExpressionField f(src);
    REQUIRE(f.sample({0, {}}).magnetic.z == 2.0);
    REQUIRE(f.sample({1, {}}).magnetic.z == Catch::Approx(2.0 / std::numbers::e));
    REQUIRE(f.sample({0, {3, 4, 0}}).electric.y == Catch::Approx(3.0).margin(1e-12));
  }

  SECTION("parse and domain errors propagate") {
    ExpressionFieldSources bad;
    bad.ex = "sin(";
    REQUIRE_THROWS_AS(ExpressionField(bad), SyntaxError);

    ExpressionFieldSources dom;
    dom.ex = "log(x)";
    const ExpressionField f(dom);
    REQUIRE_THROWS_AS(f.sample({0, {-1, 0, 0}}), ExpressionDomain);
  }
}

TEST_CASE("field tensor assembly from samples") {
  const FieldSample s{{1, 0, 0}, {0, 0, -7}};
  const FieldTensor t = assemble_field_tensor(s);
  REQUIRE(t.upper(1, 0) == 1.0);
  REQUIRE(t.upper(1, 2) == 7.0);
  REQUIRE(electric_field(t).x == 1.0);
  REQUIRE(magnetic_field(t).z == -7.0);
}

TEST_CASE("finite difference operators") {
  SECTION("polynomial gradient is exact to rounding") {
    const auto f = [](const Event& e) { return e.r.x * e.r.x; };
    const Vec3 g = fd_gradient(f, {0, {3, 0, 0}});
    REQUIRE(g.x == Catch::Approx(6.0).margin(1e-6));
    REQUIRE(g.y == 0.0);
    REQUIRE(g.z == 0.0);
  }

  SECTION("identities: curl of gradient, divergence of curl") {
    const auto scalar = [](const Event& e) {
      return std::sin(e.r.x) * std::exp(0.3 * e.r.y) + e.r.z * e.r.z;
    };
    const Event at{0, {0.4, -0.2, 0.9}};
    const auto grad_field = [&](const Event& e) { return fd_gradient(scalar, e, 1e-3); };
    REQUIRE(norm(fd_curl(grad_field, at, 1e-3)) < 5e-7);

    const auto swirl = [](const Event& e) {
      return Vec3{e.r.y * e.r.z, e.r.x * e.r.z, e.r.x * e.r.y};
    };
    REQUIRE(norm(fd_curl(swirl, at)) < 1e-9);
    REQUIRE(std::abs(fd_divergence(swirl, at)) < 1e-9);
  }

  SECTION("directional derivative of a quadratic") {
    const auto v = [](const Event& e) {
      return Vec3{e.r.x * e.r.x, e.r.x * e.r.y, e.r.z};
    };
    const Vec3 r = fd_directional_derivative(v, {0, {1, 2, 3}}, {1, 2, 0});
    REQUIRE(r.x == Catch::Approx(2.0).margin(1e-8));
    REQUIRE(r.y == Catch::Approx(4.0).margin(1e-8));
    REQUIRE(r.z == Catch::Approx(0.0).margin(1e-8));
  }

  SECTION("halving the step shrinks the error about fourfold") {
    ExpressionFieldSources src;
    src.ex = "sin(2*x)*cos(3*y)*exp(0.5*z)";
    const ExpressionField f(src);
    const Event at{0, {0.3, 0.2, 0.1}};
    const double analytic = 2.0 * std::cos(2.0 * at.r.x) * std::cos(3.0 * at.r.y) *
                            std::exp(0.5 * at.r.z);
    const auto ex = [&](const Event& e) { return f.sample(e).electric.x; };
    const double e1 = std::abs(fd_partial(ex, at, 1, 1e-3) - analytic);
    const double e2 = std::abs(fd_partial(ex, at, 1, 5e-4) - analytic);
    const double ratio = e1 / e2;
    REQUIRE(ratio > 3.5);
    REQUIRE(ratio < 4.5);
  }
}
