#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "tphase/evolve.hpp"
#include "tphase/hamiltonian.hpp"
#include "tphase/rng.hpp"
#include "tphase/spinor_grid.hpp"

using namespace tphase;

namespace {

GridGeometry square_grid(int n, double spacing, double cx = 0.0, double cy = 0.0,
                         double plane_z = 0.0) {
  GridGeometry g;
  g.nx = n;
  g.ny = n;
  g.spacing = spacing;
  g.center_x = cx;
  g.center_y = cy;
  g.plane_z = plane_z;
  return g;
}

std::shared_ptr<const EmField> zero_field() {
  return std::make_shared<UniformField>(Vec3{}, Vec3{});
}

std::string temp_path(const std::string& name) {
  return std::string("/tmp/tphase_grid_") + name;
}

}  // namespace

TEST_CASE("grid geometry is cell-centered and symmetric") {
  const GridGeometry g = square_grid(180, 0.1);
  CHECK(g.x(0) == Catch::Approx(-8.95).margin(1e-15));
  CHECK(g.x(179) == Catch::Approx(8.95).margin(1e-15));
  CHECK(g.x(0) == Catch::Approx(-g.x(g.nx - 1)).margin(1e-15));
  CHECK(g.y(89) == Catch::Approx(-0.05).margin(1e-15));
  CHECK(g.nodes() == 180u * 180u);

  GridGeometry bad = g;
  bad.spacing = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = g;
  bad.nx = 1;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("gaussian packet is normalized with the requested moments") {
  const GridGeometry g = square_grid(128, 0.1);
  const Vec3 center{0.5, -0.3, 0.0};
  const SpinorGrid psi = make_gaussian_packet(g, center, Vec3{0.9, -0.4, 0.0}, 1.2);
  CHECK(psi.norm_sq() == Catch::Approx(1.0).margin(1e-12));
  const Vec3 mean = position_mean(psi);
  CHECK(mean.x == Catch::Approx(center.x).margin(1e-9));
  CHECK(mean.y == Catch::Approx(center.y).margin(1e-9));

  // The characteristic function of the position density: <e^{i q.r}> =
  // e^{i q.center} e^{-|q|^2 sigma^2 / 2} for an isotropic Gaussian.
  SpinorGrid kicked = psi;
  const Vec3 q{0.7, 0.4, 0.0};
  momentum_kick(kicked, q);
  const cplx charfn = inner_product(psi, kicked);
  const double expected_mag = std::exp(-(q.x * q.x + q.y * q.y) * 1.2 * 1.2 / 2.0);
  const double expected_arg = q.x * center.x + q.y * center.y;
  CHECK(std::abs(charfn) == Catch::Approx(expected_mag).margin(1e-5));
  CHECK(std::arg(charfn) == Catch::Approx(expected_arg).margin(1e-5));

  CHECK_THROWS_AS(make_gaussian_packet(g, center, Vec3{}, 0.0), Error);
  CHECK_THROWS_AS(make_gaussian_packet(g, center, Vec3{}, 1.0, {cplx{}, cplx{}}), Error);
}

TEST_CASE("spin amplitude is the +1 eigenvector of sigma.n") {
  RngStream rng(20260817, "grid-spin-amp");
  std::vector<Vec3> dirs = {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {0, -1, 0}};
  for (int k = 0; k < 100; ++k) dirs.push_back(rng.unit_vector());
  for (const Vec3& n : dirs) {
    const std::array<cplx, 2> chi = spin_amplitude_along(n);
    CHECK(std::norm(chi[0]) + std::norm(chi[1]) == Catch::Approx(1.0).margin(1e-14));
    const Mat2 s = sigma_dot(n);
    const cplx r0 = s(0, 0) * chi[0] + s(0, 1) * chi[1];
    const cplx r1 = s(1, 0) * chi[0] + s(1, 1) * chi[1];
    CHECK(std::abs(r0 - chi[0]) < 1e-13);
    CHECK(std::abs(r1 - chi[1]) < 1e-13);
  }
  CHECK_THROWS_AS(spin_amplitude_along(Vec3{0.5, 0, 0}), Error);
}

TEST_CASE("binary grid dump round-trips and has the documented layout") {
  const GridGeometry g = square_grid(12, 0.25, 0.3, -0.1);
  SpinorGrid psi = make_gaussian_packet(g, Vec3{0.2, 0.1, 0.0}, Vec3{1.0, -2.0, 0.0}, 0.6,
                                        {cplx{0.8, 0.1}, cplx{-0.3, 0.5}});
  psi.time = 1.75;
  const std::string path = temp_path("dump.tphg");
  write_grid_tphg(psi, path);

  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  unsigned char header[16];
  REQUIRE(std::fread(header, 1, 16, f) == 16u);
  CHECK(header[0] == 'T');
  CHECK(header[1] == 'P');
  CHECK(header[2] == 'H');
  CHECK(header[3] == 'G');
  auto le32 = [&](int off) {
    return static_cast<std::uint32_t>(header[off]) |
           (static_cast<std::uint32_t>(header[off + 1]) << 8) |
           (static_cast<std::uint32_t>(header[off + 2]) << 16) |
           (static_cast<std::uint32_t>(header[off + 3]) << 24);
  };
  CHECK(le32(4) == kGridBinaryVersion);
  CHECK(le32(8) == 12u);
  CHECK(le32(12) == 12u);
  std::fseek(f, 0, SEEK_END);
  CHECK(std::ftell(f) == 16 + 12 * 12 * 2 * 2 * 8);
  std::fclose(f);

  const SpinorGrid back = read_grid_tphg(path, g.spacing, g.center_x, g.center_y, 0.0, psi.time);
  REQUIRE(back.amp.size() == psi.amp.size());
  CHECK(back.geom.nx == 12);
  CHECK(back.geom.ny == 12);
  for (std::size_t k = 0; k < psi.amp.size(); ++k) {
    REQUIRE(back.amp[k] == psi.amp[k]);
  }

  const std::string bad = temp_path("notagrid.tphg");
  std::FILE* fw = std::fopen(bad.c_str(), "wb");
  REQUIRE(fw != nullptr);
  std::fputs("BOGUS", fw);
  std::fclose(fw);
  CHECK_THROWS_AS(read_grid_tphg(bad), IoError);
  CHECK_THROWS_AS(read_grid_tphg(temp_path("missing.tphg")), IoError);
}

TEST_CASE("csv grid export writes one row per node with coordinates") {
  const GridGeometry g = square_grid(8, 0.5);
  const SpinorGrid psi = make_gaussian_packet(g, Vec3{}, Vec3{}, 0.8);
  const std::string path = temp_path("dump.csv");
  write_grid_csv(psi, path);
  std::FILE* f = std::fopen(path.c_str(), "r");
  REQUIRE(f != nullptr);
  char line[512];
  REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
  CHECK(std::string(line) == "x,y,re_up,im_up,re_down,im_down\n");
  int rows = 0;
  double x0 = 0, y0 = 0, re0 = 0;
  while (std::fgets(line, sizeof line, f) != nullptr) {
    if (rows == 0) {
      REQUIRE(std::sscanf(line, "%lf,%lf,%lf", &x0, &y0, &re0) == 3);
    }
    ++rows;
  }
  std::fclose(f);
  CHECK(rows == 64);
  CHECK(x0 == Catch::Approx(g.x(0)).margin(1e-15));
  CHECK(y0 == Catch::Approx(g.y(0)).margin(1e-15));
  CHECK(re0 == Catch::Approx(psi.at(0, 0, 0).real()).margin(1e-15));
}

TEST_CASE("every hamiltonian term is hermitian on a dense diagnostic grid") {
  ExpressionFieldSources src;
  src.ex = "x + 0.3*y*y + 0.1*z";
  src.ey = "y - 0.2*x + 0.05*t";
  src.ez = "0.1*x*y";
  src.bx = "0.4*y + 0.1*x";
  src.by = "0.05*x*x - 0.2*z";
  src.bz = "1 + 0.2*x + 0.1*y*y";
  const auto field = std::make_shared<ExpressionField>(src);
  PolarizedParticle particle;
  particle.mass = 1.3;
  particle.moment = 0.8;
  particle.polarization = normalized(Vec3{0.3, -0.4, 0.866025403784438647});

  const GridGeometry g = square_grid(24, 0.21, 0.3, -0.2, 0.15);
  const HamiltonianTerms H = build_fw_hamiltonian(field, particle, g, 0.4);

  for (FwTerm t : kFwTerms) {
    CHECK(H.active(t));
    const std::vector<cplx> m = dense_matrix(H, t);
    CHECK(hermiticity_defect(m, 2 * g.nodes()) < 1e-12);
  }
  const std::vector<cplx> full = dense_matrix(H);
  CHECK(hermiticity_defect(full, 2 * g.nodes()) < 1e-12);

  // The diagonal helper must match the dense diagonal exactly.
  const std::vector<double> d = H.diagonal();
  const std::size_t dim = 2 * g.nodes();
  double worst = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    worst = std::max(worst, std::abs(full[k * dim + k] - cplx{d[k], 0.0}));
  }
  CHECK(worst < 1e-12);

  GridGeometry big = square_grid(64, 0.1);
  HamiltonianTerms big_terms;
  big_terms.geom = big;
  big_terms.resize_coefficients();
  big_terms.finalize();
  CHECK_THROWS_AS(dense_matrix(big_terms), Error);
}

TEST_CASE("zero field gives the free hamiltonian") {
  PolarizedParticle particle;
  const GridGeometry g = square_grid(12, 0.2);
  const HamiltonianTerms H = build_fw_hamiltonian(zero_field(), particle, g, 0.0);
  CHECK(H.active(FwTerm::kinetic));
  CHECK_FALSE(H.active(FwTerm::scalar_potential));
  CHECK_FALSE(H.active(FwTerm::zeeman));
  CHECK_FALSE(H.active(FwTerm::spin_orbit));
  CHECK_FALSE(H.active(FwTerm::darwin));
  for (std::size_t n = 0; n < g.nodes(); ++n) {
    REQUIRE(H.a0[n] == 0.0);
    REQUIRE(norm(H.a[n]) == 0.0);
    REQUIRE(norm(H.b_eff[n]) == 0.0);
    REQUIRE(norm(H.e_eff[n]) == 0.0);
    REQUIRE(H.div_e[n] == 0.0);
    REQUIRE(H.link_x[n] == cplx{1.0, 0.0});
    REQUIRE(H.link_y[n] == cplx{1.0, 0.0});
  }

  // One free-Laplacian spot check: interior node of a basis state.
  const SpinorGrid basis = make_gaussian_packet(g, Vec3{}, Vec3{}, 0.5);
  std::vector<cplx> out(basis.amp.size());
  H.apply(basis.amp, out);
  const int i = 6, j = 5;
  const double inv = 1.0 / (2.0 * particle.mass * g.spacing * g.spacing);
  const cplx expected =
      inv * (4.0 * basis.at(i, j, 0) - basis.at(i + 1, j, 0) - basis.at(i - 1, j, 0) -
             basis.at(i, j + 1, 0) - basis.at(i, j - 1, 0));
  CHECK(std::abs(out[2 * g.index(i, j)] - expected) < 1e-15);
}

TEST_CASE("certified topological configuration leaves only the covariant kinetic term") {
  const auto field = std::make_shared<LineChargeField>(2.0, Vec3{}, Vec3{0, 0, 1});
  PolarizedParticle particle;
  particle.moment = 0.5;
  particle.polarization = {0, 0, 1};
  const GridGeometry g = square_grid(16, 0.11, 2.5, 0.3);
  const HamiltonianTerms H = build_fw_hamiltonian(field, particle, g, 0.0);

  double worst_b = 0.0, worst_e = 0.0, worst_a0 = 0.0, worst_div = 0.0;
  double worst_pot = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      worst_b = std::max(worst_b, norm(H.b_eff[n]));
      worst_e = std::max(worst_e, norm(H.e_eff[n]));
      worst_a0 = std::max(worst_a0, std::abs(H.a0[n]));
      worst_div = std::max(worst_div, std::abs(H.div_e[n]));
      const Vec3 closed = cross(particle.polarization, field->sample({0.0, g.position(i, j)}).electric);
      worst_pot = std::max(worst_pot, norm(H.a[n] - closed));
    }
  }
  CHECK(worst_a0 == 0.0);
  CHECK(worst_div == 0.0);
  CHECK(worst_b < 1e-10);
  CHECK(worst_e < 1e-10);
  CHECK(worst_pot < 1e-14);

  // Applying the full operator is the kinetic term alone to the same accuracy.
  const SpinorGrid probe = make_gaussian_packet(g, Vec3{2.5, 0.3, 0.0}, Vec3{1.0, 0.5, 0.0}, 0.3);
  std::vector<cplx> full(probe.amp.size()), kin(probe.amp.size());
  H.apply(probe.amp, full);
  H.apply_term(FwTerm::kinetic, probe.amp, kin);
  double diff = 0.0;
  for (std::size_t k = 0; k < full.size(); ++k) diff = std::max(diff, std::abs(full[k] - kin[k]));
  CHECK(diff < 1e-10);

  // A grid overlapping the filament exclusion zone must refuse to sample.
  const auto guarded = std::make_shared<LineChargeField>(2.0, Vec3{}, Vec3{0, 0, 1}, 0.05);
  CHECK_THROWS_AS(build_fw_hamiltonian(guarded, particle, square_grid(8, 0.02), 0.0),
                  AxisProximity);
}

TEST_CASE("pulsed uniform field couples only through the scalar potential") {
  const auto field = std::make_shared<PulsedUniformBField>(Vec3{0, 0, 2.0}, 0.0, 5.0, 0.0);
  PolarizedParticle particle;
  particle.moment = 0.1;
  particle.polarization = {0, 0, 1};
  const GridGeometry g = square_grid(12, 0.15);
  const HamiltonianTerms during = build_fw_hamiltonian(field, particle, g, 2.5);
  for (std::size_t n = 0; n < g.nodes(); ++n) {
    REQUIRE(during.a0[n] == 2.0);
    REQUIRE(norm(during.a[n]) == 0.0);
    REQUIRE(norm(during.b_eff[n]) == 0.0);
    REQUIRE(norm(during.e_eff[n]) == 0.0);
    REQUIRE(during.div_e[n] == 0.0);
  }
  CHECK(during.active(FwTerm::scalar_potential));
  CHECK_FALSE(during.active(FwTerm::zeeman));
  CHECK_FALSE(during.active(FwTerm::spin_orbit));
  CHECK_FALSE(during.active(FwTerm::darwin));

  const SpinorGrid probe = make_gaussian_packet(g, Vec3{}, Vec3{0.4, -0.2, 0.0}, 0.4);
  std::vector<cplx> full(probe.amp.size()), kin(probe.amp.size());
  during.apply(probe.amp, full);
  during.apply_term(FwTerm::kinetic, probe.amp, kin);
  double diff = 0.0;
  for (std::size_t k = 0; k < full.size(); ++k) {
    diff = std::max(diff, std::abs(full[k] - kin[k] - 0.1 * 2.0 * probe.amp[k]));
  }
  CHECK(diff < 1e-15);

  const HamiltonianTerms after = build_fw_hamiltonian(field, particle, g, 7.0);
  for (std::size_t n = 0; n < g.nodes(); ++n) REQUIRE(after.a0[n] == 0.0);
}

TEST_CASE("evolve validates its inputs and guards the step size") {
  PolarizedParticle particle;
  const GridGeometry g = square_grid(16, 0.2);
  SpinorGrid psi = make_gaussian_packet(g, Vec3{}, Vec3{}, 0.4);
  EvolveOptions opt;
  opt.dt = 0.0;
  CHECK_THROWS_AS(evolve(psi, zero_field(), particle, opt), Error);
  opt.dt = 0.01;
  opt.steps = 0;
  CHECK_THROWS_AS(evolve(psi, zero_field(), particle, opt), Error);

  // Strong uniform coupling: mu * s.B = 50, so dt = 0.02 trips the guard.
  const auto strong = std::make_shared<UniformField>(Vec3{}, Vec3{0, 0, 50.0});
  opt.steps = 1;
  opt.dt = 0.02;
  CHECK_THROWS_AS(evolve(psi, strong, particle, opt), Error);
  opt.dt = 0.001;
  CHECK_NOTHROW(evolve(psi, strong, particle, opt));
}

TEST_CASE("free packet obeys the ehrenfest drift to a tenth of a percent") {
  PolarizedParticle particle;
  const GridGeometry g = square_grid(180, 0.1);
  SpinorGrid psi = make_gaussian_packet(g, Vec3{}, Vec3{0.5, 0.0, 0.0}, 2.0);
  const double x_before = position_mean(psi).x;
  EvolveOptions opt;
  opt.dt = 0.005;
  opt.steps = 500;
  const EvolveReport rep = evolve(psi, zero_field(), particle, opt);
  const double displacement = position_mean(psi).x - x_before;
  const double expected = 0.5 / particle.mass * (opt.dt * opt.steps);
  CHECK(std::abs(displacement - expected) / expected < 1e-3);
  CHECK(rep.max_norm_drift < 1e-10);
  CHECK(psi.time == Catch::Approx(2.5).margin(1e-12));
}

TEST_CASE("norm is conserved through a thousand steps with wall bounces") {
  PolarizedParticle particle;
  const GridGeometry g = square_grid(48, 0.1);
  SpinorGrid psi = make_gaussian_packet(g, Vec3{}, Vec3{0.6, 0.3, 0.0}, 0.8,
                                        spin_amplitude_along(normalized(Vec3{1, 1, 0})));
  EvolveOptions opt;
  opt.dt = 0.01;
  opt.steps = 1000;
  const EvolveReport rep = evolve(psi, zero_field(), particle, opt);
  CHECK(rep.steps == 1000);
  CHECK(rep.max_norm_drift < 1e-10);
}

TEST_CASE("pulsed scalar coupling imprints the expected global phase") {
  PolarizedParticle particle;
  particle.moment = 0.1;
  particle.polarization = {0, 0, 1};
  // Walls sit four packet widths out: tighter boxes clip the Gaussian tail,
  // and the clipped weight lands on high lattice modes where the split-step
  // cross term dt^2*E^2*c/4 per unit time is no longer negligible.
  const GridGeometry g = square_grid(80, 0.1);
  const SpinorGrid start = make_gaussian_packet(g, Vec3{}, Vec3{}, 1.0);

  EvolveOptions opt;
  opt.dt = 0.0025;
  opt.steps = 2000;  // exactly the pulse window [0, 5]

  SpinorGrid pulsed = start;
  opt.static_field = false;
  const auto pulse = std::make_shared<PulsedUniformBField>(Vec3{0, 0, 2.0}, 0.0, 5.0, 0.0);
  evolve(pulsed, pulse, particle, opt);

  SpinorGrid reference = start;
  opt.static_field = true;
  evolve(reference, zero_field(), particle, opt);

  const cplx ratio = inner_product(reference, pulsed);
  CHECK(std::abs(ratio) > 1.0 - 1e-7);
  CHECK(std::arg(ratio) == Catch::Approx(-1.0).margin(1e-6));
}

TEST_CASE("free packet satisfies the discrete continuity equation") {
  PolarizedParticle particle;
  // The box must stay wide (walls ~5.6 packet widths out): a clipped Gaussian
  // tail seeds modes near the lattice Nyquist edge, where a node-centered
  // current misestimates the bond current by an O(1) fraction and the
  // residual stops converging under refinement.
  auto run = [&](int n, double h, double dt) {
    const GridGeometry g = square_grid(n, h);
    SpinorGrid psi = make_gaussian_packet(g, Vec3{-0.3, 0.2, 0.0}, Vec3{0.8, 0.4, 0.0}, 1.0);
    EvolveOptions opt;
    opt.dt = dt;
    opt.steps = static_cast<int>(std::llround(0.09 / dt));
    evolve(psi, zero_field(), particle, opt);
    const SpinorGrid before = psi;
    opt.steps = 1;
    evolve(psi, zero_field(), particle, opt);
    const SpinorGrid middle = psi;
    evolve(psi, zero_field(), particle, opt);
    const HamiltonianTerms H = build_fw_hamiltonian(zero_field(), particle, g, middle.time);
    return probability_current_check(before, middle, psi, H);
  };
  const CurrentCheckResult coarse = run(128, 0.1, 0.01);
  CHECK(coarse.max_residual < 1e-3);
  CHECK(coarse.interior_nodes == 124 * 124);
  const CurrentCheckResult fine = run(256, 0.05, 0.005);
  const double ratio = coarse.max_residual / fine.max_residual;
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.5);
}

TEST_CASE("stationary lattice mode has machine-precision continuity residual") {
  PolarizedParticle particle;
  const GridGeometry g = square_grid(32, 0.1);
  SpinorGrid psi(g);
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      psi.at(i, j, 0) = std::sin(3.0 * std::numbers::pi * (i + 1) / (g.nx + 1)) *
                        std::sin(2.0 * std::numbers::pi * (j + 1) / (g.ny + 1));
    }
  }
  psi.scale(1.0 / psi.norm());
  EvolveOptions opt;
  opt.dt = 0.05;
  opt.steps = 1;
  opt.solve_tol = 1e-13;
  const SpinorGrid before = psi;
  evolve(psi, zero_field(), particle, opt);
  const SpinorGrid middle = psi;
  evolve(psi, zero_field(), particle, opt);
  const HamiltonianTerms H = build_fw_hamiltonian(zero_field(), particle, g, middle.time);
  const CurrentCheckResult r = probability_current_check(before, middle, psi, H);
  CHECK(r.max_residual < 1e-11);
}

TEST_CASE("continuity check validates slice spacing and margins") {
  PolarizedParticle particle;
  const GridGeometry g = square_grid(16, 0.1);
  SpinorGrid a = make_gaussian_packet(g, Vec3{}, Vec3{}, 0.4);
  SpinorGrid b = a, c = a;
  b.time = 0.01;
  c.time = 0.03;  // unequal spacing
  const HamiltonianTerms H = build_fw_hamiltonian(zero_field(), particle, g, 0.01);
  CHECK_THROWS_AS(probability_current_check(a, b, c, H), Error);
  c.time = 0.02;
  CHECK_THROWS_AS(probability_current_check(a, b, c, H, 1), Error);
  CHECK_NOTHROW(probability_current_check(a, b, c, H));
  SpinorGrid other(square_grid(12, 0.1));
  other.time = 0.02;
  CHECK_THROWS_AS(probability_current_check(a, b, other, H), Error);
}

namespace {

InterferometryParams smoke_interferometer() {
  InterferometryParams p;
  p.geom = square_grid(96, 36.0 / 96.0);
  p.sigma0 = 1.0;
  p.momentum = 4.0;
  p.dt = 0.03;
  return p;
}

}  // namespace

TEST_CASE("interferometer with no field reports a null phase") {
  PolarizedParticle particle;
  particle.moment = 0.5;
  const InterferometryParams p = smoke_interferometer();
  const InterferometryResult r = interferometric_phase(zero_field(), particle, p);
  CHECK(r.loop_reference == 0.0);
  CHECK(std::abs(r.phase) < 1e-4);
  CHECK(r.overlap_magnitude > 0.5);
}

TEST_CASE("interferometer around a charged filament tracks the loop integral") {
  const auto field = std::make_shared<LineChargeField>(2.0, Vec3{}, Vec3{0, 0, 1});
  PolarizedParticle particle;
  particle.moment = 0.5;  // mu * lambda = 1
  const InterferometryParams p = smoke_interferometer();
  const InterferometryResult r = interferometric_phase(field, particle, p);
  CHECK(r.loop_reference == Catch::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(r.phase - 1.0) < 0.2);
  CHECK(r.discrepancy < 0.2);
  CHECK(r.overlap_magnitude > 0.05);
}

TEST_CASE("interferometer guards clearance, overlap, and parameters") {
  const auto field = std::make_shared<LineChargeField>(2.0, Vec3{}, Vec3{0, 0, 1});
  PolarizedParticle particle;
  particle.moment = 0.5;

  InterferometryParams p = smoke_interferometer();
  p.min_axis_clearance_widths = 50.0;  // arms pass at ~5.5 length units
  CHECK_THROWS_AS(interferometric_phase(field, particle, p), Error);

  p = smoke_interferometer();
  p.geom = square_grid(48, 36.0 / 48.0);
  p.dt = 0.05;
  p.min_overlap = 2.0;  // impossible: |<a|b>| <= 1
  CHECK_THROWS_AS(interferometric_phase(zero_field(), particle, p), OverlapTooSmall);

  p = smoke_interferometer();
  p.momentum = 0.0;
  CHECK_THROWS_AS(interferometric_phase(zero_field(), particle, p), Error);
  p = smoke_interferometer();
  p.drain = p.source;
  CHECK_THROWS_AS(interferometric_phase(zero_field(), particle, p), Error);
}
