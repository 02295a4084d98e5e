#pragma once

// Two-component spinor wavefunctions on a uniform 2D lattice, plus packet
// construction, inner products, and CSV / binary serialization.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "core.hpp"
#include "errors.hpp"

namespace tphase {

// Uniform nx x ny lattice in the z = plane_z plane. Nodes are cell-centered
// and symmetric about (center_x, center_y): x_i = center_x + (i + 1/2 - nx/2) h.
struct GridGeometry {
  int nx = 256;
  int ny = 256;
  double spacing = 0.140625;
  double center_x = 0.0;
  double center_y = 0.0;
  double plane_z = 0.0;

  double x(int i) const { return center_x + (i + 0.5 - 0.5 * nx) * spacing; }
  double y(int j) const { return center_y + (j + 0.5 - 0.5 * ny) * spacing; }
  Vec3 position(int i, int j) const { return {x(i), y(j), plane_z}; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  std::size_t nodes() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }

  void validate() const {
    if (nx < 2 || ny < 2) throw Error("grid must have at least 2 nodes per axis");
    if (!(spacing > 0.0)) throw Error("grid spacing must be positive");
  }

  bool same_shape(const GridGeometry& o) const {
    return nx == o.nx && ny == o.ny && spacing == o.spacing && center_x == o.center_x &&
           center_y == o.center_y && plane_z == o.plane_z;
  }
};

// Two complex components per node, stored row-major: amp[2*(j*nx+i) + c].
struct SpinorGrid {
  GridGeometry geom;
  double time = 0.0;
  std::vector<cplx> amp;

  SpinorGrid() : amp(2 * geom.nodes(), cplx{}) {}
  explicit SpinorGrid(const GridGeometry& g, double t = 0.0) : geom(g), time(t) {
    geom.validate();
    amp.assign(2 * geom.nodes(), cplx{});
  }

  cplx& at(int i, int j, int c) { return amp[2 * geom.index(i, j) + c]; }
  const cplx& at(int i, int j, int c) const { return amp[2 * geom.index(i, j) + c]; }

  // Discrete L2 norm squared, h^2 sum over nodes and components.
  double norm_sq() const {
    double s = 0.0;
    for (const cplx& v : amp) s += std::norm(v);
    return geom.spacing * geom.spacing * s;
  }
  double norm() const { return std::sqrt(norm_sq()); }

  void scale(cplx factor) {
    for (cplx& v : amp) v *= factor;
  }
};

// h^2 sum conj(a) . b over nodes and both components.
inline cplx inner_product(const SpinorGrid& a, const SpinorGrid& b) {
  if (!a.geom.same_shape(b.geom)) throw Error("inner product requires identical grid geometry");
  cplx s{};
  for (std::size_t k = 0; k < a.amp.size(); ++k) s += std::conj(a.amp[k]) * b.amp[k];
  return a.geom.spacing * a.geom.spacing * s;
}

// Normalized Gaussian packet exp(-|r-r0|^2/(4 sigma^2)) exp(i p.r) chi, where
// sigma is the position-space standard deviation of |psi|^2 per axis.
inline SpinorGrid make_gaussian_packet(const GridGeometry& geom, Vec3 center, Vec3 momentum,
                                       double sigma, std::array<cplx, 2> spin_amplitude = {
                                           cplx{1.0, 0.0}, cplx{0.0, 0.0}}) {
  if (!(sigma > 0.0)) throw Error("packet width must be positive");
  const double chi_norm =
      std::sqrt(std::norm(spin_amplitude[0]) + std::norm(spin_amplitude[1]));
  if (!(chi_norm > 0.0)) throw Error("packet spin amplitude must be nonzero");
  SpinorGrid g(geom);
  for (int j = 0; j < geom.ny; ++j) {
    for (int i = 0; i < geom.nx; ++i) {
      const Vec3 r = geom.position(i, j);
      const Vec3 d = r - center;
      const double envelope = std::exp(-(d.x * d.x + d.y * d.y) / (4.0 * sigma * sigma));
      const cplx phase = std::exp(kImag * (momentum.x * r.x + momentum.y * r.y));
      const cplx base = envelope * phase;
      g.at(i, j, 0) = base * (spin_amplitude[0] / chi_norm);
      g.at(i, j, 1) = base * (spin_amplitude[1] / chi_norm);
    }
  }
  const double n = g.norm();
  if (!(n > 0.0)) throw Error("packet norm vanished; width too small for the grid");
  g.scale(1.0 / n);
  return g;
}

// Multiply by exp(i dp.r): shifts the packet's mean momentum by dp in place.
inline void momentum_kick(SpinorGrid& g, Vec3 delta_p) {
  for (int j = 0; j < g.geom.ny; ++j) {
    for (int i = 0; i < g.geom.nx; ++i) {
      const Vec3 r = g.geom.position(i, j);
      const cplx phase = std::exp(kImag * (delta_p.x * r.x + delta_p.y * r.y));
      g.at(i, j, 0) *= phase;
      g.at(i, j, 1) *= phase;
    }
  }
}

// Position expectation values of |psi|^2 (normalized by the grid norm).
inline Vec3 position_mean(const SpinorGrid& g) {
  double wx = 0.0, wy = 0.0, total = 0.0;
  for (int j = 0; j < g.geom.ny; ++j) {
    for (int i = 0; i < g.geom.nx; ++i) {
      const double w = std::norm(g.at(i, j, 0)) + std::norm(g.at(i, j, 1));
      wx += w * g.geom.x(i);
      wy += w * g.geom.y(j);
      total += w;
    }
  }
  if (!(total > 0.0)) throw Error("cannot take the mean position of a null state");
  return {wx / total, wy / total, g.geom.plane_z};
}

// CSV export: one row per node, row-major, columns x,y,re_up,im_up,re_down,im_down.
inline void write_grid_csv(const SpinorGrid& g, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open for writing: " + path);
  std::fprintf(f, "x,y,re_up,im_up,re_down,im_down\n");
  for (int j = 0; j < g.geom.ny; ++j) {
    for (int i = 0; i < g.geom.nx; ++i) {
      const cplx u = g.at(i, j, 0);
      const cplx d = g.at(i, j, 1);
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", g.geom.x(i), g.geom.y(j),
                   u.real(), u.imag(), d.real(), d.imag());
    }
  }
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

namespace detail {

inline void put_le_u32(std::FILE* f, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  if (std::fwrite(b, 1, 4, f) != 4) throw IoError("binary grid write failed");
}

inline std::uint32_t get_le_u32(std::FILE* f) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4) throw IoError("binary grid read failed: truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace detail

inline constexpr std::uint32_t kGridBinaryVersion = 1;

// Binary lattice dump. 16-byte header: magic "TPHG", version, nx, ny as
// little-endian 32-bit integers; then row-major (re, im) float64 pairs, node
// by node, the up component followed by the down component. Geometry metadata
// (spacing, center, time) travels with the report that references the file.
inline void write_grid_tphg(const SpinorGrid& g, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  if (std::fwrite("TPHG", 1, 4, f) != 4) throw IoError("binary grid write failed");
  detail::put_le_u32(f, kGridBinaryVersion);
  detail::put_le_u32(f, static_cast<std::uint32_t>(g.geom.nx));
  detail::put_le_u32(f, static_cast<std::uint32_t>(g.geom.ny));
  for (std::size_t k = 0; k < g.amp.size(); ++k) {
    const double pair[2] = {g.amp[k].real(), g.amp[k].imag()};
    if (std::fwrite(pair, sizeof(double), 2, f) != 2) throw IoError("binary grid write failed");
  }
  if (std::fclose(f) != 0) throw IoError("write failed: " + path);
}

// Reads a binary lattice dump; the caller supplies the geometry metadata the
// format does not carry (spacing, center, plane, time stamp).
inline SpinorGrid read_grid_tphg(const std::string& path, double spacing = 1.0,
                                 double center_x = 0.0, double center_y = 0.0,
                                 double plane_z = 0.0, double time = 0.0) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open for reading: " + path);
  char magic[4];
  if (std::fread(magic, 1, 4, f) != 4 || std::string(magic, 4) != "TPHG") {
    std::fclose(f);
    throw IoError("not a binary grid file: " + path);
  }
  const std::uint32_t version = detail::get_le_u32(f);
  if (version != kGridBinaryVersion) {
    std::fclose(f);
    throw IoError("unsupported binary grid version in " + path);
  }
  GridGeometry geom;
  geom.nx = static_cast<int>(detail::get_le_u32(f));
  geom.ny = static_cast<int>(detail::get_le_u32(f));
  geom.spacing = spacing;
  geom.center_x = center_x;
  geom.center_y = center_y;
  geom.plane_z = plane_z;
  SpinorGrid g(geom, time);
  for (std::size_t k = 0; k < g.amp.size(); ++k) {
    double pair[2];
    if (std::fread(pair, sizeof(double), 2, f) != 2) {
      std::fclose(f);
      throw IoError("binary grid read failed: truncated data in " + path);
    }
    g.amp[k] = cplx{pair[0], pair[1]};
  }
  std::fclose(f);
  return g;
}

}  // namespace tphase
