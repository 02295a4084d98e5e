#pragma once

// Spatial curves, timed trajectories, and winding numbers.
//
// Every spatial path is a map u in [0, 1] -> R^3 exposing position and the
// parameter-derivative tangent dr/du, plus the parameter values (breakpoints)
// where it is allowed to be non-smooth; integrators split panels there.  A
// SpacetimePath pairs a spatial path with a piecewise-linear time law and an
// optional constant-velocity override, and carries a traversal-direction
// flag: integrating a reversed path negates every phase component exactly.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tphase/core.hpp"
#include "tphase/errors.hpp"

namespace tphase {

struct PathPoint {
  Vec3 position{};
  Vec3 tangent{};  // dr/du, not normalized
};

class SpatialPath {
 public:
  virtual ~SpatialPath() = default;
  virtual PathPoint at(double u) const = 0;
  virtual bool closed() const = 0;
  // Sorted parameter values from 0 to 1 between which the path is smooth.
  virtual std::vector<double> breakpoints() const { return {0.0, 1.0}; }
};

namespace detail {

inline double clamp01(double u) { return u < 0.0 ? 0.0 : (u > 1.0 ? 1.0 : u); }

// Deterministic right-handed basis (e1, e2, n_hat) of the plane with normal
// n: the seed axis is the coordinate axis least aligned with n.
inline std::pair<Vec3, Vec3> plane_basis(const Vec3& normal) {
  const double len = norm(normal);
  if (!(len > 0.0)) throw Error("plane normal must be nonzero");
  const Vec3 n = normal / len;
  const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
  Vec3 seed{1.0, 0.0, 0.0};
  if (ay < ax || az < ax) seed = (ay <= az) ? Vec3{0.0, 1.0, 0.0} : Vec3{0.0, 0.0, 1.0};
  const Vec3 e1 = normalized(cross(n, seed));
  return {e1, cross(n, e1)};
}

}  // namespace detail

// Piecewise-linear path through a vertex list, parameterized uniformly per
// edge (edge i covers u in [i/n, (i+1)/n]).  Consecutive duplicate vertices
// are dropped by default; pass drop_degenerate = false to keep stationary
// segments of a timed trajectory.  The path is closed when the first and
// last remaining vertices coincide within 1e-12.
class PolylinePath final : public SpatialPath {
 public:
  explicit PolylinePath(std::vector<Vec3> vertices, bool drop_degenerate = true) {
    if (vertices.size() < 2) throw Error("polyline needs at least two vertices");
    verts_.push_back(vertices.front());
    for (std::size_t i = 1; i < vertices.size(); ++i) {
      if (drop_degenerate && norm(vertices[i] - verts_.back()) <= 1e-12) continue;
      verts_.push_back(vertices[i]);
    }
    if (verts_.size() < 2) throw Error("polyline has no nonzero-length edges");
    closed_ = norm(verts_.front() - verts_.back()) <= 1e-12;
  }

  PathPoint at(double u) const override {
    u = detail::clamp01(u);
    const std::size_t n = verts_.size() - 1;
    const std::size_t i =
        std::min(static_cast<std::size_t>(u * static_cast<double>(n)), n - 1);
    const double local = u * static_cast<double>(n) - static_cast<double>(i);
    const Vec3 d = verts_[i + 1] - verts_[i];
    return {verts_[i] + local * d, static_cast<double>(n) * d};
  }

  bool closed() const override { return closed_; }

  std::vector<double> breakpoints() const override {
    const std::size_t n = verts_.size() - 1;
    std::vector<double> b(n + 1);
    for (std::size_t i = 0; i <= n; ++i)
      b[i] = static_cast<double>(i) / static_cast<double>(n);
    return b;
  }

  const std::vector<Vec3>& vertices() const { return verts_; }

 private:
  std::vector<Vec3> verts_;
  bool closed_ = false;
};

// Circle of given center, radius, and plane normal, traversed winding times
// (negative winding reverses orientation relative to the normal).  The
// in-plane basis is deterministic, so the start point is reproducible.
class CirclePath final : public SpatialPath {
 public:
  CirclePath(Vec3 center, double radius, Vec3 normal, int winding = 1)
      : center_(center), radius_(radius), winding_(winding) {
    if (!(radius > 0.0)) throw Error("circle radius must be positive");
    if (winding == 0) throw Error("circle winding count must be nonzero");
    std::tie(e1_, e2_) = detail::plane_basis(normal);
  }

  PathPoint at(double u) const override {
    const double th =
        2.0 * std::numbers::pi * static_cast<double>(winding_) * detail::clamp01(u);
    const Vec3 radial = std::cos(th) * e1_ + std::sin(th) * e2_;
    const Vec3 azimuthal = -std::sin(th) * e1_ + std::cos(th) * e2_;
    const double rate = 2.0 * std::numbers::pi * static_cast<double>(winding_) * radius_;
    return {center_ + radius_ * radial, rate * azimuthal};
  }

  bool closed() const override { return true; }

  std::vector<double> breakpoints() const override {
    // Quarter-turn hints per traversal keep per-segment tolerance shares
    // aligned with the oscillatory integrand.
    const int n = 4 * std::abs(winding_);
    std::vector<double> b(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) b[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    return b;
  }

  Vec3 center() const { return center_; }
  double radius() const { return radius_; }
  int winding() const { return winding_; }

 private:
  Vec3 center_;
  double radius_;
  int winding_;
  Vec3 e1_{}, e2_{};
};

// Arbitrary smooth curve from a position callable; the tangent is either
// supplied analytically or taken by central differences (one-sided at the
// parameter ends).
class ParametricPath final : public SpatialPath {
 public:
  ParametricPath(std::function<Vec3(double)> position, bool closed,
                 std::function<Vec3(double)> tangent = {}, double fd_step = 1e-6)
      : position_(std::move(position)),
        tangent_(std::move(tangent)),
        closed_(closed),
        h_(fd_step) {
    if (!position_) throw Error("parametric path needs a position function");
    if (!(fd_step > 0.0)) throw Error("parametric path finite-difference step must be positive");
  }

  PathPoint at(double u) const override {
    u = detail::clamp01(u);
    if (tangent_) return {position_(u), tangent_(u)};
    const double lo = std::max(0.0, u - h_);
    const double hi = std::min(1.0, u + h_);
    return {position_(u), (position_(hi) - position_(lo)) / (hi - lo)};
  }

  bool closed() const override { return closed_; }

 private:
  std::function<Vec3(double)> position_;
  std::function<Vec3(double)> tangent_;
  bool closed_;
  double h_;
};

// Same curve traversed backward: at(u) = base(1 - u) with negated tangent.
class ReversedPath final : public SpatialPath {
 public:
  explicit ReversedPath(std::shared_ptr<const SpatialPath> base) : base_(std::move(base)) {
    if (!base_) throw Error("reversed path needs a base path");
  }

  PathPoint at(double u) const override {
    const PathPoint p = base_->at(1.0 - detail::clamp01(u));
    return {p.position, -p.tangent};
  }

  bool closed() const override { return base_->closed(); }

  std::vector<double> breakpoints() const override {
    std::vector<double> b = base_->breakpoints();
    for (double& v : b) v = 1.0 - v;
    std::sort(b.begin(), b.end());
    return b;
  }

 private:
  std::shared_ptr<const SpatialPath> base_;
};

// A closed base path traversed count times in succession.
class RepeatedPath final : public SpatialPath {
 public:
  RepeatedPath(std::shared_ptr<const SpatialPath> base, int count)
      : base_(std::move(base)), count_(count) {
    if (!base_) throw Error("repeated path needs a base path");
    if (count < 1) throw Error("repeat count must be at least 1");
    if (!base_->closed()) throw Error("only closed paths can be repeated");
  }

  PathPoint at(double u) const override {
    const double s = detail::clamp01(u) * count_;
    const int lap = std::min(static_cast<int>(s), count_ - 1);
    PathPoint p = base_->at(s - lap);
    p.tangent = static_cast<double>(count_) * p.tangent;
    return p;
  }

  bool closed() const override { return true; }

  std::vector<double> breakpoints() const override {
    const std::vector<double> base = base_->breakpoints();
    std::vector<double> b;
    b.push_back(0.0);
    for (int lap = 0; lap < count_; ++lap)
      for (const double v : base) {
        const double u = (lap + v) / count_;
        if (u - b.back() > 1e-15) b.push_back(u);
      }
    if (b.back() != 1.0) b.push_back(1.0);
    return b;
  }

 private:
  std::shared_ptr<const SpatialPath> base_;
  int count_;
};

inline std::shared_ptr<const SpatialPath> reversed_path(std::shared_ptr<const SpatialPath> base) {
  return std::make_shared<ReversedPath>(std::move(base));
}

inline std::shared_ptr<const SpatialPath> repeat_path(std::shared_ptr<const SpatialPath> base,
                                                      int count) {
  return std::make_shared<RepeatedPath>(std::move(base), count);
}

// Degenerate path of a particle at rest: constant position, zero tangent.
inline std::shared_ptr<const SpatialPath> stationary_point(Vec3 position) {
  return std::make_shared<ParametricPath>([position](double) { return position; }, false,
                                          [](double) { return Vec3{}; });
}

// ---------------------------------------------------------------------------
// Timed trajectories
// ---------------------------------------------------------------------------

class SpacetimePath {
 public:
  // Time advancing uniformly in the path parameter from t0 to t1.
  SpacetimePath(std::shared_ptr<const SpatialPath> spatial, double t0, double t1)
      : spatial_(std::move(spatial)) {
    require_spatial();
    breaks_ = clean_breakpoints();
    times_.resize(breaks_.size());
    for (std::size_t i = 0; i < breaks_.size(); ++i) times_[i] = t0 + breaks_[i] * (t1 - t0);
    validate_times();
  }

  // Piecewise-linear time law: one time per spatial breakpoint, nondecreasing.
  SpacetimePath(std::shared_ptr<const SpatialPath> spatial, std::vector<double> node_times)
      : spatial_(std::move(spatial)), times_(std::move(node_times)) {
    require_spatial();
    breaks_ = clean_breakpoints();
    if (times_.size() != breaks_.size())
      throw Error("node time count must match the spatial breakpoint count");
    validate_times();
  }

  // Pins the kinematic velocity to a constant vector instead of deriving it
  // from dr/dt (used for idealized configurations such as a spin dragged at
  // constant velocity around a loop).
  SpacetimePath& with_uniform_velocity(Vec3 v) {
    uniform_velocity_ = v;
    return *this;
  }

  // Same history traversed backward; integrators negate every phase
  // component of a reversed path, which makes reversal exact.
  SpacetimePath reversed() const {
    SpacetimePath copy = *this;
    copy.reversed_ = !copy.reversed_;
    return copy;
  }

  const SpatialPath& spatial() const { return *spatial_; }
  std::shared_ptr<const SpatialPath> spatial_ptr() const { return spatial_; }
  bool is_reversed() const { return reversed_; }
  const std::vector<double>& parameter_breakpoints() const { return breaks_; }
  const std::vector<double>& node_times() const { return times_; }
  std::optional<Vec3> uniform_velocity() const { return uniform_velocity_; }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }

  double time(double u) const {
    const std::size_t k = segment_of(u);
    const double w = (detail::clamp01(u) - breaks_[k]) / (breaks_[k + 1] - breaks_[k]);
    return times_[k] + w * (times_[k + 1] - times_[k]);
  }

  double time_rate(double u) const {
    const std::size_t k = segment_of(u);
    return (times_[k + 1] - times_[k]) / (breaks_[k + 1] - breaks_[k]);
  }

  Event event(double u) const { return {time(u), spatial_->at(u).position}; }

  Vec3 velocity(double u) const {
    if (uniform_velocity_) return *uniform_velocity_;
    const double rate = time_rate(u);
    if (rate == 0.0) throw Error("path velocity undefined where time does not advance");
    return spatial_->at(u).tangent / rate;
  }

  // Parameter value where the clock passes tb inside segment k, if any.
  std::vector<double> parameters_at_time(double tb) const {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
      if (times_[k] < tb && tb < times_[k + 1]) {
        const double w = (tb - times_[k]) / (times_[k + 1] - times_[k]);
        out.push_back(breaks_[k] + w * (breaks_[k + 1] - breaks_[k]));
      }
    }
    return out;
  }

 private:
  void require_spatial() const {
    if (!spatial_) throw Error("spacetime path needs a spatial path");
  }

  std::vector<double> clean_breakpoints() const {
    std::vector<double> b = spatial_->breakpoints();
    std::sort(b.begin(), b.end());
    std::vector<double> out{0.0};
    for (const double v : b)
      if (v > out.back() + 1e-15 && v < 1.0) out.push_back(v);
    out.push_back(1.0);
    return out;
  }

  void validate_times() const {
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (times_[i] < times_[i - 1]) throw Error("node times must be nondecreasing");
  }

  std::size_t segment_of(double u) const {
    u = detail::clamp01(u);
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), u);
    const std::size_t k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
        (it - breaks_.begin()) - 1, 0));
    return std::min(k, breaks_.size() - 2);
  }

  std::shared_ptr<const SpatialPath> spatial_;
  std::vector<double> breaks_;
  std::vector<double> times_;
  std::optional<Vec3> uniform_velocity_;
  bool reversed_ = false;
};

// ---------------------------------------------------------------------------
// Winding number
// ---------------------------------------------------------------------------

// Signed number of turns of a closed path around the oriented line through
// axis_point along axis_direction, by adaptive accumulation of the azimuth
// increment.  Throws PathIntersectsAxis when the path touches the axis and
// Error when the accumulated angle does not close to an integer multiple of
// 2 pi within 1e-6.
inline int winding_number(const SpatialPath& path, const Vec3& axis_point,
                          const Vec3& axis_direction) {
  if (!path.closed()) throw Error("winding number requires a closed path");
  const auto [e1, e2] = detail::plane_basis(axis_direction);
  const Vec3 dhat = cross(e1, e2);

  struct Sample {
    double angle;
  };
  auto angle_at = [&](double u) {
    const Vec3 rel = path.at(u).position - axis_point;
    const double x = dot(rel, e1);
    const double y = dot(rel, e2);
    const double rho = std::hypot(x, y);
    if (rho <= 1e-13 * (1.0 + std::abs(dot(rel, dhat))))
      throw PathIntersectsAxis("closed path touches the winding axis");
    return std::atan2(y, x);
  };
  auto wrap = [](double d) {
    while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
    while (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
    return d;
  };

  std::function<double(double, double, double, double, int)> accumulate =
      [&](double u0, double a0, double u1, double a1, int depth) -> double {
    const double d = wrap(a1 - a0);
    if (std::abs(d) <= 0.5) return d;
    if (depth >= 48) throw Error("failed to resolve the azimuth increment along the path");
    const double um = 0.5 * (u0 + u1);
    const double am = angle_at(um);
    return accumulate(u0, a0, um, am, depth + 1) + accumulate(um, am, u1, a1, depth + 1);
  };

  std::vector<double> breaks = path.breakpoints();
  std::sort(breaks.begin(), breaks.end());
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1];
    if (!(hi > lo)) continue;
    constexpr int kInitial = 128;
    double u_prev = lo;
    double a_prev = angle_at(lo);
    for (int i = 1; i <= kInitial; ++i) {
      const double u = lo + (hi - lo) * static_cast<double>(i) / kInitial;
      const double a = angle_at(u);
      total += accumulate(u_prev, a_prev, u, a, 0);
      u_prev = u;
      a_prev = a;
    }
  }

  const double turns = total / (2.0 * std::numbers::pi);
  const double nearest = std::round(turns);
  if (std::abs(turns - nearest) > 1e-6)
    throw Error("azimuth accumulation did not close to an integer number of turns");
  return static_cast<int>(nearest);
}

// ---------------------------------------------------------------------------
// CSV import
// ---------------------------------------------------------------------------

// Reads rows of t,x,y,z (an optional non-numeric header line is skipped) into
// events.  Malformed rows raise IoError naming the line number.
inline std::vector<Event> read_event_csv(std::istream& in) {
  std::vector<Event> events;
  std::string line;
  long lineno = 0;
  bool allow_header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (const char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (blank) continue;

    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = line.find(',', pos);
      cells.push_back(line.substr(pos, next == std::string::npos ? next : next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    std::array<double, 4> vals{};
    bool ok = cells.size() == 4;
    for (std::size_t i = 0; ok && i < 4; ++i) {
      char* end = nullptr;
      vals[i] = std::strtod(cells[i].c_str(), &end);
      while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
      if (end == cells[i].c_str() || (end && *end != '\0')) ok = false;
    }
    if (!ok) {
      if (allow_header) {
        allow_header = false;
        continue;
      }
      throw IoError("event csv line " + std::to_string(lineno) +
                    ": expected four numeric fields t,x,y,z");
    }
    allow_header = false;
    events.push_back({vals[0], {vals[1], vals[2], vals[3]}});
  }
  if (events.size() < 2) throw IoError("event csv needs at least two data rows");
  return events;
}

// Builds a timed polyline through the recorded events.  Stationary segments
// are kept (they still advance the clock); times must be nondecreasing.
inline SpacetimePath spacetime_from_events(const std::vector<Event>& events) {
  if (events.size() < 2) throw Error("timed trajectory needs at least two events");
  std::vector<Vec3> positions;
  std::vector<double> times;
  positions.reserve(events.size());
  times.reserve(events.size());
  for (const Event& e : events) {
    positions.push_back(e.r);
    times.push_back(e.t);
  }
  auto spatial = std::make_shared<PolylinePath>(std::move(positions), false);
  return SpacetimePath(std::move(spatial), std::move(times));
}

inline SpacetimePath load_spacetime_csv(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw IoError("cannot open event csv file: " + filename);
  return spacetime_from_events(read_event_csv(in));
}

}  // namespace tphase
