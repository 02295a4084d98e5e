#pragma once

// Scenario files: a line-oriented structured text format describing one
// particle, one field configuration, named paths, and an ordered task list.
//
// Grammar (one construct per line, '#' starts a comment, blank lines free):
//
//   units            particle           field              path NAME
//     key: value       mass: 1.0          kind: ...          kind: ...
//   end                moment: 0.5        ...                t0: 0.0
//                      polarization: 0 0 1                   t1: 1.0
//                      momentum: 0 0 0  end                end
//                    end
//
//   task KIND        with KIND one of: phase, conditions, evolve,
//     key: value     precession, autocorrelation, identity_checks
//   end
//
// Values are numbers ("1.5e-3"), integers, booleans ("true"/"false"),
// triples of numbers ("0 0 1"), bare words ("circle"), or quoted strings
// ('"y / (x^2 + y^2)"', used for field expressions).
//
// Parsing never stops at the first problem: every diagnostic in the file is
// collected, each naming the dotted path of the offending entry and its line
// number.  The four diagnostic kinds are syntax errors, unknown keys or
// names, missing required blocks or entries, and documented-range
// violations.

#include <cctype>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tphase/core.hpp"
#include "tphase/errors.hpp"
#include "tphase/expression.hpp"
#include "tphase/fields.hpp"
#include "tphase/path.hpp"
#include "tphase/spinor.hpp"

namespace tphase {

// ---------------------------------------------------------------------------
// Diagnostics

enum class DiagnosticKind { kSyntax, kUnknownKey, kMissingBlock, kRangeViolation };

inline const char* diagnostic_kind_name(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::kSyntax: return "SyntaxError";
    case DiagnosticKind::kUnknownKey: return "UnknownKey";
    case DiagnosticKind::kMissingBlock: return "MissingBlock";
    case DiagnosticKind::kRangeViolation: return "RangeViolation";
  }
  return "?";
}

struct Diagnostic {
  DiagnosticKind kind = DiagnosticKind::kSyntax;
  int line = 0;          // 1-based; 0 when the problem is an absence
  std::string path;      // dotted location in the document, e.g. "task[1].path"
  std::string message;

  std::string format() const {
    std::string out = diagnostic_kind_name(kind);
    out += ": ";
    out += path;
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    out += ": ";
    out += message;
    return out;
  }
};

// Thrown by the single-result parse entry point; carries all diagnostics.
struct ScenarioInvalid : Error {
  std::vector<Diagnostic> diagnostics;
  explicit ScenarioInvalid(std::vector<Diagnostic> diags)
      : Error(diags.empty() ? std::string("scenario invalid")
                            : diags.front().format() +
                                  (diags.size() > 1
                                       ? " (+" + std::to_string(diags.size() - 1) + " more)"
                                       : std::string{})),
        diagnostics(std::move(diags)) {}
};

// ---------------------------------------------------------------------------
// Parsed blocks

struct ParticleSpec {
  double mass = 1.0;
  double moment = 1.0;
  Vec3 polarization{0, 0, 1};
  Vec3 momentum{};
  int line = 0;

  PolarizedParticle particle() const {
    PolarizedParticle p;
    p.mass = mass;
    p.moment = moment;
    p.polarization = normalized(polarization);
    p.momentum = momentum;
    return p;
  }
};

struct FieldSpec {
  std::string kind;  // uniform | line_charge | pulsed_uniform_b | expression
  int line = 0;

  Vec3 electric{}, magnetic{};                          // uniform
  double lambda = 1.0;                                  // line_charge
  Vec3 axis_point{};
  Vec3 axis_direction{0, 0, 1};
  Vec3 amplitude{};                                     // pulsed_uniform_b
  double t_on = 0.0, t_off = 1.0, ramp_fraction = 0.0;
  ExpressionFieldSources expressions;                   // expression

  std::shared_ptr<const EmField> build() const {
    if (kind == "uniform") return std::make_shared<UniformField>(electric, magnetic);
    if (kind == "line_charge")
      return std::make_shared<LineChargeField>(lambda, axis_point, axis_direction);
    if (kind == "pulsed_uniform_b")
      return std::make_shared<PulsedUniformBField>(amplitude, t_on, t_off, ramp_fraction);
    if (kind == "expression") return std::make_shared<ExpressionField>(expressions);
    throw Error("unknown field kind: " + kind);
  }
};

struct PathSpec {
  std::string name;
  std::string kind;  // circle | polyline | point
  int line = 0;

  Vec3 center{};                                        // circle
  double radius = 1.0;
  Vec3 normal{0, 0, 1};
  int winding = 1;
  std::vector<Vec3> vertices;                           // polyline
  bool close_loop = true;
  Vec3 position{};                                      // point
  double t0 = 0.0, t1 = 1.0;
  bool has_velocity = false;                            // optional uniform velocity
  Vec3 velocity{};

  SpacetimePath build() const {
    std::shared_ptr<const SpatialPath> spatial;
    if (kind == "circle") {
      spatial = std::make_shared<CirclePath>(center, radius, normal, winding);
    } else if (kind == "polyline") {
      std::vector<Vec3> v = vertices;
      if (close_loop && !v.empty()) v.push_back(v.front());
      spatial = std::make_shared<PolylinePath>(std::move(v));
    } else if (kind == "point") {
      spatial = std::make_shared<PolylinePath>(std::vector<Vec3>{position, position}, false);
    } else {
      throw Error("unknown path kind: " + kind);
    }
    SpacetimePath path(std::move(spatial), t0, t1);
    if (has_velocity) path.with_uniform_velocity(velocity);
    return path;
  }
};

// ---------------------------------------------------------------------------
// Tasks

struct PhaseTask {
  std::string which;  // open | ac | sab | flux
  std::string path;
  Vec3 velocity{};        // constant drag velocity for the spin-coupled loop
  double abs_tol = 1e-10;
};

struct ConditionsTask {
  std::string mode;  // ac | sab
  Vec3 center{};
  Vec3 half_extent{1, 1, 1};
  int samples = 32;
  Vec3 axis_point{};
  Vec3 axis_direction{0, 0, 1};
  double rho_min = 0.0;
  double rho_max = std::numeric_limits<double>::infinity();
  double tolerance = 1e-6;
  double time = 0.0;
};

struct EvolveTask {
  int grid = 256;
  double extent = 18.0;  // half-width of the square simulation box
  double sigma0 = 1.0;
  double momentum = 4.0;
  Vec3 source{-9, 0, 0};
  Vec3 waypoint{0, 7, 0};
  Vec3 drain{9, 0, 0};
  double dt = 0.01;
};

struct PrecessionTask {
  std::string driver;  // applied | effective
  Vec3 position{};     // sampling point for the applied driver
  Vec3 start{};        // trajectory start for the effective driver
  Vec3 velocity{};
  Vec3 initial{1, 0, 0};
  double t0 = 0.0;
  double dt = 1e-3;
  int steps = 1000;
  int record_every = 1;
};

struct AutocorrelationTask {
  std::string driver;  // applied | effective
  Vec3 position{};
  Vec3 start{};
  Vec3 velocity{};
  double t_i = 0.0;
  double t_f = 1.0;
  Vec3 state{0, 0, 1};
};

struct IdentityChecksTask {
  int trials = -1;  // -1 marks "not given"
};

struct TaskSpec {
  std::string kind;
  int line = 0;
  // exactly one of these is active, selected by `kind`
  PhaseTask phase;
  ConditionsTask conditions;
  EvolveTask evolve;
  PrecessionTask precession;
  AutocorrelationTask autocorrelation;
  IdentityChecksTask identity_checks;
};

struct Scenario {
  std::string name = "scenario";
  std::string source_text;
  std::map<std::string, std::string> units;  // documentation only
  bool has_particle = false;
  ParticleSpec particle;
  bool has_field = false;
  FieldSpec field;
  std::vector<PathSpec> paths;
  std::vector<TaskSpec> tasks;

  const PathSpec* find_path(std::string_view path_name) const {
    for (const PathSpec& p : paths)
      if (p.name == path_name) return &p;
    return nullptr;
  }
};

struct ScenarioParse {
  Scenario scenario;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

// ---------------------------------------------------------------------------
// Parser

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Strip a '#' comment, honoring double quotes.
inline std::string strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    else if (s[i] == '#' && !quoted) return std::string(s.substr(0, i));
  }
  return std::string(s);
}

class ScenarioParser {
 public:
  ScenarioParse run(std::string_view text, std::string name) {
    out_.scenario.name = std::move(name);
    out_.scenario.source_text = std::string(text);

    std::istringstream in(out_.scenario.source_text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      const std::string line = trim(strip_comment(raw));
      if (line.empty()) continue;
      consume(line, line_no);
    }
    if (!block_.empty()) {
      syntax(block_path_, open_line_, "block is not closed by 'end' before end of file");
    }
    finalize();
    return std::move(out_);
  }

 private:
  ScenarioParse out_;
  Scenario& sc() { return out_.scenario; }

  std::string block_;       // "", "units", "particle", "field", "path", "task", "skip"
  std::string block_path_;  // dotted diagnostic prefix of the open block
  int open_line_ = 0;
  PathSpec cur_path_;
  TaskSpec cur_task_;
  int task_count_ = 0;

  void diag(DiagnosticKind kind, const std::string& path, int line, std::string msg) {
    out_.diagnostics.push_back({kind, line, path, std::move(msg)});
  }
  void syntax(const std::string& path, int line, std::string msg) {
    diag(DiagnosticKind::kSyntax, path, line, std::move(msg));
  }
  void unknown(const std::string& path, int line, std::string msg) {
    diag(DiagnosticKind::kUnknownKey, path, line, std::move(msg));
  }
  void range(const std::string& path, int line, std::string msg) {
    diag(DiagnosticKind::kRangeViolation, path, line, std::move(msg));
  }
  void missing(const std::string& path, int line, std::string msg) {
    diag(DiagnosticKind::kMissingBlock, path, line, std::move(msg));
  }

  // ---- line dispatch ----

  void consume(const std::string& line, int line_no) {
    if (block_.empty()) return open_block(line, line_no);
    if (line == "end") return close_block();
    if (block_ == "skip") return;  // swallowing the body of an unusable block

    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) {
      syntax(block_path_, line_no, "expected 'key: value' or 'end', got '" + line + "'");
      return;
    }
    const std::string key = trim(line.substr(0, colon));
    const std::string value = trim(line.substr(colon + 1));
    if (key.empty()) {
      syntax(block_path_, line_no, "empty key before ':'");
      return;
    }
    if (value.empty()) {
      syntax(block_path_ + "." + key, line_no, "missing value after ':'");
      return;
    }
    entry(key, value, line_no);
  }

  void open_block(const std::string& line, int line_no) {
    std::istringstream words(line);
    std::string head, arg, extra;
    words >> head >> arg >> extra;
    if (!extra.empty()) {
      syntax(head, line_no, "unexpected trailing text '" + extra + "' in block header");
      block_ = "skip";
      open_line_ = line_no;
      block_path_ = head;
      return;
    }
    open_line_ = line_no;
    if (head == "units" || head == "particle" || head == "field") {
      if (!arg.empty()) {
        syntax(head, line_no, "block '" + head + "' takes no name");
        block_ = "skip";
        block_path_ = head;
        return;
      }
      bool duplicate = (head == "particle" && sc().has_particle) ||
                       (head == "field" && sc().has_field);
      if (duplicate) {
        syntax(head, line_no, "duplicate '" + head + "' block");
        block_ = "skip";
        block_path_ = head;
        return;
      }
      block_ = head;
      block_path_ = head;
      if (head == "particle") {
        sc().has_particle = true;
        sc().particle.line = line_no;
      }
      if (head == "field") {
        sc().has_field = true;
        sc().field.line = line_no;
      }
      return;
    }
    if (head == "path") {
      if (arg.empty()) {
        syntax("path", line_no, "path block needs a name: 'path NAME'");
        block_ = "skip";
        block_path_ = "path";
        return;
      }
      if (sc().find_path(arg) != nullptr) {
        syntax("path." + arg, line_no, "duplicate path name '" + arg + "'");
        block_ = "skip";
        block_path_ = "path." + arg;
        return;
      }
      block_ = "path";
      block_path_ = "path." + arg;
      cur_path_ = PathSpec{};
      cur_path_.name = arg;
      cur_path_.line = line_no;
      return;
    }
    if (head == "task") {
      const std::string idx = "task[" + std::to_string(task_count_) + "]";
      if (arg.empty()) {
        syntax("task", line_no, "task block needs a kind: 'task KIND'");
        block_ = "skip";
        block_path_ = "task";
        return;
      }
      static const char* kinds[] = {"phase",      "conditions",      "evolve",
                                    "precession", "autocorrelation", "identity_checks"};
      bool known = false;
      for (const char* k : kinds) known = known || (arg == k);
      if (!known) {
        unknown(idx + ".kind", line_no, "unknown task kind '" + arg + "'");
        block_ = "skip";
        block_path_ = idx;
        ++task_count_;  // keep later task indices aligned with declaration order
        return;
      }
      block_ = "task";
      block_path_ = idx + "." + arg;
      cur_task_ = TaskSpec{};
      cur_task_.kind = arg;
      cur_task_.line = line_no;
      return;
    }
    if (head == "end") {
      syntax("end", line_no, "'end' without an open block");
      return;
    }
    syntax(head, line_no, "unknown block '" + head +
                              "' (expected units, particle, field, path, or task)");
    block_ = "skip";
    block_path_ = head;
  }

  void close_block() {
    if (block_ == "path") sc().paths.push_back(cur_path_);
    if (block_ == "task") {
      sc().tasks.push_back(cur_task_);
      ++task_count_;
    }
    block_.clear();
    block_path_.clear();
  }

  // ---- value parsers (diagnose and return nullopt on failure) ----

  std::optional<double> number(const std::string& key, const std::string& v, int line) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) {
      syntax(block_path_ + "." + key, line, "expected a number, got '" + v + "'");
      return std::nullopt;
    }
    return d;
  }

  std::optional<int> integer(const std::string& key, const std::string& v, int line) {
    char* end = nullptr;
    const long n = std::strtol(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size()) {
      syntax(block_path_ + "." + key, line, "expected an integer, got '" + v + "'");
      return std::nullopt;
    }
    return static_cast<int>(n);
  }

  std::optional<bool> boolean(const std::string& key, const std::string& v, int line) {
    if (v == "true") return true;
    if (v == "false") return false;
    syntax(block_path_ + "." + key, line, "expected 'true' or 'false', got '" + v + "'");
    return std::nullopt;
  }

  std::optional<Vec3> triple(const std::string& key, const std::string& v, int line) {
    std::istringstream in(v);
    double x, y, z;
    std::string rest;
    if (!(in >> x >> y >> z) || (in >> rest)) {
      syntax(block_path_ + "." + key, line, "expected three numbers, got '" + v + "'");
      return std::nullopt;
    }
    return Vec3{x, y, z};
  }

  std::optional<std::string> text(const std::string& key, const std::string& v, int line) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
      return v.substr(1, v.size() - 2);
    if (v.find('"') != std::string::npos) {
      syntax(block_path_ + "." + key, line, "unbalanced quotes in '" + v + "'");
      return std::nullopt;
    }
    return v;
  }

  // Validate an embedded field expression by actually parsing it.
  void expression_entry(std::string& slot, const std::string& key, const std::string& v,
                        int line) {
    const auto s = text(key, v, line);
    if (!s) return;
    try {
      Expression::parse(*s);
      slot = *s;
    } catch (const SyntaxError& e) {
      syntax(block_path_ + "." + key, line, std::string("bad expression: ") + e.what());
    }
  }

  // ---- block entries ----

  void entry(const std::string& key, const std::string& value, int line) {
    if (block_ == "units") {
      const auto s = text(key, value, line);
      if (s) sc().units[key] = *s;
      return;
    }
    if (block_ == "particle") return particle_entry(key, value, line);
    if (block_ == "field") return field_entry(key, value, line);
    if (block_ == "path") return path_entry(key, value, line);
    if (block_ == "task") return task_entry(key, value, line);
  }

  void particle_entry(const std::string& key, const std::string& v, int line) {
    ParticleSpec& p = sc().particle;
    if (key == "mass") { if (auto d = number(key, v, line)) p.mass = *d; return; }
    if (key == "moment") { if (auto d = number(key, v, line)) p.moment = *d; return; }
    if (key == "polarization") { if (auto t = triple(key, v, line)) p.polarization = *t; return; }
    if (key == "momentum") { if (auto t = triple(key, v, line)) p.momentum = *t; return; }
    unknown("particle." + key, line, "unknown particle key '" + key + "'");
  }

  void field_entry(const std::string& key, const std::string& v, int line) {
    FieldSpec& f = sc().field;
    if (key == "kind") {
      const auto s = text(key, v, line);
      if (!s) return;
      if (*s != "uniform" && *s != "line_charge" && *s != "pulsed_uniform_b" &&
          *s != "expression") {
        unknown("field.kind", line, "unknown field kind '" + *s + "'");
        return;
      }
      f.kind = *s;
      return;
    }
    if (key == "electric") { if (auto t = triple(key, v, line)) f.electric = *t; return; }
    if (key == "magnetic") { if (auto t = triple(key, v, line)) f.magnetic = *t; return; }
    if (key == "lambda") { if (auto d = number(key, v, line)) f.lambda = *d; return; }
    if (key == "axis_point") { if (auto t = triple(key, v, line)) f.axis_point = *t; return; }
    if (key == "axis_direction") {
      if (auto t = triple(key, v, line)) f.axis_direction = *t;
      return;
    }
    if (key == "amplitude") { if (auto t = triple(key, v, line)) f.amplitude = *t; return; }
    if (key == "t_on") { if (auto d = number(key, v, line)) f.t_on = *d; return; }
    if (key == "t_off") { if (auto d = number(key, v, line)) f.t_off = *d; return; }
    if (key == "ramp_fraction") {
      if (auto d = number(key, v, line)) f.ramp_fraction = *d;
      return;
    }
    if (key == "ex") return expression_entry(f.expressions.ex, key, v, line);
    if (key == "ey") return expression_entry(f.expressions.ey, key, v, line);
    if (key == "ez") return expression_entry(f.expressions.ez, key, v, line);
    if (key == "bx") return expression_entry(f.expressions.bx, key, v, line);
    if (key == "by") return expression_entry(f.expressions.by, key, v, line);
    if (key == "bz") return expression_entry(f.expressions.bz, key, v, line);
    unknown("field." + key, line, "unknown field key '" + key + "'");
  }

  void path_entry(const std::string& key, const std::string& v, int line) {
    PathSpec& p = cur_path_;
    if (key == "kind") {
      const auto s = text(key, v, line);
      if (!s) return;
      if (*s != "circle" && *s != "polyline" && *s != "point") {
        unknown(block_path_ + ".kind", line, "unknown path kind '" + *s + "'");
        return;
      }
      p.kind = *s;
      return;
    }
    if (key == "center") { if (auto t = triple(key, v, line)) p.center = *t; return; }
    if (key == "radius") { if (auto d = number(key, v, line)) p.radius = *d; return; }
    if (key == "normal") { if (auto t = triple(key, v, line)) p.normal = *t; return; }
    if (key == "winding") { if (auto n = integer(key, v, line)) p.winding = *n; return; }
    if (key == "vertex") {
      if (auto t = triple(key, v, line)) p.vertices.push_back(*t);
      return;
    }
    if (key == "closed") { if (auto b = boolean(key, v, line)) p.close_loop = *b; return; }
    if (key == "position") { if (auto t = triple(key, v, line)) p.position = *t; return; }
    if (key == "t0") { if (auto d = number(key, v, line)) p.t0 = *d; return; }
    if (key == "t1") { if (auto d = number(key, v, line)) p.t1 = *d; return; }
    if (key == "velocity") {
      if (auto t = triple(key, v, line)) {
        p.velocity = *t;
        p.has_velocity = true;
      }
      return;
    }
    unknown(block_path_ + "." + key, line, "unknown path key '" + key + "'");
  }

  void task_entry(const std::string& key, const std::string& v, int line) {
    TaskSpec& t = cur_task_;
    const std::string path = block_path_ + "." + key;
    auto bad_key = [&] { unknown(path, line, "unknown key '" + key + "' for this task"); };

    if (t.kind == "phase") {
      PhaseTask& x = t.phase;
      if (key == "which") {
        const auto s = text(key, v, line);
        if (!s) return;
        if (*s != "open" && *s != "ac" && *s != "sab" && *s != "flux") {
          unknown(path, line, "unknown phase variant '" + *s + "'");
          return;
        }
        x.which = *s;
        return;
      }
      if (key == "path") { if (auto s = text(key, v, line)) x.path = *s; return; }
      if (key == "velocity") { if (auto tr = triple(key, v, line)) x.velocity = *tr; return; }
      if (key == "abs_tol") { if (auto d = number(key, v, line)) x.abs_tol = *d; return; }
      return bad_key();
    }

    if (t.kind == "conditions") {
      ConditionsTask& x = t.conditions;
      if (key == "mode") {
        const auto s = text(key, v, line);
        if (!s) return;
        if (*s != "ac" && *s != "sab") {
          unknown(path, line, "unknown conditions mode '" + *s + "'");
          return;
        }
        x.mode = *s;
        return;
      }
      if (key == "center") { if (auto tr = triple(key, v, line)) x.center = *tr; return; }
      if (key == "half_extent") {
        if (auto tr = triple(key, v, line)) x.half_extent = *tr;
        return;
      }
      if (key == "samples") { if (auto n = integer(key, v, line)) x.samples = *n; return; }
      if (key == "axis_point") { if (auto tr = triple(key, v, line)) x.axis_point = *tr; return; }
      if (key == "axis_direction") {
        if (auto tr = triple(key, v, line)) x.axis_direction = *tr;
        return;
      }
      if (key == "rho_min") { if (auto d = number(key, v, line)) x.rho_min = *d; return; }
      if (key == "rho_max") { if (auto d = number(key, v, line)) x.rho_max = *d; return; }
      if (key == "tolerance") { if (auto d = number(key, v, line)) x.tolerance = *d; return; }
      if (key == "time") { if (auto d = number(key, v, line)) x.time = *d; return; }
      return bad_key();
    }

    if (t.kind == "evolve") {
      EvolveTask& x = t.evolve;
      if (key == "grid") { if (auto n = integer(key, v, line)) x.grid = *n; return; }
      if (key == "extent") { if (auto d = number(key, v, line)) x.extent = *d; return; }
      if (key == "sigma0") { if (auto d = number(key, v, line)) x.sigma0 = *d; return; }
      if (key == "momentum") { if (auto d = number(key, v, line)) x.momentum = *d; return; }
      if (key == "source") { if (auto tr = triple(key, v, line)) x.source = *tr; return; }
      if (key == "waypoint") { if (auto tr = triple(key, v, line)) x.waypoint = *tr; return; }
      if (key == "drain") { if (auto tr = triple(key, v, line)) x.drain = *tr; return; }
      if (key == "dt") { if (auto d = number(key, v, line)) x.dt = *d; return; }
      return bad_key();
    }

    if (t.kind == "precession") {
      PrecessionTask& x = t.precession;
      if (key == "driver") {
        const auto s = text(key, v, line);
        if (!s) return;
        if (*s != "applied" && *s != "effective") {
          unknown(path, line, "unknown driver '" + *s + "'");
          return;
        }
        x.driver = *s;
        return;
      }
      if (key == "position") { if (auto tr = triple(key, v, line)) x.position = *tr; return; }
      if (key == "start") { if (auto tr = triple(key, v, line)) x.start = *tr; return; }
      if (key == "velocity") { if (auto tr = triple(key, v, line)) x.velocity = *tr; return; }
      if (key == "initial") { if (auto tr = triple(key, v, line)) x.initial = *tr; return; }
      if (key == "t0") { if (auto d = number(key, v, line)) x.t0 = *d; return; }
      if (key == "dt") { if (auto d = number(key, v, line)) x.dt = *d; return; }
      if (key == "steps") { if (auto n = integer(key, v, line)) x.steps = *n; return; }
      if (key == "record_every") {
        if (auto n = integer(key, v, line)) x.record_every = *n;
        return;
      }
      return bad_key();
    }

    if (t.kind == "autocorrelation") {
      AutocorrelationTask& x = t.autocorrelation;
      if (key == "driver") {
        const auto s = text(key, v, line);
        if (!s) return;
        if (*s != "applied" && *s != "effective") {
          unknown(path, line, "unknown driver '" + *s + "'");
          return;
        }
        x.driver = *s;
        return;
      }
      if (key == "position") { if (auto tr = triple(key, v, line)) x.position = *tr; return; }
      if (key == "start") { if (auto tr = triple(key, v, line)) x.start = *tr; return; }
      if (key == "velocity") { if (auto tr = triple(key, v, line)) x.velocity = *tr; return; }
      if (key == "t_i") { if (auto d = number(key, v, line)) x.t_i = *d; return; }
      if (key == "t_f") { if (auto d = number(key, v, line)) x.t_f = *d; return; }
      if (key == "state") { if (auto tr = triple(key, v, line)) x.state = *tr; return; }
      return bad_key();
    }

    if (t.kind == "identity_checks") {
      IdentityChecksTask& x = t.identity_checks;
      if (key == "trials") { if (auto n = integer(key, v, line)) x.trials = *n; return; }
      return bad_key();
    }
  }

  // ---- cross-reference and range validation ----

  void finalize() {
    Scenario& s = sc();
    if (!s.has_particle)
      missing("particle", 0, "scenario requires a particle block");

    if (s.has_particle) {
      if (!(s.particle.mass > 0.0))
        range("particle.mass", s.particle.line, "mass must be positive");
      if (norm(s.particle.polarization) == 0.0)
        range("particle.polarization", s.particle.line, "polarization must be nonzero");
    }

    if (s.has_field) validate_field(s.field);
    for (const PathSpec& p : s.paths) validate_path(p);

    bool needs_field = false;
    for (std::size_t i = 0; i < s.tasks.size(); ++i) {
      validate_task(s.tasks[i], i);
      if (s.tasks[i].kind != "identity_checks") needs_field = true;
    }
    if (needs_field && !s.has_field)
      missing("field", 0, "a task requires a field block");
  }

  void validate_field(const FieldSpec& f) {
    if (f.kind.empty()) {
      missing("field.kind", f.line, "field block requires a kind");
      return;
    }
    if (f.kind == "line_charge" && norm(f.axis_direction) == 0.0)
      range("field.axis_direction", f.line, "axis direction must be nonzero");
    if (f.kind == "pulsed_uniform_b") {
      if (!(f.t_on < f.t_off))
        range("field.t_on", f.line, "pulse window requires t_on < t_off");
      if (!(f.ramp_fraction >= 0.0 && f.ramp_fraction <= 0.5))
        range("field.ramp_fraction", f.line, "ramp fraction must lie in [0, 0.5]");
    }
  }

  void validate_path(const PathSpec& p) {
    const std::string base = "path." + p.name;
    if (p.kind.empty()) {
      missing(base + ".kind", p.line, "path block requires a kind");
      return;
    }
    if (p.kind == "circle") {
      if (!(p.radius > 0.0)) range(base + ".radius", p.line, "radius must be positive");
      if (norm(p.normal) == 0.0) range(base + ".normal", p.line, "normal must be nonzero");
      if (p.winding == 0) range(base + ".winding", p.line, "winding must be nonzero");
    }
    if (p.kind == "polyline" && p.vertices.size() < 2)
      range(base + ".vertex", p.line, "polyline needs at least two vertices");
    if (!(p.t1 >= p.t0)) range(base + ".t1", p.line, "t1 must not precede t0");
  }

  void validate_task(const TaskSpec& t, std::size_t i) {
    const std::string base = "task[" + std::to_string(i) + "]." + t.kind;
    if (t.kind == "phase") {
      if (t.phase.which.empty())
        missing(base + ".which", t.line, "phase task requires 'which'");
      if (t.phase.path.empty()) {
        missing(base + ".path", t.line, "phase task requires 'path'");
      } else if (sc().find_path(t.phase.path) == nullptr) {
        unknown(base + ".path", t.line, "no path named '" + t.phase.path + "'");
      } else if (t.phase.which == "flux" || t.phase.which == "ac") {
        const PathSpec* p = sc().find_path(t.phase.path);
        if (p->kind == "polyline" && !p->close_loop)
          range(base + ".path", t.line,
                "the '" + t.phase.which + "' variant needs a closed loop");
      }
      if (!(t.phase.abs_tol > 0.0))
        range(base + ".abs_tol", t.line, "abs_tol must be positive");
      const double v2 = dot(t.phase.velocity, t.phase.velocity);
      if (!(v2 < 1.0)) range(base + ".velocity", t.line, "speed must be below 1 (c = 1)");
      return;
    }
    if (t.kind == "conditions") {
      if (t.conditions.mode.empty())
        missing(base + ".mode", t.line, "conditions task requires 'mode'");
      if (t.conditions.samples < 2 || t.conditions.samples > 128)
        range(base + ".samples", t.line, "samples per axis must lie in [2, 128]");
      if (!(t.conditions.tolerance > 0.0))
        range(base + ".tolerance", t.line, "tolerance must be positive");
      if (norm(t.conditions.axis_direction) == 0.0)
        range(base + ".axis_direction", t.line, "axis direction must be nonzero");
      return;
    }
    if (t.kind == "evolve") {
      if (t.evolve.grid < 8 || t.evolve.grid > 2048)
        range(base + ".grid", t.line, "grid nodes per axis must lie in [8, 2048]");
      if (!(t.evolve.extent > 0.0)) range(base + ".extent", t.line, "extent must be positive");
      if (!(t.evolve.sigma0 > 0.0)) range(base + ".sigma0", t.line, "sigma0 must be positive");
      if (!(t.evolve.momentum > 0.0))
        range(base + ".momentum", t.line, "momentum must be positive");
      if (!(t.evolve.dt > 0.0)) range(base + ".dt", t.line, "dt must be positive");
      return;
    }
    if (t.kind == "precession") {
      if (t.precession.driver.empty())
        missing(base + ".driver", t.line, "precession task requires 'driver'");
      if (!(t.precession.dt > 0.0)) range(base + ".dt", t.line, "dt must be positive");
      if (t.precession.steps < 1 || t.precession.steps > 100000000)
        range(base + ".steps", t.line, "steps must lie in [1, 1e8]");
      if (t.precession.record_every < 1)
        range(base + ".record_every", t.line, "record_every must be positive");
      return;
    }
    if (t.kind == "autocorrelation") {
      if (t.autocorrelation.driver.empty())
        missing(base + ".driver", t.line, "autocorrelation task requires 'driver'");
      if (!(t.autocorrelation.t_f >= t.autocorrelation.t_i))
        range(base + ".t_f", t.line, "t_f must not precede t_i");
      if (norm(t.autocorrelation.state) == 0.0)
        range(base + ".state", t.line, "state must be a nonzero direction");
      return;
    }
    if (t.kind == "identity_checks") {
      if (t.identity_checks.trials == -1)
        missing(base + ".trials", t.line, "identity_checks task requires 'trials'");
      else if (t.identity_checks.trials < 1 || t.identity_checks.trials > 1000000)
        range(base + ".trials", t.line, "trials must lie in [1, 1e6]");
      return;
    }
  }
};

}  // namespace detail

// Parse scenario text, collecting every diagnostic instead of stopping at
// the first.
inline ScenarioParse parse_scenario_text(std::string_view text,
                                         std::string name = "scenario") {
  return detail::ScenarioParser{}.run(text, std::move(name));
}

inline std::string scenario_name_from_filename(const std::string& filename) {
  std::size_t slash = filename.find_last_of("/\\");
  std::string base = slash == std::string::npos ? filename : filename.substr(slash + 1);
  const std::size_t dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base.resize(dot);
  return base;
}

inline std::string read_file_text(const std::string& filename) {
  std::ifstream in(filename, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + filename);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// One-result entry point: returns the scenario or throws ScenarioInvalid
// carrying every diagnostic.  File errors surface as IoError.
inline Scenario parse_scenario(const std::string& filename) {
  ScenarioParse parsed =
      parse_scenario_text(read_file_text(filename), scenario_name_from_filename(filename));
  if (!parsed.ok()) throw ScenarioInvalid(std::move(parsed.diagnostics));
  return std::move(parsed.scenario);
}

}  // namespace tphase
