#pragma once

// Scenario execution: dispatches each task to the library in declaration
// order, assembles the report document, and writes sidecar CSV files for
// bulk numeric output (trajectories).
//
// Error policy: a failing task is recorded in its report entry with
// status "error" and the failure message; remaining tasks still run and the
// report is marked partial.
//
// Randomness policy: every random draw flows from the single run seed
// through a stream named after the task's content (kind and parameters), so
// adding, removing, or permuting other tasks never changes a task's draws.

#include <chrono>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "tphase/autocorrelation.hpp"
#include "tphase/effective_gauge.hpp"
#include "tphase/errors.hpp"
#include "tphase/evolve.hpp"
#include "tphase/fields.hpp"
#include "tphase/matrix.hpp"
#include "tphase/phase.hpp"
#include "tphase/precession.hpp"
#include "tphase/report.hpp"
#include "tphase/rng.hpp"
#include "tphase/scenario.hpp"
#include "tphase/spinor.hpp"

namespace tphase {

struct RunOutcome {
  nlohmann::json report;
  bool all_ok = true;
  std::vector<std::string> sidecar_files;  // relative to the output directory
};

namespace detail {

// Shortest decimal form that round-trips a double, for CSV cells.
inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0.0;
  std::sscanf(buf, "%lg", &back);
  if (back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char probe[32];
      std::snprintf(probe, sizeof probe, "%.*g", prec, v);
      std::sscanf(probe, "%lg", &back);
      if (back == v) return probe;
    }
  }
  return buf;
}

inline nlohmann::json vec3_json(const Vec3& v) {
  return nlohmann::json{{"x", v.x}, {"y", v.y}, {"z", v.z}};
}

// 2x2 complex matrix as row-major [re, im] pairs.
inline nlohmann::json mat2_json(const Mat2& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 2; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 2; ++c)
      row.push_back(nlohmann::json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json phase_breakdown_json(const PhaseBreakdown& b) {
  return nlohmann::json{
      {"ac_spatial", b.ac_spatial},
      {"ac_relativistic", b.ac_relativistic},
      {"sab_temporal", b.sab_temporal},
      {"sab_relativistic", b.sab_relativistic},
      {"total", b.total()},
      {"quadrature_error", b.quadrature_error},
      {"evaluations", b.evaluations},
  };
}

inline nlohmann::json condition_report_json(const ConditionReport& r) {
  return nlohmann::json{
      {"condition", r.condition},
      {"passed", r.passed},
      {"worst_value", r.worst_value},
      {"worst_point",
       {{"t", r.worst_point.t}, {"position", vec3_json(r.worst_point.r)}}},
      {"points_checked", r.points_checked},
      {"tolerance", r.tolerance},
  };
}

struct TaskContext {
  const Scenario& scenario;
  const RunOptions& options;
  std::vector<std::string>* sidecars;
  std::shared_ptr<const EmField> field;  // null when no field block present

  std::shared_ptr<const EmField> require_field() const {
    if (!field) throw Error("task requires a field block");
    return field;
  }
};

inline void run_phase_task(const TaskContext& ctx, const PhaseTask& t, nlohmann::json& entry) {
  const Scenario& s = ctx.scenario;
  const PathSpec* spec = s.find_path(t.path);
  if (spec == nullptr) throw Error("no path named '" + t.path + "'");
  const SpacetimePath path = spec->build();
  const PolarizedParticle particle = s.particle.particle();
  const auto field = ctx.require_field();
  PhaseOptions opt;
  opt.abs_tol = t.abs_tol;

  entry["which"] = t.which;
  entry["path"] = t.path;
  if (t.which == "open") {
    entry["phase"] = phase_breakdown_json(open_path_phase(*field, particle, path, opt));
  } else if (t.which == "ac") {
    entry["phase"] = phase_breakdown_json(
        ac_phase(*field, particle.moment, particle.polarization, t.velocity, path, opt));
  } else if (t.which == "sab") {
    entry["phase"] =
        phase_breakdown_json(sab_phase(*field, particle.moment, particle.polarization, path, opt));
  } else if (t.which == "flux") {
    EffectivePotential potential(field, particle, SpinModel::rest);
    entry["flux_phase"] =
        surface_flux_phase(potential, particle.moment, path.spatial(), path.time(0.0));
  } else {
    throw Error("unknown phase variant: " + t.which);
  }
}

inline void run_conditions_task(const TaskContext& ctx, const ConditionsTask& t,
                                nlohmann::json& entry) {
  RegionSpec region;
  region.center = t.center;
  region.half_extent = t.half_extent;
  region.samples_per_axis = t.samples;
  region.axis_point = t.axis_point;
  region.axis_direction = t.axis_direction;
  region.rho_min = t.rho_min;
  region.rho_max = t.rho_max;

  const auto field = ctx.require_field();
  const Vec3 shat = normalized(ctx.scenario.particle.polarization);
  std::vector<ConditionReport> reports;
  if (t.mode == "ac") {
    reports = check_ac_conditions(*field, shat, region, t.time, t.tolerance);
  } else if (t.mode == "sab") {
    reports = {check_sab_condition(*field, shat, region, t.time, t.tolerance)};
  } else {
    throw Error("unknown conditions mode: " + t.mode);
  }

  bool all = true;
  nlohmann::json checks = nlohmann::json::array();
  for (const ConditionReport& r : reports) {
    all = all && r.passed;
    checks.push_back(condition_report_json(r));
  }
  entry["mode"] = t.mode;
  entry["checks"] = checks;
  entry["all_passed"] = all;
}

inline void run_evolve_task(const TaskContext& ctx, const EvolveTask& t,
                            nlohmann::json& entry) {
  InterferometryParams p;
  p.geom.nx = t.grid;
  p.geom.ny = t.grid;
  p.geom.spacing = 2.0 * t.extent / t.grid;
  p.sigma0 = t.sigma0;
  p.momentum = t.momentum;
  p.source = t.source;
  p.waypoint = t.waypoint;
  p.drain = t.drain;
  p.dt = t.dt;

  const InterferometryResult r =
      interferometric_phase(ctx.require_field(), ctx.scenario.particle.particle(), p);
  entry["phase"] = r.phase;
  entry["loop_reference"] = r.loop_reference;
  entry["discrepancy"] = r.discrepancy;
  entry["overlap_magnitude"] = r.overlap_magnitude;
  entry["steps_per_leg"] = r.steps_per_leg;
  entry["grid"] = t.grid;
}

template <class Task>
auto make_spin_driver(const TaskContext& ctx, const Task& t) {
  const PolarizedParticle particle = ctx.scenario.particle.particle();
  const auto field = ctx.require_field();
  struct Holder {
    std::shared_ptr<AppliedFieldDriver> applied;
    std::shared_ptr<EffectiveFieldDriver> effective;
  } h;
  if (t.driver == "applied") {
    h.applied = std::make_shared<AppliedFieldDriver>(particle.moment, field, t.position);
  } else if (t.driver == "effective") {
    h.effective = std::make_shared<EffectiveFieldDriver>(particle, field, t.start, t.velocity);
  } else {
    throw Error("unknown driver: " + t.driver);
  }
  return h;
}

inline std::string write_trajectory_csv(const TaskContext& ctx, std::size_t task_index,
                                        const std::vector<SpinState>& traj) {
  const std::string name = "task" + std::to_string(task_index) + "_precession.csv";
  std::string body = "time,sigma_x,sigma_y,sigma_z\n";
  for (const SpinState& s : traj) {
    body += csv_number(s.time);
    body += ',';
    body += csv_number(s.sigma.x);
    body += ',';
    body += csv_number(s.sigma.y);
    body += ',';
    body += csv_number(s.sigma.z);
    body += '\n';
  }
  if (ctx.options.write_sidecars) {
    write_text_file(ctx.options.out_dir + "/" + name, body);
    ctx.sidecars->push_back(name);
  }
  return name;
}

inline void run_precession_task(const TaskContext& ctx, const PrecessionTask& t,
                                std::size_t task_index, nlohmann::json& entry) {
  const auto driver = make_spin_driver(ctx, t);
  PrecessionOptions opt;
  opt.dt = t.dt;
  opt.steps = t.steps;
  opt.record_every = t.record_every;
  const SpinState initial{t.t0, normalized(t.initial)};

  const std::vector<SpinState> traj = driver.applied
                                          ? precess(initial, *driver.applied, opt)
                                          : precess(initial, *driver.effective, opt);

  entry["driver"] = t.driver;
  entry["samples"] = traj.size();
  entry["final_time"] = traj.back().time;
  entry["sigma_final"] = vec3_json(traj.back().sigma);
  entry["sigma_initial"] = vec3_json(initial.sigma);
  entry["trajectory_csv"] = write_trajectory_csv(ctx, task_index, traj);
}

inline void run_autocorrelation_task(const TaskContext& ctx, const AutocorrelationTask& t,
                                     nlohmann::json& entry) {
  const auto driver = make_spin_driver(ctx, t);
  const Vec3 state = normalized(t.state);
  const AutocorrelationResult r =
      driver.applied ? autocorrelation(*driver.applied, state, t.t_i, t.t_f)
                     : autocorrelation(*driver.effective, state, t.t_i, t.t_f);

  double max_comm = 0.0;
  nlohmann::json norms = nlohmann::json::array();
  for (int a = 0; a < 3; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int b = 0; b < 3; ++b) {
      row.push_back(r.commutator_norms[a][b]);
      max_comm = std::max(max_comm, r.commutator_norms[a][b]);
    }
    norms.push_back(row);
  }

  entry["driver"] = t.driver;
  entry["t_i"] = r.t_i;
  entry["t_f"] = r.t_f;
  entry["state"] = vec3_json(state);
  entry["c_op"] = mat2_json(r.c_op);
  entry["s_op"] = mat2_json(r.s_op);
  entry["flip_plus"] = mat2_json(r.flip_plus);
  entry["flip_minus"] = mat2_json(r.flip_minus);
  entry["c_expectation"] = r.c_expectation;
  entry["s_expectation"] = r.s_expectation;
  entry["symmetrized_residual_norm"] = frobenius_norm(r.symmetrized_residual);
  entry["commutator_norms"] = norms;
  entry["max_commutator_norm"] = max_comm;
  entry["steps_used"] = r.steps_used;
}

inline void run_identity_checks_task(const TaskContext& ctx, const IdentityChecksTask& t,
                                     nlohmann::json& entry) {
  const PolarizedParticle base = ctx.scenario.particle.particle();
  FieldSample scale{};
  if (ctx.field) scale = ctx.field->sample({0.0, Vec3{}});
  const FieldTensor f_base = assemble_field_tensor(scale.electric, scale.magnetic);

  // Content-named stream: permuting or adding other tasks never changes
  // these draws, and identical tasks draw identically.
  const std::uint64_t seed =
      RngStream(ctx.options.seed, "identity_checks:trials=" + std::to_string(t.trials))
          .next_u64();
  const IdentityReport r = verify_bilinear_identities(base, f_base, t.trials, seed);

  entry["trials"] = r.trials;
  entry["stream_seed"] = r.seed;
  entry["residuals"] = {
      {"kinetic_on_shell", r.kinetic_on_shell},
      {"kinetic_off_shell", r.kinetic_off_shell},
      {"kinetic_projected", r.kinetic_projected},
      {"interaction_on_shell", r.interaction_on_shell},
      {"interaction_off_shell", r.interaction_off_shell},
      {"interaction_projected", r.interaction_projected},
  };
  entry["max_residual"] = r.max_residual;
}

}  // namespace detail

// Execute every task of a validated scenario in declaration order and
// assemble the report.  Individual task failures are recorded and execution
// continues; `all_ok` is false and the report is marked partial when any
// task failed.
inline RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options = {}) {
  RunOutcome out;
  out.report = report_skeleton(scenario.name, scenario.source_text, options);

  detail::TaskContext ctx{scenario, options, &out.sidecar_files, nullptr};
  if (scenario.has_field) ctx.field = scenario.field.build();

  nlohmann::json timings = nlohmann::json::object();
  for (std::size_t i = 0; i < scenario.tasks.size(); ++i) {
    const TaskSpec& task = scenario.tasks[i];
    nlohmann::json entry;
    entry["index"] = i;
    entry["kind"] = task.kind;
    const auto t_start = std::chrono::steady_clock::now();
    try {
      if (task.kind == "phase") detail::run_phase_task(ctx, task.phase, entry);
      else if (task.kind == "conditions") detail::run_conditions_task(ctx, task.conditions, entry);
      else if (task.kind == "evolve") detail::run_evolve_task(ctx, task.evolve, entry);
      else if (task.kind == "precession")
        detail::run_precession_task(ctx, task.precession, i, entry);
      else if (task.kind == "autocorrelation")
        detail::run_autocorrelation_task(ctx, task.autocorrelation, entry);
      else if (task.kind == "identity_checks")
        detail::run_identity_checks_task(ctx, task.identity_checks, entry);
      else throw Error("unknown task kind: " + task.kind);
      entry["status"] = "ok";
    } catch (const std::exception& e) {
      entry["status"] = "error";
      entry["error"] = e.what();
      out.all_ok = false;
    }
    const auto t_end = std::chrono::steady_clock::now();
    timings["task" + std::to_string(i)] =
        std::chrono::duration<double, std::milli>(t_end - t_start).count();
    out.report["tasks"].push_back(std::move(entry));
  }

  out.report["partial"] = !out.all_ok;
  if (!options.normalized) out.report["timings"] = std::move(timings);
  return out;
}

}  // namespace tphase
