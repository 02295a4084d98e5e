#pragma once

// Report document plumbing: the JSON skeleton every scenario run fills in,
// the scenario content hash, and file output helpers.
//
// Reports are deterministic by construction: keys serialize in sorted order,
// numbers round-trip through the shortest exact representation, and the
// normalized mode drops the only nondeterministic section (wall-clock
// timings) so that identical scenario text and seed produce byte-identical
// documents.

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tphase/errors.hpp"
#include "tphase/rng.hpp"
#include "tphase/version.hpp"

namespace tphase {

struct RunOptions {
  std::uint64_t seed = 0;
  bool normalized = false;     // omit wall-clock timings from the report
  std::string out_dir = ".";   // where sidecar data files are written
  bool write_sidecars = true;  // disable to keep a run purely in memory
};

// Content hash of the scenario text, stable across platforms.
inline std::string scenario_hash(std::string_view text) {
  const std::uint64_t h = fnv1a64(text);
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// The numeric conventions every reported value is expressed in.  Recorded in
// full so a report is interpretable without the toolkit at hand.
inline nlohmann::json conventions_json() {
  return nlohmann::json{
      {"units", "natural: hbar = c = 1"},
      {"metric_signature", "+---"},
      {"levi_civita", "epsilon^{0123} = +1"},
      {"potential_pair", "a0 = s.B, a = s x E - s0 B"},
      {"phase_functional", "phi = mu * loop-integral(a . dr - a0 dt)"},
      {"precession", "dsigma/dt = 2 mu sigma x B"},
  };
}

inline nlohmann::json report_skeleton(const std::string& scenario_name,
                                      std::string_view scenario_text, const RunOptions& opt) {
  nlohmann::json doc;
  doc["version"] = kVersion;
  doc["scenario"] = {{"name", scenario_name}, {"hash", scenario_hash(scenario_text)}};
  doc["seed"] = opt.seed;
  doc["conventions"] = conventions_json();
  doc["partial"] = false;
  doc["tasks"] = nlohmann::json::array();
  return doc;
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

// Render the report with a fixed layout: 2-space indent and a trailing
// newline.  Every byte of the output is a function of the document alone.
inline std::string render_report(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

}  // namespace tphase
