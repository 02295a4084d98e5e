// Command-line experiment runner.
//
//   tphase run <file> [--out DIR] [--seed N] [--normalized-report]
//   tphase validate <file>
//   tphase list-scenarios [--dir DIR]
//
// Exit codes: 0 success, 1 validation failure, 2 runtime task failure,
// 3 I/O failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tphase/report.hpp"
#include "tphase/runner.hpp"
#include "tphase/scenario.hpp"
#include "tphase/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitTaskFailure = 2;
constexpr int kExitIo = 3;

int run_command(const std::string& file, const std::string& out_dir, std::uint64_t seed,
                bool normalized) {
  using namespace tphase;
  std::string text;
  try {
    text = read_file_text(file);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }

  const ScenarioParse parsed = parse_scenario_text(text, scenario_name_from_filename(file));
  if (!parsed.ok()) {
    for (const Diagnostic& d : parsed.diagnostics)
      std::fprintf(stderr, "%s\n", d.format().c_str());
    return kExitValidation;
  }

  RunOptions options;
  options.seed = seed;
  options.normalized = normalized;
  options.out_dir = out_dir;

  try {
    std::filesystem::create_directories(out_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: cannot create output directory %s: %s\n", out_dir.c_str(),
                 e.what());
    return kExitIo;
  }

  RunOutcome outcome;
  try {
    outcome = run_scenario(parsed.scenario, options);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }

  for (const auto& entry : outcome.report["tasks"]) {
    const std::string status = entry["status"];
    std::printf("task %d %s: %s", entry["index"].get<int>(),
                entry["kind"].get<std::string>().c_str(), status.c_str());
    if (status == "error") std::printf(" (%s)", entry["error"].get<std::string>().c_str());
    std::printf("\n");
  }

  const std::string report_path = out_dir + "/report.json";
  try {
    write_text_file(report_path, render_report(outcome.report));
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  std::printf("report written: %s\n", report_path.c_str());
  for (const std::string& f : outcome.sidecar_files)
    std::printf("sidecar written: %s/%s\n", out_dir.c_str(), f.c_str());

  return outcome.all_ok ? kExitOk : kExitTaskFailure;
}

int validate_command(const std::string& file) {
  using namespace tphase;
  std::string text;
  try {
    text = read_file_text(file);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  const ScenarioParse parsed = parse_scenario_text(text, scenario_name_from_filename(file));
  for (const Diagnostic& d : parsed.diagnostics)
    std::printf("%s\n", d.format().c_str());
  return parsed.ok() ? kExitOk : kExitValidation;
}

int list_scenarios_command(const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    std::fprintf(stderr, "error: not a directory: %s\n", dir.c_str());
    return kExitIo;
  }
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".scn")
      names.push_back(e.path().stem().string());
  }
  if (ec) {
    std::fprintf(stderr, "error: cannot list %s: %s\n", dir.c_str(), ec.message().c_str());
    return kExitIo;
  }
  std::sort(names.begin(), names.end());
  for (const std::string& n : names) std::printf("%s\n", n.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topological phase scenario runner"};
  app.set_version_flag("--version", std::string(tphase::kVersion));
  app.require_subcommand(1);

  std::string run_file, out_dir = ".", validate_file, list_dir = "./scenarios";
  std::uint64_t seed = 0;
  bool normalized = false;

  CLI::App* run = app.add_subcommand("run", "Execute a scenario and write its report");
  run->add_option("file", run_file, "scenario file")->required();
  run->add_option("--out", out_dir, "output directory for the report and data files");
  run->add_option("--seed", seed, "seed for every random draw in the run");
  run->add_flag("--normalized-report", normalized,
                "omit wall-clock timings so reports are byte-reproducible");

  CLI::App* validate = app.add_subcommand("validate", "Check a scenario without running it");
  validate->add_option("file", validate_file, "scenario file")->required();

  CLI::App* list = app.add_subcommand("list-scenarios", "List scenario files in a directory");
  list->add_option("--dir", list_dir, "directory to scan (default ./scenarios)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  if (run->parsed()) return run_command(run_file, out_dir, seed, normalized);
  if (validate->parsed()) return validate_command(validate_file);
  if (list->parsed()) return list_scenarios_command(list_dir);
  return kExitValidation;
}
