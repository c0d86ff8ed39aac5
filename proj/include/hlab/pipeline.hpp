#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "hlab/inequality.hpp"
#include "hlab/scenario.hpp"

namespace hlab {

const char* artifact_version();

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitSolver = 3 };

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  bool dump_fields = false;
  bool dump_surfaces = false;
  double tolerance_scale = 1.0;
  /// Off for in-process callers that only want the manifest.
  bool write_files = true;
};

struct CheckOutcome {
  VerificationReport report;
  /// Whether the outcome decides the exit status.
  bool gating = true;
};

struct RunManifest {
  std::string scenario;
  /// FNV-1a of the canonical config plus the tolerance scale, hex.
  std::string config_hash;
  std::string version;
  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::string> files;
  std::vector<CheckOutcome> checks;
  /// Dirichlet-lemma faces skipped because u varies along them.
  std::vector<std::string> skipped;
  nlohmann::ordered_json solver;
  bool pass = false;

  int exit_code() const { return pass ? kExitPass : kExitCheckFailed; }
  const CheckOutcome* find(const std::string& name) const;
};

std::string config_hash(const ScenarioConfig& cfg, double tolerance_scale);

/// Full pipeline on a parsed config. Throws ConfigError, MetricError or
/// SolverError; check failures are reported in the manifest.
RunManifest run_scenario(const ScenarioConfig& cfg, const RunOptions& opt);

/// Deterministic CSV with one row per check.
std::string summary_csv(const RunManifest& m);
nlohmann::ordered_json report_json(const RunManifest& m, const ScenarioConfig& cfg);

/// Maps exceptions to exit codes and writes error.json next to the reports.
int run_command(const std::string& ref, const RunOptions& opt, std::ostream& log);

struct StudyRow {
  std::string check;
  int resolution = 0;
  double spacing = 0.0;
  double residual = 0.0;
};

struct StudyReport {
  std::vector<StudyRow> rows;
  /// Least-squares slope of log residual against log spacing per check.
  std::vector<std::pair<std::string, double>> orders;
  /// Set when a run aborted; rows hold the completed resolutions.
  std::optional<std::string> error;

  double order(const std::string& check) const;
};

/// Needs at least three strictly increasing resolutions (cells per axis).
StudyReport convergence_study(const ScenarioConfig& cfg, const std::vector<int>& resolutions,
                              const RunOptions& opt);
std::string study_csv(const StudyReport& s);
int study_command(const std::string& ref, const std::vector<int>& resolutions, const RunOptions& opt,
                  std::ostream& log);

/// Least-squares slope of log(err) against log(h).
double fitted_order(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace hlab
