#pragma once

#include "heisencorr/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>

namespace heisencorr {

/// Version string recorded in manifests.
std::string library_version();

enum class Stage { ground, corr_tdse, corr_free, corr_model, corr_vv, fit, oracle, all };

std::string to_string(Stage s);
/// Accepts the subcommand spelling, e.g. "corr-tdse".
Stage parse_stage(const std::string& s);

/// Exit status of a pipeline run.
enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_config = 2,
  exit_numerical = 3,
  exit_missing_artifact = 4,
};

/// Maps an exception thrown by a stage to its exit code.
int exit_code_for(const std::exception& e);

/// `manifest.json` in the output directory. Stages merge their entries into
/// whatever an earlier invocation left there, so resumed runs keep a single
/// manifest covering every artifact.
class RunManifest {
 public:
  explicit RunManifest(std::filesystem::path dir);

  /// Reads an existing manifest; absent or unreadable files start empty.
  static RunManifest load(const std::filesystem::path& dir);

  void set_config(const RunConfig& cfg);
  void record_stage(const std::string& stage, double wall_seconds);
  void set_diagnostic(const std::string& key, nlohmann::json value);
  /// Registers an input or output file; the digest is taken on save.
  void add_file(const std::filesystem::path& path);

  /// Rehashes every registered file and writes manifest.json.
  void save();

  /// True when every recorded digest matches the file on disk.
  bool verify() const;

  const nlohmann::json& json() const { return doc_; }
  std::filesystem::path path() const { return dir_ / "manifest.json"; }

 private:
  std::filesystem::path dir_;
  nlohmann::json doc_;
};

/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

/// Runs one stage (or all of them in order) and writes its artifacts to
/// cfg.dir. Throws ConfigError, NumericalFailure or MissingArtifact.
void execute_stage(const RunConfig& cfg, Stage stage, std::ostream& log);

/// execute_stage with errors reported to `log` and mapped to an exit code.
int run_pipeline(const RunConfig& cfg, Stage stage, std::ostream& log);

}  // namespace heisencorr
