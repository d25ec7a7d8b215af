#pragma once

#include "heisencorr/compare.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <string>

namespace heisencorr {

/// Run configuration. Every field maps to a `section.key` entry of the
/// config file; see parse_config.
struct RunConfig {
  // [pulse]
  double e0 = 0.06;
  double omega = 0.057;  // required in the file
  double n_cycles = 1.0;
  // [grid]
  double dr = 0.1;
  double rmax = 240.0;
  int lmax = 16;
  double absorber_fraction = 0.2;
  int fd_order = 6;
  // [time]
  double dt = 0.02;
  int n_t = 64;
  int order = 2;
  // [potential]
  std::string variant = "coulomb";
  double z = 1.0;
  double ohm = 1.0;
  /// Potential whose ground state starts the run; "auto" uses the variant,
  /// except that a free particle starts from the Coulomb ground state.
  std::string initial = "auto";
  // [model]
  std::string rate = "quasistatic";
  std::string rate_file;
  std::optional<double> c;  // empty: fit against the TDSE result
  std::string ordering = "printed";
  int rate_substeps = 256;
  // [fit]
  std::string objective = "frobenius_re";
  // [corr]
  double max_norm_loss = 0.05;
  bool direct_velocity = false;
  // [output]
  std::string dir = "out";
  // [run]
  bool seedless = true;
  int jobs = 1;

  /// Keys that were not given explicitly.
  std::set<std::string> defaulted;

  /// Values only; `defaulted` is bookkeeping.
  bool operator==(const RunConfig& o) const;

  PulseParams pulse() const;
  RadialGrid grid() const;
  PotentialSpec potential() const;
  PotentialSpec initial_potential() const;
  TimeGrid time_grid() const;
  PropagatorOptions propagator_options() const;
  CorrelationOptions correlation_options() const;
  RateProvider rate_provider() const;
  ModelOrdering model_ordering() const { return parse_ordering(ordering); }
  FitObjective fit_objective() const { return parse_objective(objective); }

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// All recognised keys, in file order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value; `where` prefixes error messages.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where);

/// Parses a sectioned key = value file (a TOML subset): `[section]` headers,
/// `key = value` lines, `section.key = value` also accepted, `#` comments.
/// Unknown keys, malformed values and a missing pulse.omega are ConfigErrors.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>",
                            bool require_omega = true);

/// Canonical text form; parse_config_text(emit_config(c)) == c.
std::string emit_config(const RunConfig& cfg);

/// Flat key -> value object for metadata echoes.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace heisencorr
