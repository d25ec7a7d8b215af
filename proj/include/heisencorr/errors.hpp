#pragma once

#include <stdexcept>
#include <string>

namespace heisencorr {

/// Malformed or inconsistent run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A numerical guard tripped, e.g. excessive absorber loss (exit code 3).
struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A pipeline stage needs an artifact that has not been produced (exit code 4).
struct MissingArtifact : std::runtime_error {
  explicit MissingArtifact(const std::string& what)
      : std::runtime_error("missing artifact: " + what), artifact(what) {}
  std::string artifact;
};

/// The selected rate provider has no formula available.
struct UnimplementedProvider : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace heisencorr
