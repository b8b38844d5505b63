#pragma once

// Run description loaded from a TOML file. Every section and key is optional
// except where noted; unknown keys are rejected so that typos fail loudly.

#include <fracpoint/control.hpp>
#include <fracpoint/errors.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fracpoint::app {

/// Raised for malformed or invalid configuration files. The message starts with
/// "<file>:<line>:" whenever the offending node has a known location.
class ConfigError : public ConfigurationError {
public:
  using ConfigurationError::ConfigurationError;
};

struct ModeCoefficient {
  int m = 1;
  int n = 1;
  double value = 0.0;
};

enum class ForcingPreset { zero, constant, manufactured, coefficients };

struct ForcingSpec {
  ForcingPreset preset = ForcingPreset::zero;
  /// Value of the constant preset.
  double value = 0.0;
  /// Exact state for `manufactured`, forcing modes for `coefficients`.
  std::vector<ModeCoefficient> modes;
};

enum class ControlSpaceKind { full, constant, halves };

struct RunConfig {
  std::filesystem::path source;

  double s = 0.75;
  double theta = 0.5;
  int modes = 8;
  /// Defaults to 4 K.
  std::optional<int> cells;

  double alpha = 0.1;
  double lower = -1.0;
  double upper = 1.0;

  std::string nonlinearity = "zero";
  double gamma = 1.0;

  ForcingSpec forcing;
  std::vector<PointObservation> observations;

  double tolerance = 1e-9;
  int max_iterations = 500;
  std::uint64_t seed = 12345;

  ControlSpaceKind control_space = ControlSpaceKind::full;
  /// Constant initial control, projected onto the admissible set before use.
  double initial = 0.0;

  std::filesystem::path output_dir = "out";

  /// Harness self-test: flip the sign of the Hessian fed to the Taylor tests.
  bool inject_fault = false;

  int grid() const { return cells.value_or(4 * modes); }
};

/// Parses and validates a configuration file.
RunConfig load_config(const std::filesystem::path& path);
/// Same, from an in-memory document; `source` only labels messages.
RunConfig parse_config(std::string_view text, const std::filesystem::path& source = "<config>");

/// Default manufactured state 0.2 phi_11 + 0.1 phi_22.
std::vector<ModeCoefficient> default_manufactured_state();

SpectralField to_field(const std::vector<ModeCoefficient>& modes, int K);

/// Problem data described by the config. Validated.
ControlProblem build_problem(const RunConfig& config);
/// Pi(initial) in the configured control space.
GridFunction initial_control(const RunConfig& config, const ControlProblem& prob);

}  // namespace fracpoint::app
