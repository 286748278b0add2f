#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lohe/verify.hpp"

namespace lohe {

/// Configuration diagnostics. `path` is a JSON pointer such as /integrator/dt.
class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownKey, TypeMismatch, InvalidValue, MissingKey };
  ConfigError(Kind kind, std::string path, const std::string& message);
  Kind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

struct VerifyBlock {
  std::optional<TheoremId> theorem;
  VerifyOptions options;
  bool operator==(const VerifyBlock&) const = default;
};

/// One-parameter grid for the sweep subcommand.
struct SweepBlock {
  std::string parameter;
  std::vector<double> values;
  bool operator==(const SweepBlock&) const = default;
};

struct SimConfig {
  SystemSpec system;
  std::vector<std::array<std::size_t, 4>> cross_ratios;
  std::string output_dir = "out";
  std::string output_format = "csv";
  std::optional<VerifyBlock> verify;
  std::optional<SweepBlock> sweep;
  bool operator==(const SimConfig&) const = default;
};

inline constexpr std::string_view kConfigVersion = "v1";

SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::string& path);
/// Canonical JSON; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SimConfig& config);

/// Theorem-specific parameter checks (kappa0 sign and so on) that turn a
/// config into a usable scenario. Throws ConfigError.
void validate_for_theorem(const SimConfig& config, TheoremId theorem);

ScenarioSpec to_scenario(const SimConfig& config, TheoremId theorem);

/// Sweepable parameter names.
std::vector<std::string> sweep_parameters();
/// Copy of `config` with one swept parameter set; throws ConfigError on unknown names.
SimConfig with_parameter(const SimConfig& config, const std::string& parameter, double value);

}  // namespace lohe
