#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "bellquad/joint_construction.hpp"

namespace bellquad::cli {

using Json = nlohmann::ordered_json;

enum class Mode { probs, construct3, construct4, chsh, oracle, sweep, mc_verify };

/// Parses "probs", "construct3", ..., "mc-verify". Throws UsageError.
Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

struct RunConfig {
  Mode mode = Mode::probs;
  std::string input_path;
  std::optional<std::string> params_path;
  std::uint64_t seed = 0;
  std::uint64_t samples = 1000000;
  /// Grid points per free parameter in sweep mode.
  int grid = 5;
  /// Number of experiments (3 or 4) for sweep and mc-verify.
  int experiments = 4;
  /// Overrides the CHSH / LP decision tolerance.
  std::optional<double> tolerance;

  /// Throws UsageError for an out-of-range field.
  void validate() const;
};

/// A finished run: the process exit code and the JSON report. Failed runs
/// still produce a report with an "error" object.
struct RunOutcome {
  int exit_code = 0;
  Json report;
};

/// Runs a command on already-loaded input text. `params_text`, when given,
/// takes precedence over a "params" object inside the input.
RunOutcome run_text(const RunConfig& config, const std::string& input_text,
                    const std::optional<std::string>& params_text = std::nullopt);

/// Reads config.input_path (and config.params_path) and runs the command.
RunOutcome run(const RunConfig& config);

/// Two-space indented JSON followed by a newline.
std::string render(const Json& report);

/// Uniform double in [0,1) from the top 53 bits of a 64-bit draw.
inline double unit_uniform(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Index of the first cumulative weight strictly above u. `cumulative` is
/// nondecreasing; its last element is treated as covering the rest of [0,1).
int inverse_cdf(const std::array<double, 16>& cumulative, double u) noexcept;

}  // namespace bellquad::cli
