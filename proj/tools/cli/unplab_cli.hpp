#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "unplab/serialize.hpp"

namespace unplab::cli {

enum ExitCode : int { exit_ok = 0, exit_violation = 1, exit_hypothesis_unmet = 2, exit_usage = 64 };

struct Options {
  std::string subcommand;
  std::optional<std::string> config_path;
  std::optional<std::string> preset;
  std::optional<std::string> out;
  std::uint64_t seed = 0;
  std::string format = "json";          // json | csv
  std::optional<double> tolerance;      // overrides the default slack tolerance
};

struct Result {
  int exit_code = exit_ok;
  std::string body;                     // in the requested format
  std::optional<std::string> companion; // per-round CSV next to a JSON transcript
  std::string summary;                  // one line for stderr
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"entropy", "extract", "design", "reconstruct", "chain", "ocl-sim"};
  return names;
}

// Built-in configurations for each subcommand.
std::vector<std::string> preset_names(const std::string& subcommand);
json preset_config(const std::string& subcommand, const std::string& name);

Result cmd_entropy(const json& config, const Options& opts);
Result cmd_extract(const json& config, const Options& opts);
Result cmd_design(const json& config, const Options& opts);
Result cmd_reconstruct(const json& config, const Options& opts);
Result cmd_chain(const json& config, const Options& opts);
Result cmd_ocl_sim(const json& config, const Options& opts);

// Resolves presets, dispatches, and maps malformed input to exit 64.
Result run(const Options& opts, const std::optional<json>& file_config);

// Full command-line entry point; writes --out files itself.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace unplab::cli
