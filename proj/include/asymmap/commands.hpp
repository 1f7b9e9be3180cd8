#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "asymmap/config.hpp"

namespace asymmap {

/// Process exit codes of the command front end.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNoConvergence = 2, kExitGate = 3, kExitInternal = 4 };

struct CommandResult {
  nlohmann::json canonical;  ///< deterministic payload
  std::string csv;           ///< tabular form, where the command has one
  int exit_code = kExitOk;
};

CommandResult cmd_predict(const RunConfig& cfg, std::size_t threads = 1);
CommandResult cmd_tune(const RunConfig& cfg, std::size_t threads = 1);
CommandResult cmd_rt(const RunConfig& cfg, std::size_t threads = 1);
CommandResult cmd_sweep(const RunConfig& cfg, std::size_t threads = 1);
CommandResult cmd_validate(const RunConfig& cfg, std::size_t threads = 1);

struct CommandOptions {
  std::string command;  ///< predict, sweep, rt, validate or tune
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  std::optional<std::string> format;  ///< json or csv
};

/// Loads the config, runs the command and writes its output (json: a
/// {"canonical", "meta"} document; csv: the table) to the output path or
/// `out`. Errors go to `err`. Returns the exit code.
int run_command(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Throws InternalError naming the first non-finite or null number.
void check_finite(const nlohmann::json& j, const std::string& path = "");

}  // namespace asymmap
