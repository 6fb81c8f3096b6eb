#pragma once

// Subcommands of the cavfb front end. Each command maps a resolved JSON
// config to in-memory output files, so runs can be compared byte for byte
// without touching the disk.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cavfb::cli {

enum ExitCode : int { kOk = 0, kConfig = 2, kNumerical = 3, kTruncation = 4 };

/// Invalid or out-of-range parameter; the message names the parameter.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Artifact {
  std::string path;
  std::string content;
};

struct RunResult {
  int exit_code = kOk;
  std::string message;
  std::vector<Artifact> artifacts;
};

/// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Defaults of a command, including the output path.
nlohmann::json default_config(const std::string& command);

/// Reads a config file. A sidecar written by a previous run is accepted too;
/// its "config" member is used.
nlohmann::json load_config_file(const std::string& path);

/// defaults <- file <- overrides, with unknown keys rejected.
nlohmann::json resolve_config(const std::string& command, const nlohmann::json& file, const nlohmann::json& overrides);

/// Runs a command on a resolved config. Library errors are mapped to exit
/// codes; outputs produced before an invariant failure are still returned.
RunResult run_command(const std::string& command, const nlohmann::json& config);

/// Writes every artifact to disk.
void write_artifacts(const RunResult& result);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace cavfb::cli
