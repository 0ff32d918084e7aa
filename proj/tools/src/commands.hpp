#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hardy/hardy_core.hpp"

namespace hardy::cli {

using nlohmann::json;

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

struct RunConfig {
  json file = json::object();  // parsed --config contents
  int truncation = 128;
  std::uint64_t seed = 1;
  ToleranceConfig tol;
  std::optional<int> m_max;
  std::optional<int> trials;
  std::optional<std::string> phi;  // comma-separated symbol coefficients
  bool exploratory = false;
  bool dump_matrices = false;
  std::string dump_prefix = "hardy";
  bool json_stdout = false;  // demo: print JSON instead of the table
};

struct CommandResult {
  json report;
  int exit_code = kExitPass;
  std::string text;  // human-readable output (demo table), may be empty
  std::vector<std::pair<std::string, std::string>> dumps;  // file name, CSV body
};

/// Resolve truncation, seed and tolerances from flags, the config file and
/// the environment. Throws ConfigError.
RunConfig resolve_config(json file, std::optional<int> truncation, std::optional<std::uint64_t> seed,
                         const std::optional<double>& tau_rank, const std::optional<double>& tau_orth,
                         const std::optional<double>& tau_res, const std::optional<double>& tau_angle);

/// Run `group action`. Library and configuration errors become a structured
/// error report with exit code 1 or 2.
CommandResult run_command(const std::string& group, const std::string& action, const RunConfig& cfg);

/// Parse "1,0,1" or "1:0.5,0" (re:im) into coefficients.
std::vector<Complex> parse_symbol(const std::string& text);

/// Complex matrix as CSV, entries written as a+bj.
std::string to_csv(const CMatrix& m);

/// Report with the tool, version, command and config echo.
json envelope(const std::string& command, const RunConfig& cfg);

json error_report(const std::string& command, const std::string& kind, const std::string& message,
                  const std::vector<std::string>& clauses = {});

std::string version();

}  // namespace hardy::cli
