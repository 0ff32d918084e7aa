#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hardy/errors.hpp"

namespace {

using hardy::cli::json;

struct Options {
  std::string config_path;
  std::optional<int> truncation;
  std::optional<std::uint64_t> seed;
  std::optional<double> tau_rank, tau_orth, tau_res, tau_angle;
  std::string out_path;
  bool dump = false;
  std::optional<int> m_max;
  std::optional<int> trials;
  std::optional<std::string> phi;
  bool exploratory = false;
  bool json_stdout = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON config file");
  sub->add_option("--truncation", o.truncation, "working order (>= 32)");
  sub->add_option("--seed", o.seed, "random seed (default: config, then HARDY_PERTURB_SEED, then 1)");
  sub->add_option("--out", o.out_path, "write the JSON report here instead of stdout");
  sub->add_flag("--dump-matrices", o.dump, "write matrices as CSV next to the report");
  sub->add_option("--tau-rank", o.tau_rank, "relative singular value cutoff");
  sub->add_option("--tau-orth", o.tau_orth, "orthonormality tolerance");
  sub->add_option("--tau-res", o.tau_res, "residual tolerance");
  sub->add_option("--tau-angle", o.tau_angle, "principal angle tolerance");
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw hardy::ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw hardy::ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

std::string dump_prefix(const std::string& out_path) {
  if (out_path.empty()) return "hardy";
  const auto dot = out_path.find_last_of('.');
  const auto slash = out_path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return out_path.substr(0, dot);
  }
  return out_path;
}

int emit(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return 0;
  }
  std::ofstream out(path);
  if (!out) {
    std::cerr << "hardy-perturb: cannot write '" << path << "'\n";
    return 1;
  }
  out << body;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-rank analytic perturbations of the unilateral shift"};
  app.set_version_flag("--version", hardy::cli::version());
  app.require_subcommand(1);
  Options o;

  const std::vector<std::pair<std::string, std::vector<std::string>>> groups = {
      {"shift", {"build", "verify", "powers"}},
      {"subspace", {"build", "check", "extract", "cyclic", "codim"}},
      {"commutant", {"element", "hyper", "irreducible"}},
      {"analyze", {"normality"}},
      {"demo", {"paper"}},
  };
  std::string group, action;
  for (const auto& [g, actions] : groups) {
    CLI::App* gc = app.add_subcommand(g, g + " commands");
    gc->require_subcommand(1);
    for (const auto& a : actions) {
      CLI::App* ac = gc->add_subcommand(a);
      add_common(ac, o);
      if (g == "shift" && a == "powers") ac->add_option("--m-max", o.m_max, "largest power");
      if (g == "commutant" && a == "element") {
        ac->add_option("--phi", o.phi, "symbol coefficients, e.g. \"1,0,1\" or \"1:0.5,2\"");
      }
      if (g == "commutant" || (g == "demo" && a == "paper")) {
        ac->add_option("--trials", o.trials, "number of random samples");
      }
      if (g == "subspace" && a == "cyclic") {
        ac->add_flag("--exploratory", o.exploratory, "allow n > 1 (Krylov comparison only)");
      }
      if (g == "demo") ac->add_flag("--json", o.json_stdout, "print the JSON report, not the table");
      ac->callback([&group, &action, g, a] {
        group = g;
        action = a;
      });
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hardy::cli::kExitConfigError;
  }

  const std::string command = group + " " + action;
  hardy::cli::CommandResult result;
  try {
    hardy::cli::RunConfig cfg =
        hardy::cli::resolve_config(read_config(o.config_path), o.truncation, o.seed, o.tau_rank,
                                   o.tau_orth, o.tau_res, o.tau_angle);
    cfg.m_max = o.m_max ? o.m_max : cfg.m_max;
    cfg.trials = o.trials ? o.trials : cfg.trials;
    cfg.phi = o.phi;
    cfg.exploratory = o.exploratory;
    cfg.dump_matrices = o.dump;
    cfg.dump_prefix = dump_prefix(o.out_path);
    cfg.json_stdout = o.json_stdout;
    result = hardy::cli::run_command(group, action, cfg);
  } catch (const hardy::Error& e) {
    result.report = hardy::cli::error_report(command, e.kind(), e.what());
    result.exit_code = hardy::cli::kExitConfigError;
  }

  if (result.report.contains("error")) {
    std::cerr << "hardy-perturb " << command << ": " << result.report["error"]["message"].get<std::string>()
              << "\n";
  }
  for (const auto& [file, body] : result.dumps) {
    if (emit(file, body) != 0) return hardy::cli::kExitCheckFailed;
  }
  const std::string body = result.report.dump(2) + "\n";
  if (group == "demo" && !o.json_stdout) {
    std::cout << result.text;
    if (!o.out_path.empty() && emit(o.out_path, body) != 0) return hardy::cli::kExitCheckFailed;
  } else if (emit(o.out_path, body) != 0) {
    return hardy::cli::kExitCheckFailed;
  }
  return result.exit_code;
}
