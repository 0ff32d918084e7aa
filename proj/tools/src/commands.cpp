#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>

#include "hardy/analysis.hpp"
#include "hardy/commutants.hpp"
#include "hardy/errors.hpp"
#include "hardy/inner_functions.hpp"
#include "hardy/invariant_subspaces.hpp"
#include "hardy/json_io.hpp"
#include "hardy/shifts.hpp"
#include "reproduction.hpp"

#ifndef HARDY_VERSION
#define HARDY_VERSION "0.0.0"
#endif

namespace hardy::cli {

namespace {

namespace hj = hardy::json;

const json& section(const RunConfig& cfg, const char* key, const std::string& command) {
  if (!cfg.file.contains(key)) {
    throw ConfigError(command + " needs a '" + key + "' section in the config");
  }
  return cfg.file.at(key);
}

TruncationConfig truncation(const RunConfig& cfg) {
  return TruncationConfig::for_order(cfg.truncation);
}

// Explicit columns are assembled without throwing when `lenient`, so that a
// definition violation shows up in the validation report.
NShift load_shift(const RunConfig& cfg, const std::string& command, bool lenient = false) {
  const json& j = section(cfg, "shift", command);
  const int nw = cfg.truncation;
  if (j.contains("kernel")) return shift_from_kernel(hj::decode_kernel(j.at("kernel")), nw);
  if (j.contains("explicit")) {
    const auto cols = hj::decode_columns(j.at("explicit"));
    return lenient ? assemble_shift(cols.n, cols.columns, nw)
                   : shift_from_columns(cols.n, cols.columns, nw);
  }
  if (j.contains("example")) {
    const std::string name = j.at("example").get<std::string>();
    switch (provenance_from_string(name)) {
      case Provenance::TwoShiftExample: return rank_one_two_shift(nw);
      case Provenance::WeightedExample: return weighted_one_shift(nw);
      case Provenance::OneShiftExample: {
        const Complex a0 = j.contains("a0") ? hj::decode_complex(j.at("a0")) : Complex(1.0);
        const Complex b0 = j.contains("b0") ? hj::decode_complex(j.at("b0")) : Complex(1.0);
        return tridiagonal_one_shift(a0, b0, nw);
      }
      default: break;
    }
    throw ConfigError("unknown shift example '" + name + "'");
  }
  throw ConfigError("'shift' needs one of 'kernel', 'explicit' or 'example'");
}

struct LoadedSubspace {
  Subspace M;
  std::optional<SubspaceModel> model;
  std::optional<BuiltSubspace> built;
  std::string source;
};

bool has_subspace(const RunConfig& cfg) { return cfg.file.contains("subspace"); }

LoadedSubspace load_subspace(const RunConfig& cfg, const NShift& s, const std::string& command) {
  const json& j = section(cfg, "subspace", command);
  const TruncationConfig trunc = truncation(cfg);
  LoadedSubspace out;
  if (j.contains("model") || j.contains("theta")) {
    if (j.contains("model")) {
      out.model = hj::decode_model(j.at("model"), cfg.truncation);
      out.source = "model";
    } else {
      if (s.n != 1) throw ConfigError("'theta' subspaces are defined for n = 1 shifts only");
      out.model = one_shift_model(s, hj::decode_blaschke(j.at("theta")));
      out.source = "theta";
    }
    out.built = build_subspace(*out.model, s, cfg.tol, trunc);
    out.M = out.built->M;
    return out;
  }
  if (j.contains("krylov")) {
    const json& k = j.at("krylov");
    const auto v = hj::decode_complex_list(k.at("vector"));
    const TruncatedVector f = TruncatedVector::from_coefficients(v, cfg.truncation);
    const int depth = k.contains("depth") ? k.at("depth").get<int>()
                                          : default_krylov_depth(trunc, s.n, 0);
    out.M = krylov_closure(s.S, f, depth, cfg.tol);
    out.source = "krylov";
    return out;
  }
  if (j.contains("basis")) {
    const json& cols = j.at("basis");
    CMatrix b = CMatrix::Zero(cfg.truncation, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto v = hj::decode_complex_list(cols[c]);
      if (static_cast<int>(v.size()) > cfg.truncation) {
        throw ConfigError("basis column longer than the truncation");
      }
      for (std::size_t r = 0; r < v.size(); ++r) b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[r];
    }
    out.M = orthonormalize_columns(b, trunc.trusted_order(), cfg.tol);
    out.source = "basis";
    return out;
  }
  throw ConfigError("'subspace' needs one of 'model', 'theta', 'krylov' or 'basis'");
}

json describe_shift(const NShift& s) {
  json cols = json::array();
  const int rows = std::max(s.perturbation_degree + 1, s.n + 1);
  for (int m = 0; m < s.n; ++m) {
    CVector c = s.F.entries().col(m).head(rows);
    cols.push_back(hj::encode(c));
  }
  json j = {{"n", s.n},
            {"provenance", to_string(s.provenance)},
            {"working_order", s.working_order()},
            {"perturbation_degree", s.perturbation_degree},
            {"F_columns", cols}};
  if (s.kernel) j["kernel"] = hj::encode(*s.kernel);
  return j;
}

void dump(CommandResult& r, const RunConfig& cfg, const std::string& name, const CMatrix& m) {
  if (!cfg.dump_matrices) return;
  const std::string file = cfg.dump_prefix + "_" + name + ".csv";
  r.dumps.emplace_back(file, to_csv(m));
}

CommandResult shift_command(const std::string& action, const RunConfig& cfg, json report) {
  CommandResult r;
  const std::string cmd = "shift " + action;
  if (action == "build" || action == "verify") {
    const NShift s = load_shift(cfg, cmd, true);
    const ShiftValidation v = validate_n_shift(s);
    json res = {{"shift", describe_shift(s)}, {"validation", hj::encode(v)}};
    if (action == "verify") {
      res["rank_F"] = hj::encode(rank_diagnostics(s.F.entries(), cfg.tol));
      const int g = std::clamp(v.block_size, 1, s.working_order() - 1);
      res["gram_block"] = hj::encode(gram_block(s, g));
    }
    dump(r, cfg, "S", s.S.entries());
    dump(r, cfg, "F", s.F.entries());
    report["result"] = res;
    report["passed"] = v.passed();
    r.exit_code = v.passed() ? kExitPass : kExitCheckFailed;
  } else if (action == "powers") {
    const NShift s = load_shift(cfg, cmd);
    const int m_max = cfg.m_max.value_or(s.n + 4);
    if (m_max < 1) throw ConfigError("--m-max must be at least 1");
    const PowerIdentityReport p =
        verify_power_identities(s, m_max, truncation(cfg).trusted_order(), cfg.seed);
    const bool ok = p.max_residual() <= cfg.tol.res;
    report["result"] = {{"shift", describe_shift(s)}, {"powers", hj::encode(p)}, {"m_max", m_max}};
    report["passed"] = ok;
    r.exit_code = ok ? kExitPass : kExitCheckFailed;
  } else {
    throw ConfigError("unknown shift action '" + action + "'");
  }
  r.report = std::move(report);
  return r;
}

CommandResult subspace_command(const std::string& action, const RunConfig& cfg, json report) {
  CommandResult r;
  const std::string cmd = "subspace " + action;
  const TruncationConfig trunc = truncation(cfg);
  const NShift s = load_shift(cfg, cmd);
  json res = {{"shift", describe_shift(s)}};
  bool ok = false;
  if (action == "build" || action == "check") {
    const LoadedSubspace l = load_subspace(cfg, s, cmd);
    if (!l.model) throw ConfigError(cmd + " needs a 'model' or 'theta' subspace");
    res["model"] = hj::encode(*l.model);
    res["dimension"] = l.M.dim();
    res["invariance_residual"] = l.built->invariance_residual;
    res["check"] = hj::encode(l.built->check);
    if (action == "build") {
      res["theta_depth"] = l.built->theta_depth;
      res["wandering_dimension"] = wandering_dimension(l.M, s, cfg.tol, trunc);
      dump(r, cfg, "basis", l.M.basis());
    }
    ok = l.built->invariance_residual < cfg.tol.res && l.built->check.passed();
  } else if (action == "extract") {
    const LoadedSubspace l = load_subspace(cfg, s, cmd);
    const ExtractionReport ex = extract_model(l.M, s, cfg.tol, trunc);
    res["source"] = l.source;
    res["dimension"] = l.M.dim();
    res["model"] = hj::encode(ex.model);
    res["check"] = hj::encode(ex.check);
    res["theta_fit_residual"] = ex.theta_fit_residual;
    res["inner"] = {{"inner", ex.inner.inner},
                    {"norm_defect", ex.inner.norm_defect},
                    {"max_correlation", ex.inner.max_correlation},
                    {"lags", ex.inner.lags}};
    res["p_tail"] = ex.p_tail;
    res["q_tail"] = ex.q_tail;
    res["warnings"] = ex.warnings;
    ok = ex.check.passed();
  } else if (action == "cyclic" || action == "codim") {
    const LoadedSubspace l = load_subspace(cfg, s, cmd);
    SubspaceModel model;
    if (l.model) {
      model = *l.model;
    } else {
      model = extract_model(l.M, s, cfg.tol, trunc).model;
      res["extracted_model"] = hj::encode(model);
    }
    if (action == "cyclic") {
      const CyclicReport c = check_cyclic(l.M, model, s, cfg.tol, trunc, cfg.exploratory);
      res["cyclic"] = hj::encode(c);
      if (!model.p.empty()) res["p0_roots"] = hj::encode(model.p[0].roots());
      ok = c.verdict != "inconclusive";
    } else {
      const CodimensionReport c = finite_codimension(l.M, model, trunc);
      res["codimension"] = hj::encode(c);
      res["codimension"]["localization"] = c.localization;
      ok = c.consistent && c.conclusive;
    }
  } else {
    throw ConfigError("unknown subspace action '" + action + "'");
  }
  report["result"] = std::move(res);
  report["passed"] = ok;
  r.exit_code = ok ? kExitPass : kExitCheckFailed;
  r.report = std::move(report);
  return r;
}

Polynomial symbol_from(const RunConfig& cfg) {
  if (cfg.phi) return Polynomial(parse_symbol(*cfg.phi));
  if (cfg.file.contains("phi")) return Polynomial(hj::decode_complex_list(cfg.file.at("phi")));
  throw ConfigError("commutant element needs --phi or a 'phi' entry in the config");
}

CommandResult commutant_command(const std::string& action, const RunConfig& cfg, json report) {
  CommandResult r;
  const std::string cmd = "commutant " + action;
  const TruncationConfig trunc = truncation(cfg);
  const NShift s = load_shift(cfg, cmd);
  if (!s.kernel) throw PreconditionError(cmd + " needs a kernel-built shift");
  json res = {{"shift", describe_shift(s)}};
  bool ok = false;
  if (action == "element") {
    const Polynomial phi = symbol_from(cfg);
    const CommutantElement e = commutant_element(phi, *s.kernel, cfg.truncation, cfg.tol);
    const double comm = verify_commutation(e.X, s, trunc.trusted_order());
    json ncols = json::array();
    const int rows = std::min(cfg.truncation, phi.degree() + s.n + 2);
    for (int m = 0; m < s.n; ++m) ncols.push_back(hj::encode(CVector(e.N.entries().col(m).head(rows))));
    res["symbol"] = hj::encode(phi);
    res["commutation_residual"] = comm;
    res["n_support_defect"] = e.n_support_defect;
    res["N_columns"] = ncols;
    res["N_minus_F"] = (e.N.entries() - s.F.entries()).cwiseAbs().maxCoeff();
    dump(r, cfg, "X", e.X.entries());
    dump(r, cfg, "N", e.N.entries());
    ok = comm < cfg.tol.res && e.n_support_defect < cfg.tol.res;
  } else if (action == "hyper") {
    const LoadedSubspace l = load_subspace(cfg, s, cmd);
    const int trials = cfg.trials.value_or(50);
    const HyperinvarianceReport h =
        hyperinvariance_check(l.M, s, *s.kernel, trials, cfg.seed, cfg.tol, trunc);
    res["hyperinvariance"] = hj::encode(h);
    res["hyperinvariance"]["residuals"] = h.residuals;
    ok = h.passed;
  } else if (action == "irreducible") {
    std::vector<Subspace> family;
    if (has_subspace(cfg)) family.push_back(load_subspace(cfg, s, cmd).M);
    std::mt19937_64 rng(cfg.seed);
    const int samples = cfg.trials.value_or(5);
    for (int i = 0; i < samples; ++i) {
      const KrylovSeed k = random_krylov_seed(s, rng, 2, trunc);
      family.push_back(krylov_closure(s.S, k.f,
                                      default_krylov_depth(trunc, s.n, k.theta.degree()), cfg.tol));
    }
    const IrreducibilityReport ir = irreducibility_probe(s, family, cfg.tol, trunc);
    res["irreducibility"] = hj::encode(ir);
    res["family_size"] = family.size();
    ok = ir.irreducible;
  } else {
    throw ConfigError("unknown commutant action '" + action + "'");
  }
  report["result"] = std::move(res);
  report["passed"] = ok;
  r.exit_code = ok ? kExitPass : kExitCheckFailed;
  r.report = std::move(report);
  return r;
}

CommandResult analyze_command(const std::string& action, const RunConfig& cfg, json report) {
  if (action != "normality") throw ConfigError("unknown analyze action '" + action + "'");
  CommandResult r;
  const NShift s = load_shift(cfg, "analyze normality");
  const CommutatorReport c = self_commutator(s, cfg.tol);
  report["result"] = {{"shift", describe_shift(s)}, {"commutator", hj::encode(c)}};
  report["passed"] = c.essentially_normal;
  dump(r, cfg, "commutator", c.block);
  r.exit_code = c.essentially_normal ? kExitPass : kExitCheckFailed;
  r.report = std::move(report);
  return r;
}

CommandResult demo_command(const std::string& action, const RunConfig& cfg, json report) {
  if (action != "paper") throw ConfigError("unknown demo action '" + action + "'");
  repro::SuiteOptions opts;
  opts.truncation = cfg.truncation;
  opts.seed = cfg.seed;
  opts.tol = cfg.tol;
  if (cfg.trials) opts.property_trials = *cfg.trials;
  const auto claims = repro::run_suite(opts);
  json list = json::array();
  json failing = json::array();
  for (const auto& c : claims) {
    list.push_back(repro::to_json(c));
    if (!c.pass) failing.push_back(c.id);
  }
  CommandResult r;
  report["result"] = {{"claims", list},
                      {"failing", failing},
                      {"property_truncation", repro::property_truncation(cfg.truncation)}};
  report["passed"] = failing.empty();
  r.exit_code = failing.empty() ? kExitPass : kExitCheckFailed;
  std::ostringstream os;
  os << repro::format_table(claims);
  os << (claims.size() - failing.size()) << "/" << claims.size() << " claims pass\n";
  for (const auto& f : failing) os << "FAILED: " << f.get<std::string>() << "\n";
  r.text = os.str();
  r.report = std::move(report);
  return r;
}

std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("HARDY_PERTURB_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v, &end, 10);
  if (end == v || *end != '\0') throw ConfigError("HARDY_PERTURB_SEED is not an integer");
  return s;
}

}  // namespace

std::string version() { return HARDY_VERSION; }

RunConfig resolve_config(json file, std::optional<int> trunc_flag,
                         std::optional<std::uint64_t> seed_flag,
                         const std::optional<double>& tau_rank,
                         const std::optional<double>& tau_orth,
                         const std::optional<double>& tau_res,
                         const std::optional<double>& tau_angle) {
  if (!file.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig cfg;
  cfg.file = std::move(file);
  try {
    if (trunc_flag) {
      cfg.truncation = *trunc_flag;
    } else if (cfg.file.contains("truncation")) {
      cfg.truncation = cfg.file.at("truncation").get<int>();
    }
    if (seed_flag) {
      cfg.seed = *seed_flag;
    } else if (cfg.file.contains("seed")) {
      cfg.seed = cfg.file.at("seed").get<std::uint64_t>();
    } else if (auto e = env_seed()) {
      cfg.seed = *e;
    }
    if (cfg.file.contains("tolerances")) cfg.tol = hj::decode_tolerances(cfg.file.at("tolerances"));
    if (cfg.file.contains("m_max")) cfg.m_max = cfg.file.at("m_max").get<int>();
    if (cfg.file.contains("trials")) cfg.trials = cfg.file.at("trials").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  if (tau_rank) cfg.tol.rank = *tau_rank;
  if (tau_orth) cfg.tol.orth = *tau_orth;
  if (tau_res) cfg.tol.res = *tau_res;
  if (tau_angle) cfg.tol.angle = *tau_angle;
  if (cfg.truncation < 32) throw ConfigError("truncation must be at least 32");
  cfg.tol.validate();
  TruncationConfig::for_order(cfg.truncation).validate();
  return cfg;
}

std::vector<Complex> parse_symbol(const std::string& text) {
  std::vector<Complex> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    try {
      std::size_t used = 0;
      if (colon == std::string::npos) {
        const double re = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        out.emplace_back(re, 0.0);
      } else {
        const std::string a = tok.substr(0, colon);
        const std::string b = tok.substr(colon + 1);
        std::size_t ua = 0, ub = 0;
        const double re = std::stod(a, &ua);
        const double im = std::stod(b, &ub);
        if (ua != a.size() || ub != b.size()) throw std::invalid_argument(tok);
        out.emplace_back(re, im);
      }
    } catch (const std::logic_error&) {
      throw ConfigError("cannot parse symbol coefficient '" + tok + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty symbol");
  return out;
}

std::string to_csv(const CMatrix& m) {
  std::string out;
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g%+.17gj", m(i, k).real(), m(i, k).imag());
      if (k > 0) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

json envelope(const std::string& command, const RunConfig& cfg) {
  json effective = {{"truncation", cfg.truncation},
                    {"seed", cfg.seed},
                    {"tolerances", hj::encode(cfg.tol)},
                    {"exploratory", cfg.exploratory}};
  if (cfg.m_max) effective["m_max"] = *cfg.m_max;
  if (cfg.trials) effective["trials"] = *cfg.trials;
  if (cfg.phi) effective["phi"] = *cfg.phi;
  return {{"tool", "hardy-perturb"},
          {"version", version()},
          {"command", command},
          {"config", {{"file", cfg.file}, {"effective", effective}}},
          {"seed", cfg.seed},
          {"truncation", hj::encode(TruncationConfig::for_order(cfg.truncation))}};
}

json error_report(const std::string& command, const std::string& kind, const std::string& message,
                  const std::vector<std::string>& clauses) {
  json err = {{"kind", kind}, {"message", message}};
  if (!clauses.empty()) err["clauses"] = clauses;
  return {{"tool", "hardy-perturb"},
          {"version", version()},
          {"command", command},
          {"error", err},
          {"passed", false}};
}

CommandResult run_command(const std::string& group, const std::string& action,
                          const RunConfig& cfg) {
  const std::string cmd = group + " " + action;
  json report = envelope(cmd, cfg);
  CommandResult r;
  try {
    if (group == "shift") return shift_command(action, cfg, std::move(report));
    if (group == "subspace") return subspace_command(action, cfg, std::move(report));
    if (group == "commutant") return commutant_command(action, cfg, std::move(report));
    if (group == "analyze") return analyze_command(action, cfg, std::move(report));
    if (group == "demo") return demo_command(action, cfg, std::move(report));
    throw ConfigError("unknown command group '" + group + "'");
  } catch (const ConfigError& e) {
    r.report = report;
    r.report["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    r.exit_code = kExitConfigError;
  } catch (const nlohmann::json::exception& e) {
    r.report = report;
    r.report["error"] = {{"kind", "config"}, {"message", e.what()}};
    r.exit_code = kExitConfigError;
  } catch (const DefinitionViolationError& e) {
    r.report = report;
    r.report["error"] = {{"kind", e.kind()}, {"message", e.what()}, {"clauses", e.clauses()}};
    r.exit_code = kExitCheckFailed;
  } catch (const Error& e) {
    r.report = report;
    r.report["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    r.exit_code = kExitCheckFailed;
  }
  r.report["passed"] = false;
  return r;
}

}  // namespace hardy::cli
