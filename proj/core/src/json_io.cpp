#include "hardy/json_io.hpp"

#include <cmath>
#include <limits>

#include "hardy/errors.hpp"

namespace hardy::json {

namespace {

json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

json encode(Complex c) { return json::array({c.real(), c.imag()}); }

Complex decode_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError("expected a complex scalar [re, im], got " + j.dump());
}

json encode(const std::vector<Complex>& v) {
  json out = json::array();
  for (const Complex& c : v) out.push_back(encode(c));
  return out;
}

std::vector<Complex> decode_complex_list(const json& j) {
  if (!j.is_array()) throw ConfigError("expected a list of complex scalars");
  std::vector<Complex> out;
  out.reserve(j.size());
  for (const auto& x : j) out.push_back(decode_complex(x));
  return out;
}

json encode(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(encode(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json encode(const CVector& v) {
  return encode(std::vector<Complex>(v.data(), v.data() + v.size()));
}

json encode(const Polynomial& p) { return encode(p.coeffs()); }

json encode(const BlaschkeProduct& theta) {
  return {{"constant", encode(theta.constant())}, {"zeros", encode(theta.zeros())}};
}

BlaschkeProduct decode_blaschke(const json& j) {
  const Complex c = j.contains("constant") ? decode_complex(j.at("constant")) : Complex(1.0);
  const auto zeros = j.contains("zeros") ? decode_complex_list(j.at("zeros"))
                                          : std::vector<Complex>{};
  try {
    return BlaschkeProduct(c, zeros);
  } catch (const InvalidInnerFunctionError& e) {
    throw ConfigError(e.what());
  }
}

json encode(const TridiagonalKernel& k) {
  return {{"n", k.n()}, {"a", encode(k.a_values())}, {"b", encode(k.b_values())}};
}

TridiagonalKernel decode_kernel(const json& j) {
  const int n = require(j, "n").get<int>();
  auto a = j.contains("a") ? decode_complex_list(j.at("a"))
                           : std::vector<Complex>(static_cast<std::size_t>(std::max(n, 0)), 1.0);
  auto b = decode_complex_list(require(j, "b"));
  try {
    return TridiagonalKernel(n, std::move(a), std::move(b));
  } catch (const InvalidKernelError& e) {
    throw ConfigError(e.what());
  }
}

json encode(const ExplicitColumns& c) {
  json cols = json::array();
  for (const auto& col : c.columns) cols.push_back(encode(col));
  return {{"n", c.n}, {"columns", cols}};
}

ExplicitColumns decode_columns(const json& j) {
  ExplicitColumns c;
  c.n = require(j, "n").get<int>();
  for (const auto& col : require(j, "columns")) c.columns.push_back(decode_complex_list(col));
  if (static_cast<int>(c.columns.size()) != c.n) {
    throw ConfigError("explicit perturbation needs exactly n columns");
  }
  return c;
}

json encode(const SubspaceModel& m) {
  json p = json::array();
  json q = json::array();
  for (const auto& x : m.p) p.push_back(encode(x));
  for (const auto& x : m.q) q.push_back(encode(x));
  return {{"n", m.n}, {"theta", encode(m.theta)}, {"p", p}, {"q", q}};
}

SubspaceModel decode_model(const json& j, int working_order) {
  const int n = require(j, "n").get<int>();
  const BlaschkeProduct theta = decode_blaschke(require(j, "theta"));
  std::vector<Polynomial> p, q;
  for (const auto& x : require(j, "p")) p.emplace_back(decode_complex_list(x));
  for (const auto& x : require(j, "q")) q.emplace_back(decode_complex_list(x));
  try {
    return SubspaceModel::from_polynomials(n, theta, std::move(p), std::move(q), working_order);
  } catch (const ModelInconsistencyError& e) {
    throw ConfigError(e.what());
  }
}

json encode(const ToleranceConfig& t) {
  return {{"rank", t.rank}, {"orth", t.orth}, {"res", t.res}, {"angle", t.angle}};
}

ToleranceConfig decode_tolerances(const json& j, ToleranceConfig base) {
  if (j.contains("rank")) base.rank = j.at("rank").get<double>();
  if (j.contains("orth")) base.orth = j.at("orth").get<double>();
  if (j.contains("res")) base.res = j.at("res").get<double>();
  if (j.contains("angle")) base.angle = j.at("angle").get<double>();
  return base;
}

json encode(const TruncationConfig& t) {
  return {{"working_order", t.working_order},
          {"margin", t.margin},
          {"slack", t.slack},
          {"trusted_order", t.trusted_order()}};
}

json encode(const ShiftValidation& v) {
  return {{"clause_i", v.clause_i},
          {"clause_ii", v.clause_ii},
          {"clause_iii", v.clause_iii},
          {"min_eigenvalue", v.min_eigenvalue},
          {"block_size", v.block_size},
          {"failures", v.failures},
          {"passed", v.passed()}};
}

json encode(const PowerIdentityReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json o = {{"m", row.m},
              {"range_residual", row.range_residual},
              {"intertwining_residual", row.intertwining_residual},
              {"correction_degree", row.correction_degree},
              {"correction_tail", row.correction_tail}};
    o["factor_residual"] = row.factor_residual ? json(*row.factor_residual) : json(nullptr);
    rows.push_back(std::move(o));
  }
  return {{"trusted_block", r.trusted_block},
          {"degree_bound", r.degree_bound},
          {"rows", rows},
          {"max_residual", r.max_residual()}};
}

json encode(const ModelCheck& c) {
  return {{"formula_residual", c.formula_residual},
          {"orthogonality_residual", c.orthogonality_residual},
          {"chain_residuals", c.chain_residuals},
          {"terminal_residual", c.terminal_residual},
          {"min_phi_norm", finite_or_null(c.min_phi_norm)},
          {"failure", c.failure ? json(*c.failure) : json(nullptr)},
          {"passed", c.passed()}};
}

json encode(const CyclicReport& r) {
  return {{"outer", r.outer},
          {"krylov_equal", r.krylov_equal ? json(*r.krylov_equal) : json(nullptr)},
          {"min_root_modulus", finite_or_null(r.min_root_modulus)},
          {"krylov_in_m", r.krylov_in_m},
          {"m_in_krylov", r.m_in_krylov},
          {"depth", r.depth},
          {"verdict", r.verdict}};
}

json encode(const CodimensionReport& r) {
  return {{"numeric", r.numeric},
          {"expected", r.expected},
          {"consistent", r.consistent},
          {"conclusive", r.conclusive}};
}

json encode(const CommutatorReport& r) {
  return {{"block", encode(r.block)},
          {"block_size", r.block_size},
          {"rank", r.rank},
          {"eigenvalues", r.eigenvalues},
          {"min_eigenvalue", r.min_eigenvalue},
          {"det_principal", encode(r.det_principal)},
          {"outside_max", r.outside_max},
          {"hermitian_defect", r.hermitian_defect},
          {"essentially_normal", r.essentially_normal},
          {"hyponormal", r.hyponormal},
          {"corner_masked", r.corner_masked},
          {"mask_note", r.mask_note}};
}

json encode(const HyperinvarianceReport& r) {
  return {{"trials", r.residuals.size()},
          {"max_residual", r.max_residual},
          {"passed", r.passed}};
}

json encode(const IrreducibilityReport& r) {
  return {{"adjoint_residuals", r.adjoint_residuals},
          {"skipped_trivial", r.skipped_trivial},
          {"irreducible", r.irreducible}};
}

json encode(const RankDiagnostics& d) {
  return {{"rank", d.rank},
          {"singular_values", d.singular_values},
          {"cutoff", d.cutoff},
          {"gap", finite_or_null(d.gap)}};
}

}  // namespace hardy::json
