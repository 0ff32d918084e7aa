#pragma once

// JSON encodings. Complex scalars are [re, im] pairs; a plain number is
// accepted on input as a real scalar.

#include <nlohmann/json.hpp>

#include "hardy/analysis.hpp"
#include "hardy/commutants.hpp"
#include "hardy/hardy_core.hpp"
#include "hardy/inner_functions.hpp"
#include "hardy/invariant_subspaces.hpp"
#include "hardy/shifts.hpp"

namespace hardy::json {

using nlohmann::json;

json encode(Complex c);
Complex decode_complex(const json& j);
json encode(const std::vector<Complex>& v);
std::vector<Complex> decode_complex_list(const json& j);
json encode(const CMatrix& m);
json encode(const CVector& v);

json encode(const Polynomial& p);
json encode(const BlaschkeProduct& theta);
BlaschkeProduct decode_blaschke(const json& j);

json encode(const TridiagonalKernel& k);
TridiagonalKernel decode_kernel(const json& j);

struct ExplicitColumns {
  int n = 0;
  std::vector<std::vector<Complex>> columns;
};
json encode(const ExplicitColumns& c);
ExplicitColumns decode_columns(const json& j);

/// {"n", "theta", "p", "q"}; phi is rebuilt from the polynomials.
json encode(const SubspaceModel& m);
SubspaceModel decode_model(const json& j, int working_order);

json encode(const ToleranceConfig& t);
/// Overrides fields present in j.
ToleranceConfig decode_tolerances(const json& j, ToleranceConfig base = {});
json encode(const TruncationConfig& t);

json encode(const ShiftValidation& v);
json encode(const PowerIdentityReport& r);
json encode(const ModelCheck& c);
json encode(const CyclicReport& r);
json encode(const CodimensionReport& r);
json encode(const CommutatorReport& r);
json encode(const HyperinvarianceReport& r);
json encode(const IrreducibilityReport& r);
json encode(const RankDiagnostics& d);

}  // namespace hardy::json
