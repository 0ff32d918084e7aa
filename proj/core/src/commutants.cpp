#include "hardy/commutants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hardy/errors.hpp"
#include "svd.hpp"

namespace hardy {

OperatorMatrix toeplitz(const Polynomial& phi, int working_order) {
  CMatrix t = CMatrix::Zero(working_order, working_order);
  for (int k = 0; k <= phi.degree() && k < working_order; ++k)
    for (int j = 0; j + k < working_order; ++j) t(j + k, j) = phi.coeff(k);
  return OperatorMatrix(std::move(t));
}

CommutantElement commutant_element(const Polynomial& phi, const TridiagonalKernel& k,
                                   int working_order, const ToleranceConfig& tol) {
  if (phi.degree() >= working_order / 2) {
    throw TruncationError("symbol degree too large for the working order");
  }
  CommutantElement e;
  e.symbol = phi;
  const CMatrix g = change_of_basis(k, working_order);
  e.T = toeplitz(phi, working_order);
  // f-basis coordinates of phi f_m: G x = T_phi G e_m.
  CMatrix x = g.triangularView<Eigen::Lower>().solve(e.T.entries() * g);
  e.X = OperatorMatrix(x);
  CMatrix nm = x - e.T.entries();
  const int n = k.n();
  if (n < working_order) {
    e.n_support_defect = nm.rightCols(working_order - n).cwiseAbs().maxCoeff();
  }
  if (e.n_support_defect > tol.res) {
    throw InternalConsistencyError("commutant correction N leaks outside its first n columns");
  }
  e.N = OperatorMatrix(std::move(nm), BasisTag::Monomial,
                       FiniteSupport{working_order, n, Background::Zero});
  return e;
}

double verify_commutation(const OperatorMatrix& x, const NShift& s, int trusted_order) {
  if (x.working_order() != s.working_order()) {
    throw DimensionError("commutation check: working orders differ");
  }
  const CMatrix c = x.entries() * s.S.entries() - s.S.entries() * x.entries();
  const int b = std::clamp(trusted_order - 1, 0, x.working_order());
  return b == 0 ? 0.0 : c.topLeftCorner(b, b).cwiseAbs().maxCoeff();
}

Polynomial random_symbol(int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Complex> c(static_cast<std::size_t>(degree) + 1);
  for (auto& x : c) x = std::polar(std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
  return Polynomial(std::move(c));
}

HyperinvarianceReport hyperinvariance_check(const Subspace& m, const NShift& s,
                                            const TridiagonalKernel& k, int trials,
                                            std::uint64_t seed, const ToleranceConfig& tol,
                                            const TruncationConfig& trunc) {
  const double res = invariance_residual(m, s.S, trunc.slack);
  if (res > tol.res) {
    throw PreconditionError("hyperinvariance check needs an invariant subspace (residual " +
                            std::to_string(res) + ")");
  }
  HyperinvarianceReport r;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> deg(0, 8);
  const int nw = s.working_order();
  const int dom = domain_dimension(m, trunc.slack);
  const CMatrix q_dom = m.basis().leftCols(dom);
  for (int i = 0; i < trials; ++i) {
    const Polynomial phi = random_symbol(deg(rng), rng);
    const CommutantElement e = commutant_element(phi, k, nw, tol);
    const CMatrix img = e.X.entries() * q_dom;
    const CMatrix out = img - m.basis() * (m.basis().adjoint() * img);
    const double v = out.size() == 0 ? 0.0 : detail::singular_values(out)(0);
    r.residuals.push_back(v);
    r.max_residual = std::max(r.max_residual, v);
  }
  r.passed = r.max_residual < tol.res;
  return r;
}

namespace {

// A truncated copy of H^2 itself: every monomial of the frontier-safe range
// already lies in m.
bool fills_trusted_block(const Subspace& m, const ToleranceConfig& tol,
                         const TruncationConfig& trunc) {
  const int k = std::max(1, domain_dimension(m, trunc.slack) - trunc.slack);
  const Subspace monomials(CMatrix::Identity(m.working_order(), k), m.trusted_order());
  return containment_angle(monomials, m) < tol.angle;
}

}  // namespace

IrreducibilityReport irreducibility_probe(const NShift& s, const std::vector<Subspace>& family,
                                          const ToleranceConfig& tol,
                                          const TruncationConfig& trunc) {
  if (!s.kernel) throw PreconditionError("irreducibility probe needs a kernel-built shift");
  IrreducibilityReport r;
  const OperatorMatrix adj = s.S.adjoint();
  bool any_reducing = false;
  for (const Subspace& m : family) {
    if (m.dim() == 0 || m.dim() >= m.working_order() || fills_trusted_block(m, tol, trunc)) {
      ++r.skipped_trivial;
      continue;
    }
    const double v = invariance_residual(m, adj, trunc.slack);
    r.adjoint_residuals.push_back(v);
    if (v <= tol.res) any_reducing = true;
  }
  r.irreducible = !any_reducing && !r.adjoint_residuals.empty();
  return r;
}

}  // namespace hardy
