#include "hardy/invariant_subspaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hardy/errors.hpp"
#include "svd.hpp"

namespace hardy {

namespace {

CVector apply_power(const OperatorMatrix& s, const CVector& v, int k) {
  CVector out = v;
  for (int i = 0; i < k; ++i) out = s.entries() * out;
  return out;
}

/// Orthonormal basis of z^n theta C[z] up to z^{n+depth} theta. The
/// generators z^k theta are already orthonormal since theta is inner.
CMatrix theta_generators(const TruncatedVector& theta, int n, int depth) {
  const int nw = theta.working_order();
  CMatrix g = CMatrix::Zero(nw, depth + 1);
  for (int k = 0; k <= depth; ++k) {
    const int shift = n + k;
    if (shift >= nw) break;
    g.col(k).tail(nw - shift) = theta.coeffs().head(nw - shift);
  }
  return g;
}

double distance_to_span(const CMatrix& q, const CVector& v) {
  if (q.cols() == 0) return v.norm();
  return (v - q * (q.adjoint() * v)).norm();
}

Polynomial trimmed_polynomial(const CVector& c, int max_len, double cutoff, double* tail) {
  const int len = std::min<int>(max_len, static_cast<int>(c.size()));
  std::vector<Complex> coeffs(static_cast<std::size_t>(len), 0.0);
  double dropped = 0.0;
  for (int k = 0; k < len; ++k) {
    if (std::abs(c[k]) > cutoff) {
      coeffs[static_cast<std::size_t>(k)] = c[k];
    } else {
      dropped += std::norm(c[k]);
    }
  }
  if (tail) *tail = std::sqrt(dropped);
  return Polynomial(std::move(coeffs));
}

}  // namespace

SubspaceModel SubspaceModel::from_polynomials(int n, BlaschkeProduct theta,
                                              std::vector<Polynomial> p,
                                              std::vector<Polynomial> q, int working_order) {
  if (n < 1) throw ModelInconsistencyError("model index n must be positive");
  if (static_cast<int>(p.size()) != n || static_cast<int>(q.size()) != n) {
    throw ModelInconsistencyError("model needs exactly n polynomials p_i and q_i");
  }
  SubspaceModel m;
  m.n = n;
  m.theta = std::move(theta);
  m.p = std::move(p);
  m.q = std::move(q);
  const TruncatedVector t = blaschke_taylor(m.theta, working_order);
  for (int i = 0; i < n; ++i) {
    TruncatedVector phi = mul_by_z(multiply(m.p[static_cast<std::size_t>(i)], t), i) -
                          m.q[static_cast<std::size_t>(i)].to_vector(working_order);
    m.phi.push_back(phi.with_trusted_order(working_order));
  }
  return m;
}

double ModelCheck::max_residual() const {
  double r = std::max({formula_residual, orthogonality_residual, terminal_residual});
  for (double c : chain_residuals) r = std::max(r, c);
  return r;
}

ModelCheck check_model(const SubspaceModel& model, const NShift& s, const ToleranceConfig& tol,
                       const TruncationConfig& trunc, std::optional<double> threshold) {
  const double level = threshold.value_or(tol.res);
  const int n = model.n;
  if (n != s.n) {
    throw ModelInconsistencyError("model index " + std::to_string(n) +
                                  " differs from the shift index " + std::to_string(s.n));
  }
  if (static_cast<int>(model.phi.size()) != n || static_cast<int>(model.p.size()) != n ||
      static_cast<int>(model.q.size()) != n) {
    throw ModelInconsistencyError("model needs n vectors phi_i and polynomials p_i, q_i");
  }
  const int nw = s.working_order();
  const int t = trunc.trusted_order();
  ModelCheck c;
  const TruncatedVector theta = blaschke_taylor(model.theta, nw);
  const CMatrix tail_space = theta_generators(theta, n, t - n);

  c.min_phi_norm = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const auto& phi = model.phi[static_cast<std::size_t>(i)];
    const double norm = phi.norm();
    c.min_phi_norm = std::min(c.min_phi_norm, norm);
    if (norm == 0.0) continue;
    const TruncatedVector formula =
        mul_by_z(multiply(model.p[static_cast<std::size_t>(i)], theta), i) -
        model.q[static_cast<std::size_t>(i)].to_vector(nw);
    c.formula_residual = std::max(
        c.formula_residual, (phi.coeffs().head(t) - formula.coeffs().head(t)).norm() / norm);
    c.orthogonality_residual = std::max(
        c.orthogonality_residual, (tail_space.adjoint() * phi.coeffs()).norm() / norm);
    for (int j = 0; j < i; ++j) {
      const auto& other = model.phi[static_cast<std::size_t>(j)];
      if (other.norm() == 0.0) continue;
      c.orthogonality_residual =
          std::max(c.orthogonality_residual,
                   std::abs(inner_product(phi, other)) / (norm * other.norm()));
    }
  }

  for (int j = 0; j + 1 < n; ++j) {
    const auto& phi = model.phi[static_cast<std::size_t>(j)];
    CMatrix gens(nw, (n - j - 1) + tail_space.cols());
    for (int k = j + 1; k < n; ++k) gens.col(k - j - 1) = model.phi[static_cast<std::size_t>(k)].coeffs();
    gens.rightCols(tail_space.cols()) = tail_space;
    const Subspace target = orthonormalize_columns(gens, t, tol);
    const CVector image = s.S.entries() * phi.coeffs();
    const double norm = std::max(phi.norm(), std::numeric_limits<double>::min());
    c.chain_residuals.push_back(distance_to_span(target.basis(), image) / norm);
  }

  {
    const auto& phi = model.phi[static_cast<std::size_t>(n - 1)];
    const CVector image = s.S.entries() * phi.coeffs();
    const TruncatedVector target =
        mul_by_z(multiply(model.p[static_cast<std::size_t>(n - 1)], theta), n);
    const double norm = std::max(phi.norm(), std::numeric_limits<double>::min());
    c.terminal_residual = (image.head(t) - target.coeffs().head(t)).norm() / norm;
  }

  if (!(c.min_phi_norm > tol.res)) {
    c.failure = "degenerate-phi";
  } else if (c.formula_residual > level) {
    c.failure = "formula";
  } else if (c.orthogonality_residual > level) {
    c.failure = "orthogonality";
  } else if (std::any_of(c.chain_residuals.begin(), c.chain_residuals.end(),
                         [&](double r) { return r > level; })) {
    c.failure = "chain";
  } else if (c.terminal_residual > level) {
    c.failure = "terminal";
  }
  return c;
}

BuiltSubspace build_subspace(const SubspaceModel& model, const NShift& s,
                             const ToleranceConfig& tol, const TruncationConfig& trunc) {
  BuiltSubspace out;
  out.check = check_model(model, s, tol, trunc);
  if (!out.check.passed()) {
    throw ModelInconsistencyError("model condition '" + *out.check.failure +
                                  "' fails (max residual " +
                                  std::to_string(out.check.max_residual()) + ")");
  }
  const int nw = s.working_order();
  const int t = trunc.trusted_order();
  const int n = model.n;
  const TruncatedVector theta = blaschke_taylor(model.theta, nw);
  out.theta_depth = t - n;
  const CMatrix tail_space = theta_generators(theta, n, out.theta_depth);
  CMatrix gens(nw, n + tail_space.cols());
  for (int i = 0; i < n; ++i) gens.col(i) = model.phi[static_cast<std::size_t>(i)].coeffs();
  gens.rightCols(tail_space.cols()) = tail_space;
  out.M = orthonormalize_columns(gens, t, tol);
  if (out.M.dim() != gens.cols()) {
    throw ModelInconsistencyError("generators phi_i and z^n theta H^2 are linearly dependent");
  }
  out.invariance_residual = invariance_residual(out.M, s.S, trunc.slack);
  return out;
}

SubspaceModel s1_model(Complex a0, Complex b0, const BlaschkeProduct& theta, int working_order) {
  if (!(std::abs(b0) > 0.0) || std::abs(b0) > std::abs(a0)) {
    throw PreconditionError("s1_model requires 0 < |b0| <= |a0|");
  }
  const Complex t0 = blaschke_eval(theta, 0.0);
  const Polynomial p({1.0, (b0 / a0) * std::norm(t0)});
  const Polynomial q({(t0 / a0) * (a0 - 1.0), (t0 / a0) * b0});
  return SubspaceModel::from_polynomials(1, theta, {p}, {q}, working_order);
}

SubspaceModel one_shift_model(const NShift& s, const BlaschkeProduct& theta) {
  if (s.n != 1) throw PreconditionError("one_shift_model needs a 1-shift");
  const int nw = s.working_order();
  const int deg_r = std::max(0, s.perturbation_degree - 1);
  // S 1 = z (1 + r).
  std::vector<Complex> r(static_cast<std::size_t>(deg_r) + 1, 0.0);
  for (int k = 0; k <= deg_r; ++k) r[static_cast<std::size_t>(k)] = s.S(k + 1, 0);
  r[0] -= 1.0;
  const Complex one_plus_r0 = 1.0 + r[0];
  if (std::abs(one_plus_r0) < 1e-14) {
    throw UnsupportedError("one_shift_model needs S 1 to have a nonzero z coefficient");
  }
  const TruncatedVector t = blaschke_taylor(theta, nw);
  const Complex c = t[0] / one_plus_r0;
  std::vector<Complex> p(static_cast<std::size_t>(deg_r) + 1, 0.0);
  p[0] = 1.0;
  for (int m = 1; m <= deg_r; ++m) {
    Complex ip = 0.0;  // <r, z^m theta>
    for (int k = m; k <= deg_r; ++k) ip += r[static_cast<std::size_t>(k)] * std::conj(t[k - m]);
    p[static_cast<std::size_t>(m)] = c * ip;
  }
  std::vector<Complex> q(r.size());
  for (std::size_t k = 0; k < r.size(); ++k) q[k] = c * r[k];
  return SubspaceModel::from_polynomials(1, theta, {Polynomial(p)}, {Polynomial(q)}, nw);
}

int wandering_dimension(const Subspace& m, const NShift& s, const ToleranceConfig& tol,
                        const TruncationConfig& trunc) {
  if (m.dim() == 0) throw PreconditionError("wandering dimension of the zero subspace");
  const double res = invariance_residual(m, s.S, trunc.slack);
  if (res > tol.res) {
    throw PreconditionError("subspace is not invariant (residual " + std::to_string(res) + ")");
  }
  return subspace_difference(m, s.S, tol, trunc.slack).dim();
}

ExtractionReport extract_model(const Subspace& m, const NShift& s, const ToleranceConfig& tol,
                               const TruncationConfig& trunc) {
  const int nw = s.working_order();
  const int n = s.n;
  const int t = trunc.trusted_order();
  const double accept = 100.0 * tol.res;
  if (m.working_order() != nw) throw DimensionError("subspace and shift orders differ");
  const double res = invariance_residual(m, s.S, trunc.slack);
  if (res > tol.res) {
    throw PreconditionError("subspace is not invariant (residual " + std::to_string(res) + ")");
  }

  ExtractionReport report;
  std::vector<TruncatedVector> phis;
  Subspace current = m;
  for (int j = 0; j < n; ++j) {
    const Subspace w = subspace_difference(current, s.S, tol, trunc.slack);
    if (w.dim() != 1) {
      throw ExtractionError("wandering dimension " + std::to_string(w.dim()) + " at stage " +
                            std::to_string(j));
    }
    phis.push_back(normalize_phase(w.column(0), tol).with_trusted_order(t));
    current = image(s.S, current, tol);
  }

  const OperatorMatrix z = OperatorMatrix::shift(nw);
  const double zres = invariance_residual(current, z, trunc.slack);
  if (zres > accept) {
    throw ExtractionError("S^n M is not M_z-invariant (residual " + std::to_string(zres) + ")");
  }
  const Subspace gw = subspace_difference(current, z, tol, trunc.slack);
  if (gw.dim() != 1) {
    throw ExtractionError("M_z-wandering dimension of S^n M is " + std::to_string(gw.dim()));
  }
  const TruncatedVector g = gw.column(0);
  const int v = valuation(g, tol);
  if (v < n || v >= t) {
    throw ExtractionError("wandering vector of S^n M has valuation " + std::to_string(v) +
                          ", expected at least " + std::to_string(n));
  }
  CVector hc = CVector::Zero(nw);
  hc.head(nw - v) = g.coeffs().tail(nw - v);
  const TruncatedVector h = normalize_phase(TruncatedVector(hc, t - v).normalized(), tol);
  report.inner = is_inner_numeric(h, tol, std::nullopt, accept);
  if (!report.inner.inner) {
    throw ExtractionError("recovered inner factor fails the inner test (norm defect " +
                          std::to_string(report.inner.norm_defect) + ", correlation " +
                          std::to_string(report.inner.max_correlation) + ")");
  }
  const BlaschkeFit fit = fit_blaschke(h, tol);
  report.theta_fit_residual = fit.residual;
  std::vector<Complex> zeros(static_cast<std::size_t>(v - n), 0.0);
  zeros.insert(zeros.end(), fit.theta.zeros().begin(), fit.theta.zeros().end());
  const BlaschkeProduct theta = BlaschkeProduct(1.0, zeros).normalized();

  const TruncatedVector theta_t = blaschke_taylor(theta, nw);
  const int depth = t - n;
  const CMatrix tail_space = theta_generators(theta_t, n, depth);
  const TruncatedVector divisor = mul_by_z(theta_t, n);
  const int division_terms = std::max(n, s.perturbation_degree) + 3;

  std::vector<Polynomial> ps, qs;
  for (int i = 0; i < n; ++i) {
    const auto& phi = phis[static_cast<std::size_t>(i)];
    const CVector num = apply_power(s.S, phi.coeffs(), n - i);
    // z^{n+k} theta is an orthonormal system, so p_k = <num, z^{n+k} theta>.
    const CVector pc = tail_space.adjoint() * num;
    const double pmax = pc.cwiseAbs().maxCoeff();
    double dropped = 0.0;
    Polynomial p = trimmed_polynomial(pc, static_cast<int>(pc.size()), tol.rank * pmax, &dropped);
    const TruncatedVector forward = mul_by_z(multiply(p, theta_t), n);
    const double p_residual = (num.head(t) - forward.coeffs().head(t)).norm();
    report.p_tail.push_back(p_residual);
    if (p_residual > accept) {
      report.warnings.push_back("p_" + std::to_string(i) + " is not a polynomial (residual " +
                                std::to_string(p_residual) + ")");
    }
    // Cross-check against triangular division on the leading coefficients.
    const TruncatedVector quotient =
        series_divide(TruncatedVector(num, t), divisor, tol, division_terms);
    double disagreement = 0.0;
    for (int k = 0; k < std::min(division_terms, static_cast<int>(pc.size())); ++k)
      disagreement = std::max(disagreement, std::abs(quotient[k] - pc[k]));
    if (disagreement > accept) {
      report.warnings.push_back("series division of p_" + std::to_string(i) +
                                " disagrees with projection by " + std::to_string(disagreement));
    }

    const TruncatedVector qv = mul_by_z(multiply(p, theta_t), i) - phi;
    double q_dropped = 0.0;
    const Polynomial q =
        trimmed_polynomial(qv.coeffs(), t, tol.rank * std::max(1.0, phi.norm()), &q_dropped);
    const double beyond = qv.coeffs().segment(std::min(t, nw), nw - std::min(t, nw)).norm();
    report.q_tail.push_back(std::sqrt(q_dropped * q_dropped + beyond * beyond));
    if (q.degree() > n + std::max(0, s.perturbation_degree) + p.degree() + 2) {
      report.warnings.push_back("q_" + std::to_string(i) + " has unexpected degree " +
                                std::to_string(q.degree()));
    }
    ps.push_back(std::move(p));
    qs.push_back(q);
  }

  report.model.n = n;
  report.model.theta = theta;
  report.model.p = std::move(ps);
  report.model.q = std::move(qs);
  report.model.phi = std::move(phis);
  report.check = check_model(report.model, s, tol, trunc, accept);
  return report;
}

int default_krylov_depth(const TruncationConfig& trunc, int n, int theta_degree) {
  return trunc.trusted_order() - n - theta_degree - 4;
}

CyclicReport check_cyclic(const Subspace& m, const SubspaceModel& model, const NShift& s,
                          const ToleranceConfig& tol, const TruncationConfig& trunc,
                          bool exploratory) {
  if (model.n != 1 && !exploratory) {
    throw UnsupportedError("cyclicity criterion is only established for n = 1");
  }
  CyclicReport r;
  const Polynomial& p0 = model.p.front();
  r.outer = is_outer_polynomial(p0);
  const auto roots = p0.roots();
  r.min_root_modulus = roots.empty() ? std::numeric_limits<double>::infinity()
                                     : std::abs(roots.front());
  r.depth = default_krylov_depth(trunc, model.n, model.theta.degree());
  try {
    const TruncatedVector seed = model.phi.front().with_trusted_order(trunc.trusted_order());
    const Subspace k = krylov_closure(s.S, seed, r.depth, tol);
    r.krylov_in_m = containment_angle(k.prefix(domain_dimension(k, trunc.slack)), m);
    // The tail of M is only reachable from phi after many steps; compare on
    // the generators well inside the Krylov depth.
    const int m_cols = std::clamp(r.depth - 2 * trunc.slack, 1, m.dim());
    r.m_in_krylov = containment_angle(m.prefix(m_cols), k);
    r.krylov_equal = r.krylov_in_m < tol.angle && r.m_in_krylov < tol.angle;
  } catch (const TruncationError&) {
    r.krylov_equal.reset();
  }
  if (model.n != 1) {
    r.verdict = "empirical";
  } else if (!r.krylov_equal.has_value() || *r.krylov_equal != r.outer) {
    r.verdict = "inconclusive";
  } else {
    r.verdict = r.outer ? "cyclic" : "not-cyclic";
  }
  return r;
}

CodimensionReport finite_codimension(const Subspace& m, const SubspaceModel& model,
                                     const TruncationConfig& trunc) {
  CodimensionReport r;
  r.expected = model.theta.degree();
  const int nw = m.working_order();
  const int d = m.dim();
  if (d >= nw) {
    r.numeric = 0;
    r.consistent = r.expected == 0;
    return r;
  }
  const CMatrix complement = detail::left_svd(m.basis()).u.rightCols(nw - d);
  const int rows = std::max(1, trunc.trusted_order() - trunc.slack);
  const Eigen::VectorXd sv = detail::singular_values(complement.topRows(rows));
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    r.localization.push_back(sv(i));
    if (sv(i) > 0.5) ++r.numeric;
    if (sv(i) > 0.1 && sv(i) < 0.9) r.conclusive = false;
  }
  r.consistent = r.conclusive && r.numeric == r.expected;
  return r;
}

TridiagonalKernel random_kernel(int n, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Complex> a(static_cast<std::size_t>(n), 1.0);
  std::vector<Complex> b(static_cast<std::size_t>(n));
  for (auto& x : b) {
    const double rad = radius * std::sqrt(unit(rng));
    x = std::polar(rad, 2.0 * std::numbers::pi * unit(rng));
  }
  return TridiagonalKernel(n, std::move(a), std::move(b));
}

KrylovSeed random_krylov_seed(const NShift& s, std::mt19937_64& rng, int max_theta_degree,
                              const TruncationConfig& trunc) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> theta_deg(0, max_theta_degree);
  std::uniform_int_distribution<int> outer_deg(0, 2);
  const double two_pi = 2.0 * std::numbers::pi;

  std::vector<Complex> zeros;
  const int dt = theta_deg(rng);
  while (static_cast<int>(zeros.size()) < dt) {
    const Complex alpha = std::polar(0.2 + 0.4 * unit(rng), two_pi * unit(rng));
    const bool separated = std::all_of(zeros.begin(), zeros.end(),
                                       [&](Complex z) { return std::abs(z - alpha) > 0.15; });
    if (separated) zeros.push_back(alpha);
  }
  KrylovSeed seed;
  seed.theta = BlaschkeProduct(1.0, zeros).normalized();
  Polynomial u = Polynomial::constant(1.0);
  const int du = outer_deg(rng);
  for (int i = 0; i < du; ++i) {
    const Complex root = std::polar(3.0 + 2.0 * unit(rng), two_pi * unit(rng));
    u = u * Polynomial({1.0, -1.0 / root});
  }
  seed.outer = u;

  const int nw = s.working_order();
  const int n = s.n;
  const TruncatedVector target = mul_by_z(multiply(u, blaschke_taylor(seed.theta, nw)), n);
  CMatrix sn = CMatrix::Identity(nw, nw);
  for (int i = 0; i < n; ++i) sn = s.S.entries() * sn;
  const int len = nw - n;
  const CMatrix block = sn.block(n, 0, len, len);
  for (int j = 0; j < len; ++j) {
    if (std::abs(block(j, j)) < 1e-12) {
      throw PreconditionError("S^n has a vanishing pivot; seed construction needs a kernel shift");
    }
  }
  const CVector rhs = target.coeffs().tail(len);
  CVector f = CVector::Zero(nw);
  f.head(len) = block.triangularView<Eigen::Lower>().solve(rhs);
  seed.f = TruncatedVector(std::move(f), trunc.trusted_order());
  return seed;
}

}  // namespace hardy
