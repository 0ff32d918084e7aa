#include "hardy/inner_functions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "hardy/errors.hpp"

namespace hardy {

namespace {

void trim_trailing(std::vector<Complex>& c) {
  while (!c.empty() && c.back() == Complex(0.0)) c.pop_back();
}

double max_abs(const CVector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  trim_trailing(coeffs_);
}

Polynomial Polynomial::monomial(int degree, Complex c) {
  std::vector<Complex> v(static_cast<std::size_t>(degree) + 1, 0.0);
  v.back() = c;
  return Polynomial(std::move(v));
}

Complex Polynomial::coeff(int k) const {
  return k >= 0 && k <= degree() ? coeffs_[static_cast<std::size_t>(k)] : Complex(0.0);
}

Complex Polynomial::evaluate(Complex w) const {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * w + *it;
  return acc;
}

std::vector<Complex> Polynomial::roots() const {
  const int d = degree();
  if (d < 1) return {};
  // Companion matrix of the monic polynomial.
  CMatrix c = CMatrix::Zero(d, d);
  const Complex lead = coeffs_.back();
  for (int i = 1; i < d; ++i) c(i, i - 1) = 1.0;
  for (int i = 0; i < d; ++i) c(i, d - 1) = -coeffs_[static_cast<std::size_t>(i)] / lead;
  Eigen::ComplexEigenSolver<CMatrix> eig(c, false);
  std::vector<Complex> out(eig.eigenvalues().data(), eig.eigenvalues().data() + d);
  std::sort(out.begin(), out.end(),
            [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  return out;
}

TruncatedVector Polynomial::to_vector(int working_order) const {
  if (degree() >= working_order) {
    throw TruncationError("polynomial of degree " + std::to_string(degree()) +
                          " does not fit working order " + std::to_string(working_order));
  }
  return TruncatedVector::from_coefficients(coeffs_, working_order);
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + Complex(-1.0) * b; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(Complex s, const Polynomial& a) {
  std::vector<Complex> c = a.coeffs_;
  for (auto& x : c) x *= s;
  return Polynomial(std::move(c));
}

// ---------------------------------------------------------------------------
// Blaschke products

BlaschkeProduct::BlaschkeProduct(Complex constant, std::vector<Complex> zeros)
    : constant_(constant), zeros_(std::move(zeros)) {
  if (std::abs(std::abs(constant_) - 1.0) >= 1e-12) {
    throw InvalidInnerFunctionError("Blaschke constant must be unimodular");
  }
  for (const Complex& a : zeros_) {
    if (!(std::abs(a) < 1.0)) {
      throw InvalidInnerFunctionError("Blaschke zeros must lie in the open unit disc");
    }
  }
}

int BlaschkeProduct::origin_multiplicity() const {
  return static_cast<int>(
      std::count_if(zeros_.begin(), zeros_.end(), [](Complex a) { return a == Complex(0.0); }));
}

BlaschkeProduct BlaschkeProduct::normalized() const {
  Complex lead = 1.0;
  for (const Complex& a : zeros_)
    if (a != Complex(0.0)) lead *= a;
  return BlaschkeProduct(std::abs(lead) / lead, zeros_);
}

Complex blaschke_eval(const BlaschkeProduct& theta, Complex w) {
  Complex acc = theta.constant();
  for (const Complex& a : theta.zeros()) {
    if (a == Complex(0.0)) {
      acc *= w;
      continue;
    }
    const Complex den = 1.0 - std::conj(a) * w;
    if (std::abs(den) < 1e-300) throw EvaluationError("Blaschke product evaluated at a pole");
    acc *= (a - w) / den;
  }
  return acc;
}

TruncatedVector blaschke_taylor(const BlaschkeProduct& theta, int working_order) {
  if (working_order < 1) throw DimensionError("working order must be positive");
  CVector c = CVector::Zero(working_order);
  c[0] = theta.constant();
  CVector next(working_order);
  for (const Complex& a : theta.zeros()) {
    if (a == Complex(0.0)) {
      next.setZero();
      next.tail(working_order - 1) = c.head(working_order - 1);
    } else {
      // y = c * (a - z) / (1 - conj(a) z): y_k = conj(a) y_{k-1} + a c_k - c_{k-1}.
      const Complex ab = std::conj(a);
      Complex prev_y = 0.0;
      Complex prev_c = 0.0;
      for (int k = 0; k < working_order; ++k) {
        prev_y = ab * prev_y + a * c[k] - prev_c;
        prev_c = c[k];
        next[k] = prev_y;
      }
    }
    c.swap(next);
  }
  return TruncatedVector(std::move(c), working_order);
}

InnerDiagnostics is_inner_numeric(const TruncatedVector& f, const ToleranceConfig& tol,
                                  std::optional<int> max_lag, double threshold) {
  (void)tol;
  InnerDiagnostics d;
  const int n = f.trusted_order();
  const CVector& c = f.coeffs();
  d.lags = std::clamp(max_lag.value_or(n - 1), 0, std::max(0, f.working_order() - 1));
  d.norm_defect = std::abs(f.norm() - 1.0);
  for (int k = 1; k <= d.lags; ++k) {
    const int len = f.working_order() - k;
    // <z^k f, f> = sum_j f_j conj(f_{j+k}).
    const Complex corr = c.tail(len).dot(c.head(len));
    d.max_correlation = std::max(d.max_correlation, std::abs(corr));
  }
  d.inner = d.norm_defect < threshold && d.max_correlation < threshold;
  return d;
}

bool is_outer_polynomial(const Polynomial& p, double boundary_tol) {
  if (p.is_zero()) throw PreconditionError("outer test of the zero polynomial");
  for (const Complex& r : p.roots())
    if (std::abs(r) < 1.0 - boundary_tol) return false;
  return true;
}

int valuation(const TruncatedVector& f, const ToleranceConfig& tol) {
  const double cutoff = tol.rank * max_abs(f.coeffs());
  int v = 0;
  while (v < f.working_order() && std::abs(f[v]) <= cutoff) ++v;
  return v;
}

TruncatedVector series_divide(const TruncatedVector& numerator, const TruncatedVector& divisor,
                              const ToleranceConfig& tol, std::optional<int> max_terms) {
  if (numerator.working_order() != divisor.working_order()) {
    throw DimensionError("series_divide: working orders differ");
  }
  const int n = numerator.working_order();
  const double dmax = max_abs(divisor.coeffs());
  if (dmax == 0.0) throw IllConditionedDivisionError("division by the zero series");
  const int v = valuation(divisor, tol);
  const double nmax = max_abs(numerator.coeffs());
  for (int k = 0; k < v; ++k) {
    if (std::abs(numerator[k]) > tol.rank * std::max(nmax, dmax)) {
      throw DivisibilityError("numerator valuation is below the divisor valuation " +
                              std::to_string(v));
    }
  }
  const Complex lead = divisor[v];
  if (std::abs(lead) < tol.rank) {
    throw IllConditionedDivisionError("leading divisor coefficient below the rank tolerance");
  }
  const int terms = std::min(n - v, max_terms.value_or(n - v));
  CVector q = CVector::Zero(n);
  for (int k = 0; k < terms; ++k) {
    Complex acc = numerator[k + v];
    for (int j = 1; j <= k && j + v < n; ++j) acc -= divisor[j + v] * q[k - j];
    q[k] = acc / lead;
  }
  return TruncatedVector(std::move(q), std::max(0, numerator.trusted_order() - v));
}

TruncatedVector convolve(const TruncatedVector& f, const TruncatedVector& g) {
  if (f.working_order() != g.working_order()) throw DimensionError("convolve: orders differ");
  const int n = f.working_order();
  CVector out = CVector::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (f[i] == Complex(0.0)) continue;
    out.tail(n - i) += f[i] * g.coeffs().head(n - i);
  }
  return TruncatedVector(std::move(out), std::min(f.trusted_order(), g.trusted_order()));
}

TruncatedVector multiply(const Polynomial& p, const TruncatedVector& f) {
  const int n = f.working_order();
  CVector out = CVector::Zero(n);
  for (int i = 0; i <= p.degree() && i < n; ++i) out.tail(n - i) += p.coeff(i) * f.coeffs().head(n - i);
  return TruncatedVector(std::move(out), f.trusted_order());
}

TruncatedVector normalize_phase(const TruncatedVector& f, const ToleranceConfig& tol) {
  const int v = valuation(f, tol);
  if (v >= f.working_order()) return f;
  const Complex lead = f[v];
  return (std::abs(lead) / lead) * f;
}

BlaschkeFit fit_blaschke(const TruncatedVector& f, const ToleranceConfig& tol, int max_degree) {
  const int n = f.trusted_order();
  if (std::abs(f[0]) <= tol.rank) {
    throw ExtractionError("fit_blaschke expects data with a nonzero constant term");
  }
  const TruncatedVector g = normalize_phase(f.normalized(), tol);
  const double cutoff = 100.0 * tol.rank;
  BlaschkeFit fit;
  for (int d = 0; d <= max_degree; ++d) {
    const int rows = std::min(20, n - 2 * d - 2);
    if (rows < d + 2) break;
    std::vector<Complex> zeros;
    if (d > 0) {
      // Rows k = d+1 .. d+rows:  sum_j q_j c_{k-j} = 0.
      CMatrix h(rows, d + 1);
      for (int r = 0; r < rows; ++r)
        for (int j = 0; j <= d; ++j) h(r, j) = g[d + 1 + r - j];
      Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeFullV);
      const double smin = svd.singularValues()(d);
      fit.hankel_sigma_min.push_back(smin);
      if (smin > cutoff) continue;
      const CVector qv = svd.matrixV().col(d);
      std::vector<Complex> qc(qv.data(), qv.data() + qv.size());
      const Polynomial den(qc);
      if (den.degree() != d || std::abs(den.coeff(0)) < cutoff) continue;
      bool ok = true;
      for (const Complex& beta : den.roots()) {
        if (!(std::abs(beta) > 1.0)) {
          ok = false;
          break;
        }
        zeros.push_back(1.0 / std::conj(beta));
      }
      if (!ok) continue;
    } else {
      // Degree 0: the data must already be (a unimodular multiple of) 1.
      const double tail = g.coeffs().tail(g.working_order() - 1).norm();
      fit.hankel_sigma_min.push_back(tail);
      if (tail > cutoff) continue;
    }
    const BlaschkeProduct theta = BlaschkeProduct(1.0, zeros).normalized();
    const TruncatedVector t = blaschke_taylor(theta, g.working_order());
    const double residual = (g.coeffs().head(n) - t.coeffs().head(n)).norm();
    if (residual > cutoff) continue;
    fit.theta = theta;
    fit.residual = residual;
    return fit;
  }
  throw ExtractionError("no finite Blaschke product of degree <= " + std::to_string(max_degree) +
                        " fits the wandering vector");
}

}  // namespace hardy
