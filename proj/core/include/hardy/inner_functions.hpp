#pragma once

// Finite Blaschke products, polynomials and power-series division.

#include <optional>
#include <vector>

#include "hardy/hardy_core.hpp"

namespace hardy {

class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Complex> coeffs);

  static Polynomial constant(Complex c) { return Polynomial({c}); }
  static Polynomial monomial(int degree, Complex c = 1.0);

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  Complex coeff(int k) const;

  Complex evaluate(Complex w) const;
  std::vector<Complex> roots() const;

  TruncatedVector to_vector(int working_order) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Complex s, const Polynomial& a);

 private:
  std::vector<Complex> coeffs_;  // trailing exact zeros removed
};

/// constant * prod_i b_i(w), with b_i(w) = w when alpha_i = 0 and
/// b_i(w) = (alpha_i - w) / (1 - conj(alpha_i) w) otherwise.
class BlaschkeProduct {
 public:
  BlaschkeProduct() = default;
  BlaschkeProduct(Complex constant, std::vector<Complex> zeros);

  Complex constant() const { return constant_; }
  const std::vector<Complex>& zeros() const { return zeros_; }
  int degree() const { return static_cast<int>(zeros_.size()); }
  /// Number of zeros at the origin.
  int origin_multiplicity() const;

  /// Same zeros, constant chosen so the first nonzero Taylor coefficient is
  /// positive real.
  BlaschkeProduct normalized() const;

 private:
  Complex constant_ = 1.0;
  std::vector<Complex> zeros_;
};

/// Throws EvaluationError at a pole.
Complex blaschke_eval(const BlaschkeProduct& theta, Complex w);

/// Taylor coefficients 0..N_w-1 of theta at the origin.
TruncatedVector blaschke_taylor(const BlaschkeProduct& theta, int working_order);

struct InnerDiagnostics {
  bool inner = false;
  double norm_defect = 0.0;      // | ||f|| - 1 |
  double max_correlation = 0.0;  // max_k |<z^k f, f>|
  int lags = 0;
};

/// Isometric-multiplication test at truncation: ||f|| = 1 and
/// <z^k f, f> = 0 for 1 <= k <= max_lag (default: trusted region).
InnerDiagnostics is_inner_numeric(const TruncatedVector& f, const ToleranceConfig& tol,
                                  std::optional<int> max_lag = std::nullopt,
                                  double threshold = 1e-8);

/// No root in the open unit disc. Roots with ||r| - 1| <= boundary_tol count
/// as boundary roots, and boundary roots are outer factors.
bool is_outer_polynomial(const Polynomial& p, double boundary_tol = 1e-9);

/// Number of leading coefficients at or below tol.rank * max|f_j|.
int valuation(const TruncatedVector& f, const ToleranceConfig& tol);

/// Quotient of the convolution system numerator = divisor * q.
/// max_terms limits the number of quotient coefficients computed (the rest
/// stay zero); division by a function with zeros in the disc amplifies
/// rounding error geometrically, so callers that expect a polynomial
/// quotient should cap it.
TruncatedVector series_divide(const TruncatedVector& numerator, const TruncatedVector& divisor,
                              const ToleranceConfig& tol,
                              std::optional<int> max_terms = std::nullopt);

/// Truncated Cauchy product.
TruncatedVector convolve(const TruncatedVector& f, const TruncatedVector& g);
TruncatedVector multiply(const Polynomial& p, const TruncatedVector& f);

/// Multiply by the unimodular scalar that makes the first coefficient above
/// tol.rank * max|f_j| positive real.
TruncatedVector normalize_phase(const TruncatedVector& f, const ToleranceConfig& tol);

struct BlaschkeFit {
  BlaschkeProduct theta;
  double residual = 0.0;  // ||f - theta|| after normalization
  std::vector<double> hankel_sigma_min;  // smallest singular value per tried degree
};

/// Recover a finite Blaschke product from unit-norm Taylor data with
/// f(0) != 0: the smallest degree whose coefficient Hankel system has a
/// null vector gives the denominator, whose roots are the reflected zeros.
/// The result is normalized. Throws ExtractionError when no degree up to
/// max_degree fits.
BlaschkeFit fit_blaschke(const TruncatedVector& f, const ToleranceConfig& tol,
                         int max_degree = 8);

}  // namespace hardy
