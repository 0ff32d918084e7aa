#pragma once

// Truncated Hardy-space linear algebra: coefficient vectors, operator
// matrices in the monomial basis, ordered orthonormal subspaces, numerical
// rank and Krylov closures.
//
// Every subspace basis in this library is *ordered*: its columns come from
// Gram-Schmidt over a generator sequence, so each prefix of columns spans
// the finite section generated by the first generators. Checks that apply
// an operator to a subspace use a column prefix that stays `slack` columns
// away from the last generator (the frontier).

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hardy {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

struct ToleranceConfig {
  double rank = 1e-8;   // relative singular-value cutoff
  double orth = 1e-10;  // orthonormality of computed bases
  double res = 1e-8;    // membership / invariance residuals
  double angle = 1e-6;  // principal angle for subspace equality

  /// Throws ConfigError unless every tolerance is positive and rank < 1.
  void validate() const;
};

struct TruncationConfig {
  int working_order = 128;
  int margin = 32;  // generators stop at degree working_order - margin
  int slack = 16;   // frontier columns skipped when checking an ordered basis

  /// Defaults scaled for a given working order (margin and slack shrink
  /// below order 128).
  static TruncationConfig for_order(int working_order);

  int trusted_order() const { return working_order - margin; }
  void validate() const;
};

/// Element of H^2 stored as monomial coefficients 0..N_w-1. Indices below
/// trusted_order() are exact for the modelled infinite series.
class TruncatedVector {
 public:
  explicit TruncatedVector(int working_order = 1);
  TruncatedVector(CVector coeffs, int trusted_order);

  static TruncatedVector from_coefficients(std::span<const Complex> coeffs, int working_order);
  static TruncatedVector monomial(int degree, int working_order);

  int working_order() const { return static_cast<int>(coeffs_.size()); }
  int trusted_order() const { return trusted_; }
  const CVector& coeffs() const { return coeffs_; }
  Complex operator[](int j) const { return coeffs_[j]; }

  double norm() const { return coeffs_.norm(); }
  double norm_squared() const { return coeffs_.squaredNorm(); }

  /// Horner evaluation of the stored coefficients at w.
  Complex evaluate(Complex w) const;

  TruncatedVector with_trusted_order(int trusted) const;
  TruncatedVector normalized() const;

  TruncatedVector& operator+=(const TruncatedVector& other);
  TruncatedVector& operator-=(const TruncatedVector& other);
  TruncatedVector& operator*=(Complex s);

 private:
  CVector coeffs_;
  int trusted_ = 0;
};

TruncatedVector operator+(TruncatedVector a, const TruncatedVector& b);
TruncatedVector operator-(TruncatedVector a, const TruncatedVector& b);
TruncatedVector operator*(Complex s, TruncatedVector a);

/// Hardy-space pairing sum_j conj(g_j) f_j.
Complex inner_product(const TruncatedVector& f, const TruncatedVector& g);

/// z^k f; coefficients pushed past the working order are dropped and the
/// trusted order drops by k.
TruncatedVector mul_by_z(const TruncatedVector& f, int k);

enum class BasisTag { Monomial, FBasis };

enum class Background { Zero, Shift };

/// Entries outside the top-left rows x cols block equal the background:
/// zero, or the M_z pattern (ones on the first subdiagonal).
struct FiniteSupport {
  int rows = 0;
  int cols = 0;
  Background background = Background::Zero;
};

class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(CMatrix entries, BasisTag basis = BasisTag::Monomial,
                          std::optional<FiniteSupport> support = std::nullopt);

  static OperatorMatrix identity(int working_order);
  static OperatorMatrix zero(int working_order);
  /// [M_z] in the monomial basis.
  static OperatorMatrix shift(int working_order);

  int working_order() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& entries() const { return entries_; }
  Complex operator()(int i, int j) const { return entries_(i, j); }
  BasisTag basis() const { return basis_; }
  const std::optional<FiniteSupport>& finite_support() const { return support_; }

  /// Exact scan of the declared support pattern; true when none is declared.
  bool support_holds() const;

  /// Rows an application can push mass upward, measured on the columns
  /// outside the declared finite support (all columns when undeclared).
  int band_growth() const { return band_growth_; }

  bool is_lower_triangular() const;

  /// T f, trusted order reduced by band_growth().
  TruncatedVector apply(const TruncatedVector& f) const;

  OperatorMatrix adjoint() const;
  OperatorMatrix with_basis(BasisTag basis) const;

 private:
  CMatrix entries_;
  BasisTag basis_ = BasisTag::Monomial;
  std::optional<FiniteSupport> support_;
  int band_growth_ = 0;
};

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);

/// T^k by repeated multiplication (k >= 0).
OperatorMatrix power(const OperatorMatrix& t, int k);

/// p(T) f = sum_k p_k T^k f via Horner. Throws TruncationError when the
/// trusted region would be exhausted.
TruncatedVector poly_apply(std::span<const Complex> p, const OperatorMatrix& t,
                           const TruncatedVector& f);

/// Ordered orthonormal basis (N_w x d) of a closed subspace section.
class Subspace {
 public:
  Subspace() = default;
  Subspace(CMatrix basis, int trusted_order);

  static Subspace zero(int working_order);
  static Subspace full(int working_order);

  int dim() const { return static_cast<int>(basis_.cols()); }
  int working_order() const { return static_cast<int>(basis_.rows()); }
  int trusted_order() const { return trusted_; }
  const CMatrix& basis() const { return basis_; }

  Subspace prefix(int columns) const;
  TruncatedVector column(int j) const;

  /// Orthogonal projection P_M v.
  CVector project(const CVector& v) const;

  /// max |B*B - I| entry.
  double orthonormality_defect() const;

 private:
  CMatrix basis_;
  int trusted_ = 0;
};

struct RankDiagnostics {
  int rank = 0;
  std::vector<double> singular_values;  // descending
  double cutoff = 0.0;                  // absolute threshold used
  /// sigma_rank / sigma_{rank+1}; infinity when no singular value follows.
  double gap = 0.0;
};

/// Count of singular values above tol.rank * sigma_max; 0 for the zero matrix.
int numerical_rank(const CMatrix& a, const ToleranceConfig& tol);
RankDiagnostics rank_diagnostics(const CMatrix& a, const ToleranceConfig& tol);

/// Ordered Gram-Schmidt (two passes). Vectors whose residual drops below
/// tol.rank * (largest input norm) are discarded.
Subspace orthonormalize(std::span<const TruncatedVector> vectors, const ToleranceConfig& tol);
Subspace orthonormalize_columns(const CMatrix& columns, int trusted_order,
                                const ToleranceConfig& tol);

/// Number of leading columns used as the domain of a check: d - slack when
/// d > slack, else d.
int domain_dimension(const Subspace& m, int slack);

/// ||(I - P_M) T Q_dom||_2 where Q_dom is the frontier-safe prefix of M.
double invariance_residual(const Subspace& m, const OperatorMatrix& t, int slack);

/// Ordered orthonormal basis of T M (T applied to every column of M).
Subspace image(const OperatorMatrix& t, const Subspace& m, const ToleranceConfig& tol);

/// M minus T M. The complement of T Q_dom inside M is computed, and the
/// directions that live inside the frontier-safe prefix are kept; the
/// remaining complement directions belong to the truncation frontier.
Subspace subspace_difference(const Subspace& m, const OperatorMatrix& t,
                             const ToleranceConfig& tol, int slack);

/// Ordered orthonormalization of {f, T f, ..., T^depth f}.
Subspace krylov_closure(const OperatorMatrix& t, const TruncatedVector& f, int depth,
                        const ToleranceConfig& tol);

/// Principal angles (ascending) between the two spans, min(d1, d2) values.
std::vector<double> principal_angles(const Subspace& a, const Subspace& b);

/// Largest principal angle of `inner` measured against `outer`; pi/2 when
/// inner has more dimensions than outer.
double containment_angle(const Subspace& inner, const Subspace& outer);

struct SubspaceComparison {
  double a_in_b = 0.0;  // frontier-safe prefix of a against all of b
  double b_in_a = 0.0;
  bool equal = false;
};

/// Equality at truncation: each frontier-safe prefix lies inside the other
/// subspace within tol.angle.
SubspaceComparison compare_on_trusted_block(const Subspace& a, const Subspace& b,
                                            const ToleranceConfig& tol, int slack);

/// (S*S)^{-1} S* for a lower-triangular S whose S*S - I is finitely
/// supported. Throws NotLeftInvertibleError when that block is singular.
OperatorMatrix left_inverse(const OperatorMatrix& s, const ToleranceConfig& tol);

}  // namespace hardy
