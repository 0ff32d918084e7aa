#include "hardy/hardy_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hardy/errors.hpp"
#include "svd.hpp"

namespace hardy {

namespace {

void require_same_order(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": working orders differ (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

using detail::singular_values;

double spectral_norm(const CMatrix& a) {
  const auto s = singular_values(a);
  return s.size() == 0 ? 0.0 : s(0);
}

int compute_band_growth(const CMatrix& m, const std::optional<FiniteSupport>& support) {
  const int first_col = support ? std::min<int>(support->cols, static_cast<int>(m.cols())) : 0;
  int growth = 0;
  for (int j = first_col; j < m.cols(); ++j) {
    for (int i = static_cast<int>(m.rows()) - 1; i > j + growth; --i) {
      if (m(i, j) != Complex(0.0)) {
        growth = i - j;
        break;
      }
    }
  }
  return growth;
}

}  // namespace

void ToleranceConfig::validate() const {
  if (!(rank > 0.0 && orth > 0.0 && res > 0.0 && angle > 0.0)) {
    throw ConfigError("tolerances must be strictly positive");
  }
  if (!(rank < 1.0)) throw ConfigError("rank tolerance must be < 1");
}

TruncationConfig TruncationConfig::for_order(int working_order) {
  TruncationConfig cfg;
  cfg.working_order = working_order;
  cfg.margin = std::clamp(working_order / 4, 8, 32);
  cfg.slack = std::clamp(working_order / 8, 8, 16);
  return cfg;
}

void TruncationConfig::validate() const {
  if (working_order < 16) throw ConfigError("working order must be at least 16");
  if (margin < 0 || slack < 1) throw ConfigError("margin must be >= 0 and slack >= 1");
  if (margin + 2 * slack >= working_order) {
    throw ConfigError("margin + 2*slack must stay below the working order");
  }
}

// ---------------------------------------------------------------------------
// TruncatedVector

TruncatedVector::TruncatedVector(int working_order)
    : coeffs_(CVector::Zero(std::max(working_order, 0))), trusted_(std::max(working_order, 0)) {
  if (working_order < 1) throw DimensionError("working order must be positive");
}

TruncatedVector::TruncatedVector(CVector coeffs, int trusted_order)
    : coeffs_(std::move(coeffs)), trusted_(trusted_order) {
  if (coeffs_.size() < 1) throw DimensionError("working order must be positive");
  trusted_ = std::clamp(trusted_, 0, working_order());
}

TruncatedVector TruncatedVector::from_coefficients(std::span<const Complex> coeffs,
                                                   int working_order) {
  CVector v = CVector::Zero(working_order);
  const int n = std::min<int>(working_order, static_cast<int>(coeffs.size()));
  for (int j = 0; j < n; ++j) v[j] = coeffs[j];
  return TruncatedVector(std::move(v), working_order);
}

TruncatedVector TruncatedVector::monomial(int degree, int working_order) {
  TruncatedVector v(working_order);
  if (degree >= 0 && degree < working_order) v.coeffs_[degree] = 1.0;
  return v;
}

Complex TruncatedVector::evaluate(Complex w) const {
  Complex acc = 0.0;
  for (Eigen::Index j = coeffs_.size() - 1; j >= 0; --j) acc = acc * w + coeffs_[j];
  return acc;
}

TruncatedVector TruncatedVector::with_trusted_order(int trusted) const {
  TruncatedVector out = *this;
  out.trusted_ = std::clamp(trusted, 0, working_order());
  return out;
}

TruncatedVector TruncatedVector::normalized() const {
  const double n = norm();
  if (n == 0.0) return *this;
  TruncatedVector out = *this;
  out.coeffs_ /= n;
  return out;
}

TruncatedVector& TruncatedVector::operator+=(const TruncatedVector& other) {
  require_same_order(working_order(), other.working_order(), "vector sum");
  coeffs_ += other.coeffs_;
  trusted_ = std::min(trusted_, other.trusted_);
  return *this;
}

TruncatedVector& TruncatedVector::operator-=(const TruncatedVector& other) {
  require_same_order(working_order(), other.working_order(), "vector difference");
  coeffs_ -= other.coeffs_;
  trusted_ = std::min(trusted_, other.trusted_);
  return *this;
}

TruncatedVector& TruncatedVector::operator*=(Complex s) {
  coeffs_ *= s;
  return *this;
}

TruncatedVector operator+(TruncatedVector a, const TruncatedVector& b) { return a += b; }
TruncatedVector operator-(TruncatedVector a, const TruncatedVector& b) { return a -= b; }
TruncatedVector operator*(Complex s, TruncatedVector a) { return a *= s; }

Complex inner_product(const TruncatedVector& f, const TruncatedVector& g) {
  require_same_order(f.working_order(), g.working_order(), "inner product");
  // Eigen's dot conjugates its left operand.
  return g.coeffs().dot(f.coeffs());
}

TruncatedVector mul_by_z(const TruncatedVector& f, int k) {
  if (k < 0) throw PreconditionError("mul_by_z: negative power");
  const int n = f.working_order();
  CVector out = CVector::Zero(n);
  if (k < n) out.tail(n - k) = f.coeffs().head(n - k);
  return TruncatedVector(std::move(out), std::max(0, f.trusted_order() - k));
}

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(CMatrix entries, BasisTag basis,
                               std::optional<FiniteSupport> support)
    : entries_(std::move(entries)), basis_(basis), support_(support) {
  if (entries_.rows() != entries_.cols()) {
    throw DimensionError("operator matrix must be square");
  }
  band_growth_ = compute_band_growth(entries_, support_);
}

OperatorMatrix OperatorMatrix::identity(int working_order) {
  return OperatorMatrix(CMatrix::Identity(working_order, working_order), BasisTag::Monomial,
                        FiniteSupport{0, 0, Background::Zero});
}

OperatorMatrix OperatorMatrix::zero(int working_order) {
  return OperatorMatrix(CMatrix::Zero(working_order, working_order), BasisTag::Monomial,
                        FiniteSupport{0, 0, Background::Zero});
}

OperatorMatrix OperatorMatrix::shift(int working_order) {
  CMatrix m = CMatrix::Zero(working_order, working_order);
  for (int j = 0; j + 1 < working_order; ++j) m(j + 1, j) = 1.0;
  return OperatorMatrix(std::move(m), BasisTag::Monomial, FiniteSupport{0, 0, Background::Shift});
}

bool OperatorMatrix::support_holds() const {
  if (!support_) return true;
  const int n = working_order();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i < support_->rows && j < support_->cols) continue;
      Complex background = 0.0;
      if (support_->background == Background::Shift && i == j + 1) background = 1.0;
      if (entries_(i, j) != background) return false;
    }
  }
  return true;
}

bool OperatorMatrix::is_lower_triangular() const {
  const int n = working_order();
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      if (entries_(i, j) != Complex(0.0)) return false;
  return true;
}

TruncatedVector OperatorMatrix::apply(const TruncatedVector& f) const {
  require_same_order(working_order(), f.working_order(), "operator apply");
  return TruncatedVector(entries_ * f.coeffs(), f.trusted_order() - band_growth_);
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(entries_.adjoint(), basis_, std::nullopt);
}

OperatorMatrix OperatorMatrix::with_basis(BasisTag basis) const {
  OperatorMatrix out = *this;
  out.basis_ = basis;
  return out;
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_order(a.working_order(), b.working_order(), "operator product");
  return OperatorMatrix(a.entries() * b.entries(), a.basis());
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_order(a.working_order(), b.working_order(), "operator sum");
  return OperatorMatrix(a.entries() + b.entries(), a.basis());
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_order(a.working_order(), b.working_order(), "operator difference");
  return OperatorMatrix(a.entries() - b.entries(), a.basis());
}

OperatorMatrix power(const OperatorMatrix& t, int k) {
  if (k < 0) throw PreconditionError("negative operator power");
  if (k == 0) return OperatorMatrix::identity(t.working_order()).with_basis(t.basis());
  CMatrix acc = t.entries();
  for (int i = 1; i < k; ++i) acc = t.entries() * acc;
  return OperatorMatrix(std::move(acc), t.basis());
}

TruncatedVector poly_apply(std::span<const Complex> p, const OperatorMatrix& t,
                           const TruncatedVector& f) {
  require_same_order(t.working_order(), f.working_order(), "poly_apply");
  int degree = static_cast<int>(p.size()) - 1;
  while (degree > 0 && p[degree] == Complex(0.0)) --degree;
  if (degree < 0) return TruncatedVector(f.working_order());
  const int trusted = f.trusted_order() - degree * t.band_growth();
  if (trusted <= 0) {
    throw TruncationError("poly_apply: degree " + std::to_string(degree) +
                          " exhausts the trusted region of order " +
                          std::to_string(f.trusted_order()));
  }
  CVector acc = p[degree] * f.coeffs();
  for (int k = degree - 1; k >= 0; --k) acc = t.entries() * acc + p[k] * f.coeffs();
  return TruncatedVector(std::move(acc), trusted);
}

// ---------------------------------------------------------------------------
// Subspace

Subspace::Subspace(CMatrix basis, int trusted_order)
    : basis_(std::move(basis)), trusted_(trusted_order) {
  if (basis_.cols() > basis_.rows()) {
    throw DimensionError("subspace dimension exceeds the working order");
  }
  trusted_ = std::clamp(trusted_, 0, static_cast<int>(basis_.rows()));
}

Subspace Subspace::zero(int working_order) {
  return Subspace(CMatrix(working_order, 0), working_order);
}

Subspace Subspace::full(int working_order) {
  return Subspace(CMatrix::Identity(working_order, working_order), working_order);
}

Subspace Subspace::prefix(int columns) const {
  columns = std::clamp(columns, 0, dim());
  return Subspace(basis_.leftCols(columns), trusted_);
}

TruncatedVector Subspace::column(int j) const {
  return TruncatedVector(basis_.col(j), trusted_);
}

CVector Subspace::project(const CVector& v) const {
  if (dim() == 0) return CVector::Zero(v.size());
  return basis_ * (basis_.adjoint() * v);
}

double Subspace::orthonormality_defect() const {
  if (dim() == 0) return 0.0;
  const CMatrix g = basis_.adjoint() * basis_ - CMatrix::Identity(dim(), dim());
  return g.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Rank

RankDiagnostics rank_diagnostics(const CMatrix& a, const ToleranceConfig& tol) {
  RankDiagnostics d;
  const auto s = singular_values(a);
  d.singular_values.assign(s.data(), s.data() + s.size());
  if (s.size() == 0 || s(0) == 0.0) {
    d.gap = std::numeric_limits<double>::infinity();
    return d;
  }
  d.cutoff = tol.rank * s(0);
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > d.cutoff) ++d.rank;
  if (d.rank < s.size()) {
    const double next = s(d.rank);
    d.gap = next > 0.0 ? s(d.rank - 1) / next : std::numeric_limits<double>::infinity();
  } else {
    d.gap = std::numeric_limits<double>::infinity();
  }
  return d;
}

int numerical_rank(const CMatrix& a, const ToleranceConfig& tol) {
  return rank_diagnostics(a, tol).rank;
}

// ---------------------------------------------------------------------------
// Orthonormalization

Subspace orthonormalize_columns(const CMatrix& columns, int trusted_order,
                                const ToleranceConfig& tol) {
  const int n = static_cast<int>(columns.rows());
  double max_norm = 0.0;
  for (Eigen::Index j = 0; j < columns.cols(); ++j)
    max_norm = std::max(max_norm, columns.col(j).norm());
  CMatrix q(n, std::min<Eigen::Index>(columns.cols(), n));
  int d = 0;
  if (max_norm == 0.0) return Subspace(CMatrix(n, 0), trusted_order);
  const double cutoff = tol.rank * max_norm;
  for (Eigen::Index j = 0; j < columns.cols() && d < n; ++j) {
    CVector v = columns.col(j);
    for (int pass = 0; pass < 2 && d > 0; ++pass) {
      v -= q.leftCols(d) * (q.leftCols(d).adjoint() * v);
    }
    const double r = v.norm();
    if (r <= cutoff) continue;
    q.col(d++) = v / r;
  }
  return Subspace(q.leftCols(d), trusted_order);
}

Subspace orthonormalize(std::span<const TruncatedVector> vectors, const ToleranceConfig& tol) {
  if (vectors.empty()) throw PreconditionError("orthonormalize: empty vector list");
  const int n = vectors.front().working_order();
  CMatrix cols(n, static_cast<Eigen::Index>(vectors.size()));
  int trusted = n;
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    require_same_order(n, vectors[j].working_order(), "orthonormalize");
    cols.col(static_cast<Eigen::Index>(j)) = vectors[j].coeffs();
    trusted = std::min(trusted, vectors[j].trusted_order());
  }
  return orthonormalize_columns(cols, trusted, tol);
}

// ---------------------------------------------------------------------------
// Subspace operations

int domain_dimension(const Subspace& m, int slack) {
  return m.dim() > slack ? m.dim() - slack : m.dim();
}

double invariance_residual(const Subspace& m, const OperatorMatrix& t, int slack) {
  require_same_order(m.working_order(), t.working_order(), "invariance residual");
  const int dom = domain_dimension(m, slack);
  if (dom == 0) return 0.0;
  const CMatrix image_cols = t.entries() * m.basis().leftCols(dom);
  const CMatrix outside = image_cols - m.basis() * (m.basis().adjoint() * image_cols);
  return spectral_norm(outside);
}

Subspace image(const OperatorMatrix& t, const Subspace& m, const ToleranceConfig& tol) {
  require_same_order(m.working_order(), t.working_order(), "subspace image");
  return orthonormalize_columns(t.entries() * m.basis(),
                                std::max(0, m.trusted_order() - t.band_growth()), tol);
}

Subspace subspace_difference(const Subspace& m, const OperatorMatrix& t,
                             const ToleranceConfig& tol, int slack) {
  require_same_order(m.working_order(), t.working_order(), "subspace difference");
  if (m.dim() == 0) throw PreconditionError("subspace difference of the zero subspace");
  if (m.dim() <= slack) {
    throw TruncationError("subspace difference: dimension " + std::to_string(m.dim()) +
                          " leaves no frontier-safe prefix (slack " + std::to_string(slack) +
                          ")");
  }
  const int dom = m.dim() - slack;
  const CMatrix q_dom = m.basis().leftCols(dom);
  // Compression of T to the prefix; its left null space is the part of the
  // prefix orthogonal to T applied to the prefix.
  const CMatrix y = q_dom.adjoint() * (t.entries() * q_dom);
  const detail::LeftSvd svd = detail::left_svd(y);
  int r = 0;
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i)
    if (svd.sigma(i) > tol.rank * svd.sigma(0)) ++r;
  const CMatrix coords = svd.u.rightCols(dom - r);
  return orthonormalize_columns(q_dom * coords, m.trusted_order(), tol);
}

Subspace krylov_closure(const OperatorMatrix& t, const TruncatedVector& f, int depth,
                        const ToleranceConfig& tol) {
  require_same_order(t.working_order(), f.working_order(), "krylov closure");
  if (depth < 0) throw PreconditionError("krylov depth must be nonnegative");
  if (static_cast<long>(depth) * t.band_growth() >= f.trusted_order()) {
    throw TruncationError("krylov depth " + std::to_string(depth) +
                          " exceeds the trusted region of order " +
                          std::to_string(f.trusted_order()));
  }
  std::vector<TruncatedVector> vectors;
  vectors.reserve(static_cast<std::size_t>(depth) + 1);
  vectors.push_back(f);
  for (int k = 0; k < depth; ++k) vectors.push_back(t.apply(vectors.back()));
  return orthonormalize(vectors, tol);
}

std::vector<double> principal_angles(const Subspace& a, const Subspace& b) {
  require_same_order(a.working_order(), b.working_order(), "principal angles");
  const Subspace& small = a.dim() <= b.dim() ? a : b;
  const Subspace& large = a.dim() <= b.dim() ? b : a;
  const int k = small.dim();
  std::vector<double> angles;
  if (k == 0) return angles;
  const auto cosines = singular_values(small.basis().adjoint() * large.basis());
  const CMatrix outside =
      small.basis() - large.basis() * (large.basis().adjoint() * small.basis());
  auto sines = singular_values(outside);
  // Singular values come sorted descending; pair largest cosine with the
  // smallest sine.
  angles.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double c = i < cosines.size() ? std::min(1.0, cosines(i)) : 0.0;
    const double s = std::min(1.0, sines(k - 1 - i));
    angles[static_cast<std::size_t>(i)] = std::atan2(s, c);
  }
  std::sort(angles.begin(), angles.end());
  return angles;
}

double containment_angle(const Subspace& inner, const Subspace& outer) {
  require_same_order(inner.working_order(), outer.working_order(), "containment angle");
  if (inner.dim() == 0) return 0.0;
  if (inner.dim() > outer.dim()) return std::numbers::pi / 2;
  const CMatrix outside = outer.dim() == 0
                              ? inner.basis()
                              : CMatrix(inner.basis() -
                                        outer.basis() * (outer.basis().adjoint() * inner.basis()));
  return std::asin(std::min(1.0, spectral_norm(outside)));
}

SubspaceComparison compare_on_trusted_block(const Subspace& a, const Subspace& b,
                                            const ToleranceConfig& tol, int slack) {
  SubspaceComparison c;
  c.a_in_b = containment_angle(a.prefix(domain_dimension(a, slack)), b);
  c.b_in_a = containment_angle(b.prefix(domain_dimension(b, slack)), a);
  c.equal = c.a_in_b < tol.angle && c.b_in_a < tol.angle;
  return c;
}

OperatorMatrix left_inverse(const OperatorMatrix& s, const ToleranceConfig& tol) {
  const int n = s.working_order();
  if (!s.is_lower_triangular()) {
    throw PreconditionError("left_inverse expects a lower-triangular shift matrix");
  }
  const CMatrix gram = s.entries().adjoint() * s.entries();
  // The last row/column of the truncated Gram matrix misses |S e_{N-1}|^2.
  int block = 0;
  for (int i = 0; i < n - 1; ++i) {
    for (int j = 0; j < n - 1; ++j) {
      const Complex expected = i == j ? Complex(1.0) : Complex(0.0);
      if (std::abs(gram(i, j) - expected) > 0.0) block = std::max(block, std::max(i, j) + 1);
    }
  }
  if (block >= n - 1) {
    throw TruncationError("left_inverse: Gram perturbation reaches the truncation boundary");
  }
  CMatrix gram_inv = CMatrix::Identity(n, n);
  if (block > 0) {
    const CMatrix b = gram.topLeftCorner(block, block);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(b);
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(min_eig > tol.rank * std::max(1.0, eig.eigenvalues().maxCoeff()))) {
      throw NotLeftInvertibleError("S*S block is singular (min eigenvalue " +
                                   std::to_string(min_eig) + ")");
    }
    gram_inv.topLeftCorner(block, block) = b.inverse();
  }
  return OperatorMatrix(gram_inv * s.entries().adjoint(), s.basis());
}

}  // namespace hardy
