#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hardy/errors.hpp"
#include "hardy/hardy_core.hpp"
#include "hardy/inner_functions.hpp"
#include "hardy/invariant_subspaces.hpp"
#include "hardy/shifts.hpp"
#include "oracles.hpp"

using namespace hardy;

namespace {

constexpr int kN = 64;

TruncatedVector vec(std::vector<Complex> c, int n = kN) {
  return TruncatedVector::from_coefficients(c, n);
}

CMatrix random_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

CMatrix random_unitary(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(n, n, rng));
  return qr.householderQ() * CMatrix::Identity(n, n);
}

}  // namespace

TEST(InnerProduct, MonomialsAreOrthonormal) {
  EXPECT_EQ(inner_product(vec({0, 1}), vec({0, 1})), Complex(1.0));
  EXPECT_EQ(inner_product(vec({1, 1}), vec({1, -1})), Complex(0.0));
}

TEST(InnerProduct, ConjugatesSecondArgument) {
  const Complex i(0.0, 1.0);
  EXPECT_EQ(inner_product(vec({i}), vec({1})), i);
  EXPECT_EQ(inner_product(vec({1}), vec({i})), -i);
}

TEST(InnerProduct, BlaschkeAgainstZSquared) {
  const TruncatedVector theta = blaschke_taylor(BlaschkeProduct(1.0, {0.5}), kN);
  const TruncatedVector z2 = TruncatedVector::monomial(2, kN);
  EXPECT_NEAR(std::abs(inner_product(theta, z2) - Complex(-3.0 / 8.0)), 0.0, 1e-15);
}

TEST(InnerProduct, MismatchedOrdersThrow) {
  EXPECT_THROW(inner_product(vec({1}, 8), vec({1}, 16)), DimensionError);
}

TEST(MulByZ, ShiftsCoefficientsAndTrustedOrder) {
  const TruncatedVector one = mul_by_z(vec({1}), 1);
  EXPECT_EQ(one[0], Complex(0.0));
  EXPECT_EQ(one[1], Complex(1.0));

  const TruncatedVector ab = mul_by_z(vec({2, 3}), 2);
  EXPECT_EQ(ab[2], Complex(2.0));
  EXPECT_EQ(ab[3], Complex(3.0));
  EXPECT_EQ(ab[0], Complex(0.0));
  EXPECT_EQ(ab.working_order(), kN);

  const TruncatedVector t = TruncatedVector::monomial(0, kN);
  EXPECT_EQ(mul_by_z(t, 3).trusted_order(), kN - 3);
  EXPECT_EQ(mul_by_z(t, 2 * kN).trusted_order(), 0);
}

TEST(MulByZ, DropsCoefficientsPastWorkingOrder) {
  const TruncatedVector top = TruncatedVector::monomial(kN - 1, kN);
  EXPECT_EQ(mul_by_z(top, 1).norm(), 0.0);
}

TEST(PolyApply, ConstantIsIdentity) {
  const NShift s = tridiagonal_one_shift(1.0, 1.0, kN);
  const TruncatedVector f = vec({1, 2, 3});
  const std::vector<Complex> p{1.0};
  EXPECT_EQ((poly_apply(p, s.S, f).coeffs() - f.coeffs()).norm(), 0.0);
}

TEST(PolyApply, ZOnTheShift) {
  const std::vector<Complex> p{0.0, 1.0};
  const TruncatedVector r = poly_apply(p, OperatorMatrix::shift(kN), vec({1}));
  EXPECT_EQ((r.coeffs() - vec({0, 1}).coeffs()).norm(), 0.0);
}

TEST(PolyApply, OnePlusZSquaredOnTheOneShift) {
  // S 1 = z + z^2 and S z^m = z^{m+1}, so (1 + S^2) 1 = 1 + z^2 + z^3.
  const NShift s = tridiagonal_one_shift(1.0, 1.0, kN);
  const std::vector<Complex> p{1.0, 0.0, 1.0};
  const TruncatedVector r = poly_apply(p, s.S, vec({1}));
  EXPECT_EQ((r.coeffs() - vec({1, 0, 1, 1}).coeffs()).norm(), 0.0);
}

TEST(PolyApply, ExhaustingTrustedRegionThrows) {
  std::vector<Complex> p(kN + 1, 0.0);
  p.back() = 1.0;
  EXPECT_THROW(poly_apply(p, OperatorMatrix::shift(kN), vec({1})), TruncationError);
}

TEST(OperatorMatrix, ApplyIsLinear) {
  std::mt19937_64 rng(11);
  const NShift s = shift_from_kernel(random_kernel(2, 0.9, rng), kN);
  const CVector a = random_matrix(kN, 1, rng).col(0);
  const CVector b = random_matrix(kN, 1, rng).col(0);
  const Complex lambda(0.3, -1.7);
  const TruncatedVector fa(a, kN), fb(b, kN);
  const TruncatedVector lhs = s.S.apply(fa + lambda * fb);
  const TruncatedVector rhs = s.S.apply(fa) + lambda * s.S.apply(fb);
  EXPECT_LT((lhs.coeffs() - rhs.coeffs()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Orthonormalize, SpanCounts) {
  const ToleranceConfig tol;
  const std::vector<TruncatedVector> two{vec({1}), vec({0, 1})};
  EXPECT_EQ(orthonormalize(two, tol).dim(), 2);
  const std::vector<TruncatedVector> dep{vec({1, 1}), vec({2, 2})};
  EXPECT_EQ(orthonormalize(dep, tol).dim(), 1);
  const std::vector<TruncatedVector> zero{vec({0}), vec({0})};
  EXPECT_EQ(orthonormalize(zero, tol).dim(), 0);
}

TEST(Orthonormalize, ShiftsOfBlaschkeAreIndependent) {
  const ToleranceConfig tol;
  const TruncatedVector theta = blaschke_taylor(BlaschkeProduct(1.0, {0.5, Complex(0, -0.4)}), kN);
  std::vector<TruncatedVector> gens;
  const int k = 40;
  for (int j = 0; j <= k; ++j) gens.push_back(mul_by_z(theta, j));
  const Subspace m = orthonormalize(gens, tol);
  EXPECT_EQ(m.dim(), k + 1);
  CMatrix raw(kN, k + 1);
  for (int j = 0; j <= k; ++j) raw.col(j) = gens[static_cast<std::size_t>(j)].coeffs();
  EXPECT_EQ(oracle::rank(raw), k + 1);
}

TEST(Orthonormalize, OutputIsOrthonormalOnRandomInput) {
  std::mt19937_64 rng(5);
  const ToleranceConfig tol;
  for (int trial = 0; trial < 10; ++trial) {
    // 12 columns spanning a 7-dimensional space.
    const CMatrix cols = random_matrix(kN, 7, rng) * random_matrix(7, 12, rng);
    const Subspace m = orthonormalize_columns(cols, kN, tol);
    EXPECT_EQ(m.dim(), 7);
    EXPECT_LT(m.orthonormality_defect(), tol.orth);
  }
}

TEST(NumericalRank, Examples) {
  const ToleranceConfig tol;
  EXPECT_EQ(numerical_rank(CMatrix::Zero(5, 5), tol), 0);
  EXPECT_EQ(numerical_rank(rank_one_two_shift(kN).F.entries(), tol), 1);
}

TEST(NumericalRank, InvariantUnderUnitaryConjugation) {
  std::mt19937_64 rng(3);
  const ToleranceConfig tol;
  for (int r : {1, 4, 9}) {
    const CMatrix a = random_matrix(20, r, rng) * random_matrix(r, 20, rng);
    const CMatrix u = random_unitary(20, rng);
    EXPECT_EQ(numerical_rank(a, tol), r);
    EXPECT_EQ(numerical_rank(u * a * u.adjoint(), tol), r);
  }
}

TEST(NumericalRank, DiagnosticsReportGap) {
  const ToleranceConfig tol;
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 1e-3;
  d(2, 2) = 1e-12;
  const RankDiagnostics r = rank_diagnostics(d, tol);
  EXPECT_EQ(r.rank, 2);
  EXPECT_NEAR(r.gap, 1e9, 1e3);
  ASSERT_EQ(r.singular_values.size(), 3u);
  EXPECT_DOUBLE_EQ(r.singular_values[0], 1.0);
}

TEST(SubspaceDifference, FullSpaceUnderShiftIsConstants) {
  const ToleranceConfig tol;
  const Subspace full = Subspace::full(kN);
  const Subspace w = subspace_difference(full, OperatorMatrix::shift(kN), tol, 8);
  ASSERT_EQ(w.dim(), 1);
  EXPECT_NEAR(std::abs(w.basis()(0, 0)), 1.0, 1e-14);
}

TEST(SubspaceDifference, BeurlingWanderingVector) {
  const ToleranceConfig tol;
  const BlaschkeProduct theta(1.0, {0.5, Complex(-0.2, 0.6)});
  const TruncatedVector t = blaschke_taylor(theta, kN);
  std::vector<TruncatedVector> gens;
  for (int j = 0; j < kN - 16; ++j) gens.push_back(mul_by_z(t, j));
  const Subspace m = orthonormalize(gens, tol);
  const Subspace w = subspace_difference(m, OperatorMatrix::shift(kN), tol, 8);
  ASSERT_EQ(w.dim(), 1);
  // Gram-Schmidt oracle: the first generator, theta itself, is the
  // wandering vector.
  const CVector ref = oracle::to_eigen(oracle::blaschke_series(1.0, {0.5, Complex(-0.2, 0.6)}, kN));
  const Complex c = ref.head(40).normalized().dot(w.basis().col(0).head(40));
  EXPECT_NEAR(std::abs(c), 1.0, 1e-12);
}

TEST(SubspaceDifference, OrthogonalToImage) {
  std::mt19937_64 rng(8);
  const ToleranceConfig tol;
  const TruncationConfig trunc = TruncationConfig::for_order(kN);
  const NShift s = shift_from_kernel(random_kernel(2, 0.9, rng), kN);
  const KrylovSeed seed = random_krylov_seed(s, rng, 1, trunc);
  const Subspace m = krylov_closure(s.S, seed.f, default_krylov_depth(trunc, 2, 1), tol);
  const Subspace w = subspace_difference(m, s.S, tol, trunc.slack);
  const int dom = domain_dimension(m, trunc.slack);
  const CMatrix img = s.S.entries() * m.basis().leftCols(dom);
  EXPECT_LT((w.basis().adjoint() * img).cwiseAbs().maxCoeff(), tol.res);
}

TEST(KrylovClosure, ShiftOfOneFillsTheSpace) {
  const ToleranceConfig tol;
  const Subspace m = krylov_closure(OperatorMatrix::shift(kN), vec({1}), kN - 1, tol);
  EXPECT_EQ(m.dim(), kN);
}

TEST(KrylovClosure, ShiftOfBlaschkeIsThetaH2) {
  const ToleranceConfig tol;
  const BlaschkeProduct theta(1.0, {0.3, Complex(0, 0.5)});
  const TruncatedVector t = blaschke_taylor(theta, kN);
  const Subspace k = krylov_closure(OperatorMatrix::shift(kN), t, 40, tol);
  CMatrix explicit_basis(kN, 41);
  for (int j = 0; j <= 40; ++j) explicit_basis.col(j) = mul_by_z(t, j).coeffs();
  const Subspace e = orthonormalize_columns(explicit_basis, kN, tol);
  for (double a : principal_angles(k, e)) EXPECT_LT(a, 1e-10);
}

TEST(KrylovClosure, DepthBeyondTrustedRegionThrows) {
  const ToleranceConfig tol;
  EXPECT_THROW(krylov_closure(OperatorMatrix::shift(kN), vec({1}), kN, tol), TruncationError);
}

TEST(PrincipalAngles, Basics) {
  const ToleranceConfig tol;
  const std::vector<TruncatedVector> a{vec({1})};
  const std::vector<TruncatedVector> b{vec({0, 1})};
  const Subspace sa = orthonormalize(a, tol);
  const Subspace sb = orthonormalize(b, tol);
  EXPECT_NEAR(principal_angles(sa, sa)[0], 0.0, 1e-15);
  EXPECT_NEAR(principal_angles(sa, sb)[0], std::numbers::pi / 2, 1e-15);
}

TEST(PrincipalAngles, SmallAnglesAreResolved) {
  // atan2-based angles keep precision far below sqrt(machine epsilon).
  const ToleranceConfig tol;
  const double eps = 1e-11;
  const std::vector<TruncatedVector> a{vec({1})};
  const std::vector<TruncatedVector> b{vec({1, eps})};
  const double angle = principal_angles(orthonormalize(a, tol), orthonormalize(b, tol))[0];
  EXPECT_NEAR(angle, eps, 1e-20);
}

TEST(LeftInverse, ShiftGivesBackwardShift) {
  const ToleranceConfig tol;
  const OperatorMatrix l = left_inverse(OperatorMatrix::shift(kN), tol);
  EXPECT_LT((l.entries() - oracle::shift(kN).adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(LeftInverse, TwoShiftExample) {
  const ToleranceConfig tol;
  const NShift s = rank_one_two_shift(kN);
  const OperatorMatrix l = left_inverse(s.S, tol);
  const int t = kN - 8;
  const CMatrix ls = (l.entries() * s.S.entries()).topLeftCorner(t, t);
  EXPECT_LT((ls - CMatrix::Identity(t, t)).cwiseAbs().maxCoeff(), 1e-12);
  // Oracle: the normal-equation solve done densely.
  const CMatrix& sm = s.S.entries();
  const CMatrix direct = (sm.adjoint() * sm).topLeftCorner(t, t).inverse() *
                         sm.adjoint().topRows(t);
  EXPECT_LT((l.entries().topRows(t) - direct).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LeftInverse, RandomValidShiftsProperty) {
  std::mt19937_64 rng(21);
  const ToleranceConfig tol;
  for (int trial = 0; trial < 20; ++trial) {
    const NShift s = shift_from_kernel(random_kernel(1 + trial % 3, 0.9, rng), kN);
    ASSERT_TRUE(s.validation.passed());
    const OperatorMatrix l = left_inverse(s.S, tol);
    const int t = kN - 8;
    const CMatrix ls = (l.entries() * s.S.entries()).topLeftCorner(t, t);
    EXPECT_LT((ls - CMatrix::Identity(t, t)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(LeftInverse, ZeroDiagonalKernelIsRejected) {
  EXPECT_THROW(TridiagonalKernel(1, {0.0}, {1.0}), InvalidKernelError);
}

TEST(InvarianceResidual, ZkH2UnderShift) {
  const ToleranceConfig tol;
  std::vector<TruncatedVector> gens;
  for (int j = 3; j < kN; ++j) gens.push_back(TruncatedVector::monomial(j, kN));
  const Subspace m = orthonormalize(gens, tol);
  EXPECT_LT(invariance_residual(m, OperatorMatrix::shift(kN), 8), 1e-15);
  EXPECT_GT(invariance_residual(m, OperatorMatrix::shift(kN).adjoint(), 8), 0.5);
}

TEST(Tolerances, Validation) {
  ToleranceConfig t;
  EXPECT_NO_THROW(t.validate());
  t.rank = 1.5;
  EXPECT_THROW(t.validate(), ConfigError);
  t = ToleranceConfig{};
  t.res = 0.0;
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Truncation, ForOrderScalesMarginAndSlack) {
  const TruncationConfig a = TruncationConfig::for_order(128);
  EXPECT_EQ(a.margin, 32);
  EXPECT_EQ(a.slack, 16);
  const TruncationConfig b = TruncationConfig::for_order(32);
  EXPECT_EQ(b.margin, 8);
  EXPECT_EQ(b.slack, 8);
  EXPECT_EQ(b.trusted_order(), 24);
}
