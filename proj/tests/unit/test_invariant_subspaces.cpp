#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hardy/errors.hpp"
#include "hardy/invariant_subspaces.hpp"
#include "oracles.hpp"

using namespace hardy;

namespace {

const ToleranceConfig kTol;

// span{z^{shift+k} theta : k = 0..count-1} from the closed-form Taylor series.
Subspace shifted_theta_span(const BlaschkeProduct& theta, int shift, int count, int order,
                            int trusted) {
  const oracle::Vec t = oracle::blaschke_series(theta.constant(), theta.zeros(),
                                                static_cast<std::size_t>(order));
  CMatrix cols = CMatrix::Zero(order, count);
  for (int k = 0; k < count; ++k)
    for (int j = 0; j + shift + k < order; ++j) cols(j + shift + k, k) = t[static_cast<std::size_t>(j)];
  return orthonormalize_columns(cols, trusted, kTol);
}

double vector_angle(const CVector& a, const CVector& b, int rows) {
  const CVector x = a.head(rows), y = b.head(rows);
  const double c = std::abs(x.dot(y)) / (x.norm() * y.norm());
  return std::acos(std::min(1.0, c));
}

NShift unperturbed(int order) { return shift_from_kernel(TridiagonalKernel(1, {1.0}, {0.0}), order); }

}  // namespace

TEST(BuildSubspace, BeurlingCase) {
  const int order = 64;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = unperturbed(order);
  const BlaschkeProduct theta(1.0, {0.5, Complex(0.1, -0.6), 0.0});
  const SubspaceModel model =
      SubspaceModel::from_polynomials(1, theta, {Polynomial({1.0})}, {Polynomial()}, order);
  const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
  EXPECT_LT(b.invariance_residual, 1e-10);
  const Subspace expected = shifted_theta_span(theta, 0, trunc.trusted_order(), order,
                                               trunc.trusted_order());
  EXPECT_TRUE(compare_on_trusted_block(b.M, expected, kTol, trunc.slack).equal);
}

TEST(BuildSubspace, OriginZeroGivesThetaItself) {
  const int order = 64;
  const BlaschkeProduct theta(1.0, {0.0, 0.4});
  const SubspaceModel model = s1_model(1.0, 1.0, theta, order);
  EXPECT_EQ(model.p[0].coeffs(), std::vector<Complex>{1.0});
  EXPECT_TRUE(model.q[0].is_zero());
  const CVector t = blaschke_taylor(theta, order).coeffs();
  EXPECT_LT((model.phi[0].coeffs() - t).norm(), 1e-15);

  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
  // M = [theta]_{M_z} = [theta]_{S}.
  const Subspace mz = krylov_closure(OperatorMatrix::shift(order), model.phi[0],
                                     trunc.trusted_order() - 4, kTol);
  EXPECT_TRUE(compare_on_trusted_block(b.M, mz, kTol, trunc.slack).equal);
}

TEST(BuildSubspace, UnitKernelForm) {
  const int order = 64;
  const BlaschkeProduct theta(1.0, {0.5});
  const SubspaceModel model = s1_model(1.0, 1.0, theta, order);
  // (1 + |theta(0)|^2 z) theta - theta(0) z.
  const oracle::Vec t = oracle::blaschke_series(1.0, {0.5}, order);
  CVector expected = CVector::Zero(order);
  for (int j = 0; j < order; ++j) {
    expected(j) += t[static_cast<std::size_t>(j)];
    if (j + 1 < order) expected(j + 1) += 0.25 * t[static_cast<std::size_t>(j)];
  }
  expected(1) -= 0.5;
  EXPECT_LT((model.phi[0].coeffs() - expected).cwiseAbs().maxCoeff(), 1e-15);

  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  const BuiltSubspace b = build_subspace(model, s, kTol, TruncationConfig::for_order(order));
  EXPECT_LT(b.invariance_residual, 1e-10);
}

TEST(BuildSubspace, RejectsInconsistentModel) {
  const int order = 64;
  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  const BlaschkeProduct theta(1.0, {0.5});
  // Correct p with q dropped breaks orthogonality to z theta H^2.
  const SubspaceModel bad = SubspaceModel::from_polynomials(
      1, theta, {Polynomial({1.0, 0.25})}, {Polynomial()}, order);
  EXPECT_THROW(build_subspace(bad, s, kTol, TruncationConfig::for_order(order)),
               ModelInconsistencyError);
}

TEST(S1Model, PointValues) {
  const SubspaceModel m = s1_model(1.0, 1.0, BlaschkeProduct(1.0, {0.5}), 256);
  const Complex at1 = m.p[0].evaluate(1.0) * blaschke_eval(m.theta, 1.0) - m.q[0].evaluate(1.0);
  const Complex atm1 =
      m.p[0].evaluate(-1.0) * blaschke_eval(m.theta, -1.0) - m.q[0].evaluate(-1.0);
  EXPECT_NEAR(std::abs(at1 - (-7.0 / 4.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(atm1 - 5.0 / 4.0), 0.0, 1e-14);
}

TEST(S1Model, RationalForm) {
  // (1/2)(1 - 11z/4) / (1 - z/2): c_0 = 1/2, c_k = -(9/8) 2^{-(k-1)}.
  const int order = 60;
  const SubspaceModel m = s1_model(1.0, 1.0, BlaschkeProduct(1.0, {0.5}), order);
  EXPECT_NEAR(std::abs(m.phi[0][0] - 0.5), 0.0, 1e-15);
  for (int k = 1; k < order; ++k) {
    const double expected = -(9.0 / 8.0) * std::pow(0.5, k - 1);
    EXPECT_NEAR(std::abs(m.phi[0][k] - expected), 0.0, 1e-15) << k;
  }
}

TEST(S1Model, HypothesisChecked) {
  const BlaschkeProduct theta(1.0, {0.5});
  EXPECT_THROW(s1_model(1.0, 0.0, theta, 64), PreconditionError);
  EXPECT_THROW(s1_model(1.0, 2.0, theta, 64), PreconditionError);
}

TEST(S1Model, AgreesWithGeneralOneShiftModel) {
  const int order = 64;
  const Complex a0(1.2, 0.3), b0(0.4, -0.5);
  const BlaschkeProduct theta(1.0, {Complex(0.3, 0.2), -0.5});
  const SubspaceModel a = s1_model(a0, b0, theta, order);
  const SubspaceModel b = one_shift_model(tridiagonal_one_shift(a0, b0, order), theta);
  EXPECT_LT((a.phi[0].coeffs() - b.phi[0].coeffs()).norm(), 1e-14);
}

TEST(WanderingDimension, FullSpace) {
  const int order = 64;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 3; ++n) {
    const NShift s = shift_from_kernel(random_kernel(n, 0.9, rng), order);
    EXPECT_EQ(wandering_dimension(Subspace::full(order), s, kTol, trunc), 1);
    // ker S* has dimension rank(I - S L) on the trusted block.
    const CMatrix proj = CMatrix::Identity(order, order) -
                         s.S.entries() * left_inverse(s.S, kTol).entries();
    const int t = trunc.trusted_order();
    EXPECT_EQ(oracle::rank(proj.topLeftCorner(t, t)), 1);
  }
}

TEST(WanderingDimension, BeurlingAndUnitKernelSpace) {
  const int order = 64;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const BlaschkeProduct theta(1.0, {0.5});
  const Subspace th = shifted_theta_span(theta, 0, trunc.trusted_order(), order, trunc.trusted_order());
  EXPECT_EQ(wandering_dimension(th, unperturbed(order), kTol, trunc), 1);

  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  const SubspaceModel model = s1_model(1.0, 1.0, theta, order);
  const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
  const Subspace w = subspace_difference(b.M, s.S, kTol, trunc.slack);
  ASSERT_EQ(w.dim(), 1);
  EXPECT_LT(vector_angle(w.basis().col(0), model.phi[0].coeffs(), trunc.trusted_order()), 1e-8);
}

TEST(WanderingDimension, NonInvariantThrows) {
  const int order = 64;
  CMatrix cols = CMatrix::Zero(order, 1);
  cols(0, 0) = 1.0;
  const Subspace span1(cols, order - 16);
  EXPECT_THROW(wandering_dimension(span1, unperturbed(order), kTol, TruncationConfig::for_order(order)),
               PreconditionError);
}

TEST(ExtractModel, BeurlingCase) {
  const int order = 64;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const BlaschkeProduct theta(1.0, {Complex(0.2, 0.5), -0.4});
  const Subspace th = shifted_theta_span(theta, 0, trunc.trusted_order(), order, trunc.trusted_order());
  const ExtractionReport ex = extract_model(th, unperturbed(order), kTol, trunc);
  EXPECT_TRUE(ex.check.passed());
  EXPECT_LT(vector_angle(blaschke_taylor(ex.model.theta, order).coeffs(),
                         blaschke_taylor(theta, order).coeffs(), trunc.trusted_order()),
            1e-8);
  ASSERT_EQ(ex.model.p[0].degree(), 0);
  EXPECT_NEAR(std::abs(ex.model.p[0].coeff(0)), 1.0, 1e-10);
  EXPECT_LT(ex.q_tail[0], 1e-8);
  for (Complex c : ex.model.q[0].coeffs()) EXPECT_LT(std::abs(c), 1e-8);
}

TEST(ExtractModel, RoundTripUnitKernelSpace) {
  const int order = 128;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const BlaschkeProduct theta(1.0, {0.5});
  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  const BuiltSubspace b = build_subspace(s1_model(1.0, 1.0, theta, order), s, kTol, trunc);
  const ExtractionReport ex = extract_model(b.M, s, kTol, trunc);
  ASSERT_TRUE(ex.check.passed());
  ASSERT_EQ(ex.model.theta.degree(), 1);
  EXPECT_NEAR(std::abs(ex.model.theta.zeros()[0] - 0.5), 0.0, 1e-8);
  const Subspace recovered =
      shifted_theta_span(ex.model.theta, 0, trunc.trusted_order(), order, trunc.trusted_order());
  const Subspace truth = shifted_theta_span(theta, 0, trunc.trusted_order(), order, trunc.trusted_order());
  EXPECT_TRUE(compare_on_trusted_block(recovered, truth, kTol, trunc.slack).equal);

  // With the p(0) = 1 scaling: p = 1 + z/4, q = z/2, up to the global phase of theta.
  const Polynomial& p = ex.model.p[0];
  const Complex p0 = p.coeff(0);
  ASSERT_GT(std::abs(p0), 1e-6);
  EXPECT_NEAR(std::abs(p.coeff(1) / p0 - 0.25), 0.0, 1e-8);
  const Complex phase = blaschke_eval(ex.model.theta, 0.0) / blaschke_eval(theta, 0.0);
  const Polynomial& q = ex.model.q[0];
  EXPECT_NEAR(std::abs(q.coeff(0) / p0), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(q.coeff(1) / (p0 * phase) - 0.5), 0.0, 1e-8);
}

TEST(ExtractModel, KrylovClosureOfTwoShift) {
  const int order = 128;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = rank_one_two_shift(order);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3; ++trial) {
    const KrylovSeed seed = random_krylov_seed(s, rng, 2, trunc);
    const Subspace m = krylov_closure(s.S, seed.f, default_krylov_depth(trunc, 2, seed.theta.degree()), kTol);
    const ExtractionReport ex = extract_model(m, s, kTol, trunc);
    EXPECT_TRUE(ex.check.passed()) << ex.check.failure.value_or("");
    EXPECT_LT(ex.check.max_residual(), 1e-6);
    EXPECT_EQ(ex.model.theta.degree(), seed.theta.degree());
  }
}

TEST(ExtractModel, RandomKrylovProperty) {
  const int order = 128;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 1 + trial % 3;
    const NShift s = shift_from_kernel(random_kernel(n, 0.9, rng), order);
    const KrylovSeed seed = random_krylov_seed(s, rng, 2, trunc);
    const Subspace m = krylov_closure(s.S, seed.f, default_krylov_depth(trunc, n, seed.theta.degree()), kTol);
    EXPECT_EQ(wandering_dimension(m, s, kTol, trunc), 1) << trial;
    const ExtractionReport ex = extract_model(m, s, kTol, trunc);
    EXPECT_TRUE(ex.check.passed()) << trial;
    for (double c : ex.check.chain_residuals) EXPECT_LT(c, 1e-6) << trial;
  }
}

TEST(CheckCyclic, UnitKernelSpaceIsCyclic) {
  const int order = 128;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  const SubspaceModel model = s1_model(1.0, 1.0, BlaschkeProduct(1.0, {0.5}), order);
  const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
  const CyclicReport r = check_cyclic(b.M, model, s, kTol, trunc);
  EXPECT_TRUE(r.outer);
  EXPECT_NEAR(r.min_root_modulus, 4.0, 1e-12);
  EXPECT_EQ(r.verdict, "cyclic");
  EXPECT_LT(r.krylov_in_m, 1e-6);
  EXPECT_LT(r.m_in_krylov, 1e-6);
}

TEST(CheckCyclic, BeurlingIsCyclic) {
  const int order = 128;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = unperturbed(order);
  const SubspaceModel model = SubspaceModel::from_polynomials(
      1, BlaschkeProduct(1.0, {Complex(-0.3, 0.3), 0.6}), {Polynomial({1.0})}, {Polynomial()}, order);
  const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
  EXPECT_EQ(check_cyclic(b.M, model, s, kTol, trunc).verdict, "cyclic");
}

TEST(CheckCyclic, InnerRootGivesNotCyclic) {
  // S 1 = z + 4 z^2 and theta(0) = 0.6 give p = 1 + 1.44 z, root inside the disc.
  const int order = 128;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = tridiagonal_one_shift(1.0, 4.0, order);
  const SubspaceModel model = one_shift_model(s, BlaschkeProduct(1.0, {0.6}));
  EXPECT_NEAR(std::abs(model.p[0].coeff(1) - 1.44), 0.0, 1e-14);
  const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
  const CyclicReport r = check_cyclic(b.M, model, s, kTol, trunc);
  EXPECT_FALSE(r.outer);
  EXPECT_NEAR(r.min_root_modulus, 1.0 / 1.44, 1e-12);
  EXPECT_EQ(r.verdict, "not-cyclic");
  // The Krylov closure is a proper subspace of M.
  EXPECT_LT(r.krylov_in_m, 1e-6);
  EXPECT_GT(r.m_in_krylov, 1e-3);
}

TEST(CheckCyclic, HigherMultiplicityNeedsExploratory) {
  const int order = 128;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = rank_one_two_shift(order);
  std::mt19937_64 rng(9);
  const KrylovSeed seed = random_krylov_seed(s, rng, 1, trunc);
  const Subspace m = krylov_closure(s.S, seed.f, default_krylov_depth(trunc, 2, seed.theta.degree()), kTol);
  const ExtractionReport ex = extract_model(m, s, kTol, trunc);
  EXPECT_THROW(check_cyclic(m, ex.model, s, kTol, trunc), UnsupportedError);
  EXPECT_EQ(check_cyclic(m, ex.model, s, kTol, trunc, true).verdict, "empirical");
}

TEST(Codimension, Examples) {
  const int order = 64;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  {
    const NShift s = unperturbed(order);
    const SubspaceModel model = SubspaceModel::from_polynomials(
        1, BlaschkeProduct(1.0, {0.0}), {Polynomial({1.0})}, {Polynomial()}, order);
    const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
    const CodimensionReport r = finite_codimension(b.M, model, trunc);
    EXPECT_EQ(r.numeric, 1);
    EXPECT_TRUE(r.consistent);
  }
  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  for (const auto& theta :
       {BlaschkeProduct(1.0, {0.5}), BlaschkeProduct(1.0, {0.5, Complex(0.1, 0.4), -0.3})}) {
    const SubspaceModel model = s1_model(1.0, 1.0, theta, order);
    const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
    const CodimensionReport r = finite_codimension(b.M, model, trunc);
    EXPECT_EQ(r.numeric, theta.degree());
    EXPECT_TRUE(r.conclusive);
    EXPECT_TRUE(r.consistent);
  }
}

TEST(Codimension, StableAcrossTruncation) {
  const BlaschkeProduct theta(1.0, {0.5, Complex(0.1, 0.4), -0.3});
  std::vector<int> counts;
  for (int order : {48, 64, 96}) {
    const TruncationConfig trunc = TruncationConfig::for_order(order);
    const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
    const SubspaceModel model = s1_model(1.0, 1.0, theta, order);
    const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
    // Count H^2 directions on the leading rows that M misses.
    const int rows = trunc.trusted_order() - trunc.slack;
    const CMatrix q = b.M.basis();
    const CMatrix p = q * q.adjoint();
    const CMatrix missing = CMatrix::Identity(rows, rows) - p.topLeftCorner(rows, rows);
    counts.push_back(oracle::rank(missing, 1e-6));
  }
  EXPECT_EQ(counts[0], 3);
  EXPECT_EQ(counts[1], 3);
  EXPECT_EQ(counts[2], 3);
}

TEST(NonIsometry, RestrictionOfShift) {
  const int order = 128;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = tridiagonal_one_shift(1.0, 1.0, order);
  const int t = trunc.trusted_order();
  {
    const SubspaceModel m = s1_model(1.0, 1.0, BlaschkeProduct(1.0, {0.5}), order);
    const CVector head = m.phi[0].coeffs().head(t);
    const double ratio = (s.S.entries().leftCols(t) * head).norm() / head.norm();
    EXPECT_GT(std::abs(ratio - 1.0), 1e-6);
  }
  {
    const SubspaceModel m = s1_model(1.0, 1.0, BlaschkeProduct(1.0, {0.0, 0.5}), order);
    const BuiltSubspace b = build_subspace(m, s, kTol, trunc);
    const int dom = domain_dimension(b.M, trunc.slack);
    const CMatrix q = b.M.basis().leftCols(dom);
    const CMatrix sq = s.S.entries() * q;
    const CMatrix defect = sq.adjoint() * sq - CMatrix::Identity(dom, dom);
    EXPECT_LT(defect.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(WeightedShift, ModelAndCyclicity) {
  const int order = 128;
  const TruncationConfig trunc = TruncationConfig::for_order(order);
  const NShift s = weighted_one_shift(order);
  const BlaschkeProduct theta(1.0, {0.5, Complex(-0.3, 0.4)});
  const SubspaceModel model = one_shift_model(s, theta);
  CVector expected = blaschke_taylor(theta, order).coeffs();
  expected(0) -= blaschke_eval(theta, 0.0) / 2.0;
  EXPECT_LT((model.phi[0].coeffs() - expected).norm(), 1e-14);
  const BuiltSubspace b = build_subspace(model, s, kTol, trunc);
  EXPECT_LT(b.invariance_residual, 1e-10);
  EXPECT_EQ(check_cyclic(b.M, model, s, kTol, trunc).verdict, "cyclic");
}

TEST(KrylovDepth, Default) {
  EXPECT_EQ(default_krylov_depth(TruncationConfig::for_order(128), 1, 1), 96 - 1 - 1 - 4);
}
