#pragma once

// Invariant subspaces of n-shifts in the form
//   M = span{phi_0, ..., phi_{n-1}} (+) z^n theta H^2,   phi_i = z^i p_i theta - q_i,
// their construction at truncation, model extraction and cyclicity.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hardy/hardy_core.hpp"
#include "hardy/inner_functions.hpp"
#include "hardy/shifts.hpp"

namespace hardy {

struct SubspaceModel {
  int n = 1;
  BlaschkeProduct theta;
  std::vector<Polynomial> p;
  std::vector<Polynomial> q;
  std::vector<TruncatedVector> phi;

  /// phi_i computed from (theta, p_i, q_i).
  static SubspaceModel from_polynomials(int n, BlaschkeProduct theta, std::vector<Polynomial> p,
                                        std::vector<Polynomial> q, int working_order);
};

struct ModelCheck {
  double formula_residual = 0.0;     // max_i ||phi_i - (z^i p_i theta - q_i)|| / ||phi_i||
  double orthogonality_residual = 0.0;  // phi_i vs phi_j and vs z^n theta H^2
  std::vector<double> chain_residuals;  // S phi_j against span{phi_>j} (+) z^n theta H^2
  double terminal_residual = 0.0;    // ||S phi_{n-1} - z^n p_{n-1} theta|| / ||phi_{n-1}||
  double min_phi_norm = 0.0;
  std::optional<std::string> failure;  // first condition above tolerance

  double max_residual() const;
  bool passed() const { return !failure.has_value(); }
};

/// Residuals of the model invariants on the trusted block; `threshold` is the
/// pass level (tol.res when omitted).
ModelCheck check_model(const SubspaceModel& model, const NShift& s, const ToleranceConfig& tol,
                       const TruncationConfig& trunc, std::optional<double> threshold = {});

struct BuiltSubspace {
  Subspace M;
  double invariance_residual = 0.0;
  int theta_depth = 0;  // generators z^{n+k} theta for k = 0..theta_depth
  ModelCheck check;
};

/// Ordered basis from the generators phi_0..phi_{n-1}, z^n theta, z^{n+1} theta, ...
/// Throws ModelInconsistencyError naming the failed model condition.
BuiltSubspace build_subspace(const SubspaceModel& model, const NShift& s,
                             const ToleranceConfig& tol, const TruncationConfig& trunc);

/// n = 1 model on the kernel shift with a = (a0), b = (b0), 0 < |b0| <= |a0|:
/// p = 1 + (b0/a0)|theta(0)|^2 z, q = (theta(0)/a0)((a0 - 1) + b0 z).
SubspaceModel s1_model(Complex a0, Complex b0, const BlaschkeProduct& theta, int working_order);

/// n = 1 model for any 1-shift with S 1 = z (1 + r), r a polynomial and
/// 1 + r(0) != 0: with c = theta(0) / (1 + r(0)),
/// p = 1 + c sum_{m>=1} <r, z^m theta> z^m and q = c r.
SubspaceModel one_shift_model(const NShift& s, const BlaschkeProduct& theta);

/// dim(M minus S M). Throws PreconditionError when M is not S-invariant.
int wandering_dimension(const Subspace& m, const NShift& s, const ToleranceConfig& tol,
                        const TruncationConfig& trunc);

struct ExtractionReport {
  SubspaceModel model;
  ModelCheck check;
  double theta_fit_residual = 0.0;
  InnerDiagnostics inner;
  std::vector<double> p_tail;  // forward residual of S^{n-i} phi_i = z^n p_i theta
  std::vector<double> q_tail;  // coefficients of q_i beyond its degree cap
  std::vector<std::string> warnings;
};

ExtractionReport extract_model(const Subspace& m, const NShift& s, const ToleranceConfig& tol,
                               const TruncationConfig& trunc);

struct CyclicReport {
  bool outer = false;                // p_0 outer
  std::optional<bool> krylov_equal;  // unset when the Krylov depth is exhausted
  double min_root_modulus = 0.0;     // infinity when p_0 is constant
  double krylov_in_m = 0.0;          // containment angles
  double m_in_krylov = 0.0;
  int depth = 0;
  std::string verdict;  // "cyclic", "not-cyclic", "inconclusive" or "empirical"
};

/// Cyclicity of M = [M minus S M]_S. For n = 1 decided by p_0 being outer and
/// cross-checked with a Krylov closure of phi_0; n > 1 throws UnsupportedError
/// unless `exploratory`, in which case only the Krylov comparison runs.
CyclicReport check_cyclic(const Subspace& m, const SubspaceModel& model, const NShift& s,
                          const ToleranceConfig& tol, const TruncationConfig& trunc,
                          bool exploratory = false);

struct CodimensionReport {
  int numeric = 0;   // complement directions localized on the trusted block
  int expected = 0;  // deg theta
  bool consistent = false;
  bool conclusive = true;
  std::vector<double> localization;  // per complement direction
};

CodimensionReport finite_codimension(const Subspace& m, const SubspaceModel& model,
                                     const TruncationConfig& trunc);

/// Krylov depth used by default: trusted order - n - deg theta - 4.
int default_krylov_depth(const TruncationConfig& trunc, int n, int theta_degree);

struct KrylovSeed {
  TruncatedVector f;
  BlaschkeProduct theta;  // inner factor of S^n f / z^n
  Polynomial outer;       // outer factor u of S^n f = z^n theta u
};

/// Seed vector f with S^n f = z^n theta u for a random Blaschke product of
/// degree <= max_theta_degree (zeros of modulus 0.2..0.6) and an outer
/// polynomial u (roots of modulus >= 3).
KrylovSeed random_krylov_seed(const NShift& s, std::mt19937_64& rng, int max_theta_degree,
                              const TruncationConfig& trunc);

/// Random kernel with a = 1 and |b_m| <= radius.
TridiagonalKernel random_kernel(int n, double radius, std::mt19937_64& rng);

}  // namespace hardy
