#pragma once

// Commutant elements X = T_phi + N of kernel-built n-shifts.

#include <cstdint>
#include <random>
#include <vector>

#include "hardy/hardy_core.hpp"
#include "hardy/inner_functions.hpp"
#include "hardy/shifts.hpp"

namespace hardy {

struct CommutantElement {
  Polynomial symbol;
  OperatorMatrix X;  // U M_phi U*, monomial basis
  OperatorMatrix T;  // lower-triangular Toeplitz matrix of phi
  OperatorMatrix N;  // X - T, supported in the first n columns
  double n_support_defect = 0.0;  // max |N| outside columns 0..n-1
};

/// Lower-triangular Toeplitz matrix with subdiagonal k equal to phi_k.
OperatorMatrix toeplitz(const Polynomial& phi, int working_order);

/// Multiplication by phi in the f-basis, relabelled to monomials. Throws
/// InternalConsistencyError if N leaks outside its first n columns.
CommutantElement commutant_element(const Polynomial& phi, const TridiagonalKernel& k,
                                   int working_order, const ToleranceConfig& tol);

/// max |XS - SX| over rows and columns below trusted_order - 1.
double verify_commutation(const OperatorMatrix& x, const NShift& s, int trusted_order);

/// Symbol with coefficients uniform in the unit disc.
Polynomial random_symbol(int degree, std::mt19937_64& rng);

struct HyperinvarianceReport {
  std::vector<double> residuals;  // per symbol
  double max_residual = 0.0;
  bool passed = false;
};

/// ||(I - P_M) X Q_dom|| for `trials` seeded random symbols of degree <= 8.
HyperinvarianceReport hyperinvariance_check(const Subspace& m, const NShift& s,
                                            const TridiagonalKernel& k, int trials,
                                            std::uint64_t seed, const ToleranceConfig& tol,
                                            const TruncationConfig& trunc);

struct IrreducibilityReport {
  std::vector<double> adjoint_residuals;  // ||(I - P_M) S* Q_dom|| per nontrivial M
  int skipped_trivial = 0;  // {0}, or all of H^2 on the trusted block
  bool irreducible = false;  // no nontrivial sampled subspace reduces S
};

IrreducibilityReport irreducibility_probe(const NShift& s, const std::vector<Subspace>& family,
                                          const ToleranceConfig& tol,
                                          const TruncationConfig& trunc);

}  // namespace hardy
