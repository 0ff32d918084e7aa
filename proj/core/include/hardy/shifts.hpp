#pragma once

// n-perturbations F of the unilateral shift and n-shifts S = M_z + F, built
// from truncated tridiagonal kernels or from explicit columns.

#include <optional>
#include <string>
#include <vector>

#include "hardy/hardy_core.hpp"

namespace hardy {

/// Orthonormal basis f_m = (a_m + b_m z) z^m with a_t = 1, b_t = 0 for t >= n.
class TridiagonalKernel {
 public:
  TridiagonalKernel() = default;
  /// a and b hold indices 0..n-1. Throws InvalidKernelError if some a_s = 0.
  TridiagonalKernel(int n, std::vector<Complex> a, std::vector<Complex> b);

  int n() const { return n_; }
  Complex a(int m) const { return m < n_ ? a_[static_cast<std::size_t>(m)] : Complex(1.0); }
  Complex b(int m) const { return m < n_ ? b_[static_cast<std::size_t>(m)] : Complex(0.0); }
  const std::vector<Complex>& a_values() const { return a_; }
  const std::vector<Complex>& b_values() const { return b_; }
  bool unit_diagonal() const;

 private:
  int n_ = 1;
  std::vector<Complex> a_{1.0};
  std::vector<Complex> b_{0.0};
};

/// b_m - b_{m+p}.
Complex c_coeff(const TridiagonalKernel& k, int m, int p);

/// Coordinates of z^m in the f-basis from the alternating-product closed
/// form. Requires a identically 1 (UnsupportedError otherwise).
std::vector<Complex> monomial_in_f_basis(const TridiagonalKernel& k, int m, int working_order);

/// Lower-bidiagonal G with columns f_m in monomial coordinates.
CMatrix change_of_basis(const TridiagonalKernel& k, int working_order);

enum class Provenance { Kernel, Explicit, TwoShiftExample, OneShiftExample, WeightedExample };

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct ShiftValidation {
  bool clause_i = false;    // F z^m = 0 for m >= n
  bool clause_ii = false;   // F z^m starts at degree m+1, polynomial
  bool clause_iii = false;  // S*S positive definite on its perturbation block
  double min_eigenvalue = 0.0;
  int block_size = 0;
  std::vector<std::string> failures;

  bool passed() const { return clause_i && clause_ii && clause_iii; }
};

struct NShift {
  int n = 1;
  OperatorMatrix S;
  OperatorMatrix F;
  Provenance provenance = Provenance::Explicit;
  std::optional<TridiagonalKernel> kernel;
  ShiftValidation validation;
  /// Largest row index of a nonzero entry of F (-1 when F = 0).
  int perturbation_degree = -1;

  int working_order() const { return S.working_order(); }
};

/// Multiplication by z in the f-basis, relabelled f_m -> z^m.
NShift shift_from_kernel(const TridiagonalKernel& k, int working_order);

/// S = M_z + F from the n columns F[z^m]. Throws DefinitionViolationError
/// listing the failing clauses.
NShift shift_from_columns(int n, const std::vector<std::vector<Complex>>& columns,
                          int working_order, Provenance provenance = Provenance::Explicit);

/// Same assembly without throwing on a definition violation; the verdict
/// is in the returned validation.
NShift assemble_shift(int n, const std::vector<std::vector<Complex>>& columns, int working_order,
                      Provenance provenance = Provenance::Explicit);

ShiftValidation validate_n_shift(const NShift& s);

struct PowerIdentityRow {
  int m = 0;
  double range_residual = 0.0;         // rows < m of S^m f
  std::optional<double> factor_residual;  // ||S^m - M_z^{m-n} S^n||, m >= n+1
  double intertwining_residual = 0.0;  // ||M_z^{m+n} - S^m M_z^n||
  int correction_degree = -1;          // degree of p in S^m f = z^m (f + p)
  double correction_tail = 0.0;        // |p| beyond the degree bound
};

struct PowerIdentityReport {
  int trusted_block = 0;
  int degree_bound = 0;
  std::vector<PowerIdentityRow> rows;
  double max_residual() const;
};

/// Range, factorization and intertwining identities for S^m, m = 1..m_max,
/// on the trusted block, using a seeded random test vector.
PowerIdentityReport verify_power_identities(const NShift& s, int m_max, int trusted_order,
                                            unsigned long long seed = 1);

/// F 1 = F z = z^2 (n = 2, rank F = 1).
NShift rank_one_two_shift(int working_order);
/// Kernel shift with n = 1, a = (a0), b = (b0): S 1 = a0 z + b0 z^2.
NShift tridiagonal_one_shift(Complex a0, Complex b0, int working_order);
/// F 1 = z: the weighted shift with weights 2, 1, 1, ...
NShift weighted_one_shift(int working_order);

}  // namespace hardy
