#include "hardy/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "hardy/errors.hpp"

namespace hardy {

namespace {

constexpr double kEntryZero = 1e-12;

int minimal_block(const CMatrix& c) {
  const int nw = static_cast<int>(c.rows());
  int k = 0;
  for (int j = 0; j < nw; ++j)
    for (int i = 0; i < nw; ++i)
      if (std::abs(c(i, j)) >= kEntryZero) k = std::max(k, std::max(i, j) + 1);
  return k;
}

CMatrix masked_commutator(const NShift& s, bool* masked, std::string* note) {
  const CMatrix& sm = s.S.entries();
  CMatrix c = sm.adjoint() * sm - sm * sm.adjoint();
  const int last = s.working_order() - 1;
  *masked = false;
  if (std::abs(c(last, last) + 1.0) < kEntryZero) {
    c(last, last) = 0.0;
    *masked = true;
    *note = "entry (" + std::to_string(last) + "," + std::to_string(last) +
            ") = -1 is a truncation artifact of M_z*M_z and was set to 0";
  } else {
    *note = "corner entry did not match the truncation artifact; left unmasked";
  }
  return c;
}

}  // namespace

CommutatorReport self_commutator(const NShift& s, const ToleranceConfig& tol) {
  const int support = std::max(s.n, s.perturbation_degree + 1);
  if (s.working_order() <= 2 * support + 4) {
    throw DimensionError("working order too small for the commutator block");
  }
  CommutatorReport r;
  const CMatrix c = masked_commutator(s, &r.corner_masked, &r.mask_note);
  r.block_size = minimal_block(c);
  r.essentially_normal = r.block_size < s.working_order() - 1;
  const int k = r.block_size;
  r.block = c.topLeftCorner(k, k);
  CMatrix outside = c;
  outside.topLeftCorner(k, k).setZero();
  r.outside_max = outside.cwiseAbs().maxCoeff();
  if (k > 0) {
    r.hermitian_defect = (r.block - r.block.adjoint()).cwiseAbs().maxCoeff();
    r.rank = numerical_rank(r.block, tol);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(r.block, Eigen::EigenvaluesOnly);
    r.eigenvalues.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + k);
    r.min_eigenvalue = r.eigenvalues.front();
    r.det_principal = r.block.determinant();
  } else {
    r.det_principal = 1.0;
  }
  r.hyponormal = r.min_eigenvalue >= -tol.res;
  return r;
}

CMatrix gram_block(const NShift& s, int size) {
  if (size < 1 || size >= s.working_order()) {
    throw DimensionError("Gram block size out of range");
  }
  const CMatrix& sm = s.S.entries();
  return (sm.adjoint() * sm).topLeftCorner(size, size);
}

NormalityWitness essential_normality_witness(const NShift& s, const ToleranceConfig& tol) {
  (void)tol;
  bool masked = false;
  std::string note;
  const CMatrix c = masked_commutator(s, &masked, &note);
  NormalityWitness w;
  w.block_size = minimal_block(c);
  w.essentially_normal = w.block_size < s.working_order() - 1;
  return w;
}

}  // namespace hardy
