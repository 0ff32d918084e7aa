#pragma once

// Self-commutators [S*, S] = S*S - SS* and Gram blocks of n-shifts.

#include <string>
#include <vector>

#include "hardy/hardy_core.hpp"
#include "hardy/shifts.hpp"

namespace hardy {

struct CommutatorReport {
  CMatrix block;           // minimal top-left block carrying the commutator
  int block_size = 0;
  int rank = 0;
  std::vector<double> eigenvalues;  // ascending
  double min_eigenvalue = 0.0;
  Complex det_principal = 0.0;
  double outside_max = 0.0;  // largest entry outside the block
  double hermitian_defect = 0.0;
  bool essentially_normal = false;
  bool hyponormal = false;
  bool corner_masked = false;
  std::string mask_note;
};

/// Computes S*S - SS* at truncation. The truncated M_z*M_z lacks the last
/// diagonal 1, which leaves a spurious -1 at (N-1, N-1); that entry is
/// zeroed and recorded in mask_note.
CommutatorReport self_commutator(const NShift& s, const ToleranceConfig& tol);

/// Top-left size x size block of S*S.
CMatrix gram_block(const NShift& s, int size);

struct NormalityWitness {
  bool essentially_normal = false;
  int block_size = 0;
};

NormalityWitness essential_normality_witness(const NShift& s, const ToleranceConfig& tol);

}  // namespace hardy
