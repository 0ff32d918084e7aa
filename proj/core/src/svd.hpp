#pragma once

// Thin wrappers over LAPACK zgesvd.

#include "hardy/hardy_core.hpp"

namespace hardy::detail {

/// Descending singular values.
Eigen::VectorXd singular_values(const CMatrix& a);

struct LeftSvd {
  Eigen::VectorXd sigma;
  CMatrix u;  // full rows x rows
};

LeftSvd left_svd(const CMatrix& a);

}  // namespace hardy::detail
