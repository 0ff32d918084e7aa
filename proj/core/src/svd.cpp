#include "svd.hpp"

#include <complex>
#include <string>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "hardy/errors.hpp"

namespace hardy::detail {

namespace {

LeftSvd run(const CMatrix& a, bool want_u) {
  LeftSvd out;
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  out.sigma.resize(k);
  if (k == 0) {
    if (want_u) out.u = CMatrix::Identity(m, m);
    return out;
  }
  CMatrix work = a;
  if (want_u) out.u.resize(m, m);
  std::vector<double> superb(static_cast<std::size_t>(k));
  std::complex<double> vt_dummy;
  const lapack_int info =
      LAPACKE_zgesvd(LAPACK_COL_MAJOR, want_u ? 'A' : 'N', 'N', m, n, work.data(), m,
                     out.sigma.data(), want_u ? out.u.data() : nullptr, want_u ? m : 1,
                     &vt_dummy, 1, superb.data());
  if (info != 0) {
    throw InternalConsistencyError("zgesvd failed with info " + std::to_string(info));
  }
  return out;
}

}  // namespace

Eigen::VectorXd singular_values(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return Eigen::VectorXd();
  return run(a, false).sigma;
}

LeftSvd left_svd(const CMatrix& a) { return run(a, true); }

}  // namespace hardy::detail
