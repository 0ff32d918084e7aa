#include "hardy/shifts.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "hardy/errors.hpp"

namespace hardy {

namespace {

int last_nonzero_row(const CMatrix& m, int cols) {
  int last = -1;
  for (int j = 0; j < cols; ++j)
    for (int i = static_cast<int>(m.rows()) - 1; i > last; --i)
      if (m(i, j) != Complex(0.0)) {
        last = i;
        break;
      }
  return last;
}

double max_abs_block(const CMatrix& m, int rows, int cols) {
  if (rows <= 0 || cols <= 0) return 0.0;
  return m.topLeftCorner(rows, cols).cwiseAbs().maxCoeff();
}

}  // namespace

TridiagonalKernel::TridiagonalKernel(int n, std::vector<Complex> a, std::vector<Complex> b)
    : n_(n), a_(std::move(a)), b_(std::move(b)) {
  if (n_ < 1) throw InvalidKernelError("kernel truncation index must be positive");
  if (static_cast<int>(a_.size()) != n_ || static_cast<int>(b_.size()) != n_) {
    throw InvalidKernelError("kernel needs exactly n values of a and of b");
  }
  for (std::size_t s = 0; s < a_.size(); ++s) {
    if (a_[s] == Complex(0.0)) {
      throw InvalidKernelError("a_" + std::to_string(s) + " = 0");
    }
  }
}

bool TridiagonalKernel::unit_diagonal() const {
  return std::all_of(a_.begin(), a_.end(), [](Complex x) { return x == Complex(1.0); });
}

Complex c_coeff(const TridiagonalKernel& k, int m, int p) {
  if (m < 0 || p < 1) throw PreconditionError("c_coeff needs m >= 0 and p >= 1");
  return k.b(m) - k.b(m + p);
}

std::vector<Complex> monomial_in_f_basis(const TridiagonalKernel& k, int m, int working_order) {
  if (!k.unit_diagonal()) {
    throw UnsupportedError("closed-form monomial expansion needs a = 1; use change_of_basis");
  }
  if (m < 0 || m >= working_order) throw DimensionError("monomial index out of range");
  std::vector<Complex> out(static_cast<std::size_t>(working_order), 0.0);
  Complex prod = 1.0;
  for (int t = 0; m + t < working_order; ++t) {
    out[static_cast<std::size_t>(m + t)] = (t % 2 == 0 ? 1.0 : -1.0) * prod;
    prod *= k.b(m + t);
    if (prod == Complex(0.0)) break;
  }
  return out;
}

CMatrix change_of_basis(const TridiagonalKernel& k, int working_order) {
  CMatrix g = CMatrix::Zero(working_order, working_order);
  for (int m = 0; m < working_order; ++m) {
    g(m, m) = k.a(m);
    if (m + 1 < working_order) g(m + 1, m) = k.b(m);
  }
  return g;
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Kernel: return "kernel";
    case Provenance::Explicit: return "explicit";
    case Provenance::TwoShiftExample: return "two-shift-example";
    case Provenance::OneShiftExample: return "one-shift-example";
    case Provenance::WeightedExample: return "weighted-example";
  }
  return "explicit";
}

Provenance provenance_from_string(const std::string& s) {
  for (Provenance p : {Provenance::Kernel, Provenance::Explicit, Provenance::TwoShiftExample,
                       Provenance::OneShiftExample, Provenance::WeightedExample})
    if (to_string(p) == s) return p;
  throw ConfigError("unknown provenance '" + s + "'");
}

ShiftValidation validate_n_shift(const NShift& s) {
  ShiftValidation v;
  const CMatrix& f = s.F.entries();
  const int nw = s.working_order();
  const int n = s.n;

  v.clause_i = true;
  for (int j = n; j < nw && v.clause_i; ++j)
    for (int i = 0; i < nw; ++i)
      if (f(i, j) != Complex(0.0)) {
        v.clause_i = false;
        break;
      }

  v.clause_ii = true;
  for (int j = 0; j < std::min(n, nw) && v.clause_ii; ++j)
    for (int i = 0; i <= j && i < nw; ++i)
      if (f(i, j) != Complex(0.0)) {
        v.clause_ii = false;
        break;
      }
  const int deg_f = last_nonzero_row(f, std::min(n, nw));
  // A column reaching the last stored row cannot be certified as a polynomial.
  if (deg_f >= nw - 1) v.clause_ii = false;

  // S*S = I + (finite block); the truncated M_z*M_z misses its last diagonal 1.
  const int block = std::max(n, deg_f + 1);
  v.block_size = block;
  if (block + 2 > nw) {
    v.clause_iii = false;
    v.failures.push_back("iii");
  } else {
    const CMatrix& sm = s.S.entries();
    const CMatrix gram = sm.adjoint() * sm;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram.topLeftCorner(block, block),
                                               Eigen::EigenvaluesOnly);
    v.min_eigenvalue = eig.eigenvalues().minCoeff();
    const double scale = std::max(1.0, eig.eigenvalues().maxCoeff());
    v.clause_iii = v.min_eigenvalue > 1e-12 * scale;
  }
  if (!v.clause_i) v.failures.insert(v.failures.begin(), "i");
  if (!v.clause_ii) {
    auto pos = v.failures.begin();
    if (!v.failures.empty() && v.failures.front() == "i") ++pos;
    v.failures.insert(pos, "ii");
  }
  if (!v.clause_iii && std::find(v.failures.begin(), v.failures.end(), "iii") == v.failures.end())
    v.failures.push_back("iii");
  return v;
}

namespace {

NShift finish_shift(int n, CMatrix s_entries, int working_order, Provenance provenance,
                    std::optional<TridiagonalKernel> kernel) {
  NShift out;
  out.n = n;
  out.provenance = provenance;
  out.kernel = std::move(kernel);
  const OperatorMatrix z = OperatorMatrix::shift(working_order);
  CMatrix f_entries = s_entries - z.entries();
  out.perturbation_degree = last_nonzero_row(f_entries, std::min(n, working_order));
  const int rows = std::max(n + 1, out.perturbation_degree + 1);
  out.F = OperatorMatrix(std::move(f_entries), BasisTag::Monomial,
                         FiniteSupport{rows, n, Background::Zero});
  out.S = OperatorMatrix(std::move(s_entries), BasisTag::Monomial,
                         FiniteSupport{rows, n, Background::Shift});
  out.validation = validate_n_shift(out);
  return out;
}

}  // namespace

NShift shift_from_kernel(const TridiagonalKernel& k, int working_order) {
  if (working_order < k.n() + 4) {
    throw DimensionError("working order too small for the kernel truncation index");
  }
  const CMatrix g = change_of_basis(k, working_order);
  const OperatorMatrix z = OperatorMatrix::shift(working_order);
  // f-basis coordinates of z f_m: solve G x = Z G e_m.
  const CMatrix zg = z.entries() * g;
  CMatrix s = g.triangularView<Eigen::Lower>().solve(zg);
  // Columns m >= n are exactly e_{m+1}; clear rounding residue elsewhere.
  for (int j = k.n(); j < working_order; ++j) {
    s.col(j).setZero();
    if (j + 1 < working_order) s(j + 1, j) = 1.0;
  }
  for (int j = 0; j < k.n(); ++j)
    for (int i = 0; i <= j; ++i) s(i, j) = 0.0;
  NShift out = finish_shift(k.n(), std::move(s), working_order, Provenance::Kernel, k);
  if (!out.validation.clause_iii) {
    throw NotLeftInvertibleError("kernel shift fails left invertibility (min eigenvalue " +
                                 std::to_string(out.validation.min_eigenvalue) + ")");
  }
  return out;
}

NShift assemble_shift(int n, const std::vector<std::vector<Complex>>& columns, int working_order,
                      Provenance provenance) {
  if (n < 1) throw ConfigError("n must be positive");
  if (static_cast<int>(columns.size()) != n) {
    throw ConfigError("expected " + std::to_string(n) + " perturbation columns, got " +
                      std::to_string(columns.size()));
  }
  CMatrix s = OperatorMatrix::shift(working_order).entries();
  for (int j = 0; j < n; ++j) {
    const auto& col = columns[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col[i] == Complex(0.0)) continue;
      if (static_cast<int>(i) >= working_order - 1) {
        throw TruncationError("perturbation column " + std::to_string(j) +
                              " does not fit the working order");
      }
      s(static_cast<Eigen::Index>(i), j) += col[i];
    }
  }
  return finish_shift(n, std::move(s), working_order, provenance, std::nullopt);
}

NShift shift_from_columns(int n, const std::vector<std::vector<Complex>>& columns,
                          int working_order, Provenance provenance) {
  NShift out = assemble_shift(n, columns, working_order, provenance);
  if (!out.validation.passed()) {
    std::string what = "not an n-perturbation; failing clause(s):";
    for (const auto& c : out.validation.failures) what += " (" + c + ")";
    throw DefinitionViolationError(out.validation.failures, what);
  }
  return out;
}

double PowerIdentityReport::max_residual() const {
  double r = 0.0;
  for (const auto& row : rows) {
    r = std::max({r, row.range_residual, row.intertwining_residual, row.correction_tail});
    if (row.factor_residual) r = std::max(r, *row.factor_residual);
  }
  return r;
}

PowerIdentityReport verify_power_identities(const NShift& s, int m_max, int trusted_order,
                                            unsigned long long seed) {
  const int nw = s.working_order();
  const int n = s.n;
  if (m_max < 1) throw PreconditionError("m_max must be at least 1");
  if (trusted_order > nw || m_max + n >= trusted_order) {
    throw TruncationError("power identities up to m = " + std::to_string(m_max) +
                          " exhaust the trusted block of order " + std::to_string(trusted_order));
  }
  PowerIdentityReport report;
  report.trusted_block = trusted_order;
  report.degree_bound = std::max(0, s.perturbation_degree);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  CVector f = CVector::Zero(nw);
  const int f_len = trusted_order - m_max;
  for (int j = 0; j < f_len; ++j) f[j] = Complex(gauss(rng), gauss(rng));

  const CMatrix& sm = s.S.entries();
  const CMatrix z = OperatorMatrix::shift(nw).entries();
  auto zpow = [&](int k) {
    CMatrix out = CMatrix::Zero(nw, nw);
    for (int j = 0; j + k < nw; ++j) out(j + k, j) = 1.0;
    return out;
  };
  const int t = trusted_order;
  CMatrix sn = CMatrix::Identity(nw, nw);
  for (int i = 0; i < n; ++i) sn = sm * sn;
  const CMatrix zn = zpow(n);

  CMatrix smk = CMatrix::Identity(nw, nw);
  CVector smf = f;
  for (int m = 1; m <= m_max; ++m) {
    smk = sm * smk;
    smf = sm * smf;
    PowerIdentityRow row;
    row.m = m;
    row.range_residual = smf.head(m).cwiseAbs().maxCoeff();
    if (m >= n + 1) {
      const CMatrix diff = smk - zpow(m - n) * sn;
      row.factor_residual = max_abs_block(diff, t, t);
    }
    const CMatrix lhs = zpow(m + n);
    const CMatrix rhs = smk * zn;
    row.intertwining_residual = max_abs_block(lhs - rhs, t, t);

    // S^m f = z^m (f + p): read p off the rows below the trusted block.
    const int len = t - m;
    CVector p = smf.segment(m, len) - f.head(len);
    const double scale = std::max(1.0, f.head(len).cwiseAbs().maxCoeff());
    int deg = -1;
    for (int i = len - 1; i >= 0; --i)
      if (std::abs(p[i]) > 1e-12 * scale) {
        deg = i;
        break;
      }
    row.correction_degree = deg;
    const int bound = report.degree_bound;
    row.correction_tail = bound + 1 < len ? p.tail(len - bound - 1).cwiseAbs().maxCoeff() : 0.0;
    report.rows.push_back(row);
  }
  return report;
}

NShift rank_one_two_shift(int working_order) {
  std::vector<std::vector<Complex>> cols{{0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}};
  return shift_from_columns(2, cols, working_order, Provenance::TwoShiftExample);
}

NShift tridiagonal_one_shift(Complex a0, Complex b0, int working_order) {
  NShift s = shift_from_kernel(TridiagonalKernel(1, {a0}, {b0}), working_order);
  s.provenance = Provenance::OneShiftExample;
  return s;
}

NShift weighted_one_shift(int working_order) {
  NShift s = shift_from_columns(1, {{0.0, 1.0}}, working_order, Provenance::WeightedExample);
  // F 1 = z is the kernel shift with a0 = 2, b0 = 0.
  s.kernel = TridiagonalKernel(1, {2.0}, {0.0});
  return s;
}

}  // namespace hardy
