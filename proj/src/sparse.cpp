#include "biot/sparse.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace biot {

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<cplx> values)
    : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
      values_(std::move(values))
{
  if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size() || row_ptr_.back() != values_.size())
    throw std::invalid_argument("CsrMatrix: inconsistent arrays");
}

cplx CsrMatrix::at(std::size_t i, std::size_t j) const
{
  auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j)
    return {};
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

double CsrMatrix::max_abs() const
{
  double m = 0.0;
  for (const auto &v : values_)
    m = std::max(m, std::abs(v));
  return m;
}

CsrMatrix csr_from_triplets(std::size_t rows, std::size_t cols, std::span<const Triplet> triplets)
{
  std::vector<std::size_t> count(rows + 1, 0);
  for (const auto &t : triplets) {
    if (t.row >= rows || t.col >= cols)
      throw std::out_of_range("csr_from_triplets: index (" + std::to_string(t.row) + ", " +
                              std::to_string(t.col) + ") out of range");
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::size_t> cols_tmp(triplets.size());
  std::vector<cplx> vals_tmp(triplets.size());
  {
    auto next = count;
    for (const auto &t : triplets) {
      const auto pos = next[t.row]++;
      cols_tmp[pos] = t.col;
      vals_tmp[pos] = t.value;
    }
  }
  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<cplx> values;
  col_idx.reserve(triplets.size());
  values.reserve(triplets.size());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < rows; ++i) {
    order.resize(count[i + 1] - count[i]);
    std::iota(order.begin(), order.end(), count[i]);
    // stable so that duplicates are summed in insertion order
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cols_tmp[a] < cols_tmp[b]; });
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto c = cols_tmp[order[k]];
      if (!col_idx.empty() && col_idx.size() > row_ptr[i] && col_idx.back() == c)
        values.back() += vals_tmp[order[k]];
      else {
        col_idx.push_back(c);
        values.push_back(vals_tmp[order[k]]);
      }
    }
    row_ptr[i + 1] = col_idx.size();
  }
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

void spmv(const CsrMatrix &a, std::span<const cplx> x, std::span<cplx> y)
{
  if (x.size() != a.cols() || y.size() != a.rows())
    throw std::invalid_argument("spmv: dimension mismatch");
  const auto &rp = a.row_ptr();
  const auto &ci = a.col_idx();
  const auto &v = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx s{};
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      s += v[k] * x[ci[k]];
    y[i] = s;
  }
}

CVector spmv(const CsrMatrix &a, std::span<const cplx> x)
{
  CVector y(a.rows());
  spmv(a, x, y);
  return y;
}

double norm2(std::span<const cplx> x)
{
  double s = 0.0;
  for (const auto &v : x)
    s += std::norm(v);
  return std::sqrt(s);
}

double relative_residual(const CsrMatrix &a, std::span<const cplx> x, std::span<const cplx> b)
{
  auto r = spmv(a, x);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = b[i] - r[i];
  const double bn = norm2(b);
  return bn > 0.0 ? norm2(r) / bn : norm2(r);
}

Eigen::MatrixXcd to_dense(const CsrMatrix &a)
{
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a.col_idx()[k])) = a.values()[k];
  return d;
}

std::string to_string(SolveMethod m)
{
  return m == SolveMethod::direct ? "direct" : "gmres";
}

// ---------------------------------------------------------------------------
// Direct solver

namespace {

using EigenSparse = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

class PivotInspectingLU : public Eigen::SparseLU<EigenSparse, Eigen::COLAMDOrdering<int>>
{
public:
  /// Smallest |U_jj| over the factorization.
  double min_abs_pivot() const
  {
    double m = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < this->cols(); ++j) {
      double pivot = 0.0;
      for (SCMatrix::InnerIterator it(m_Lstore, j); it; ++it)
        if (it.row() == j) {
          pivot = std::abs(it.value());
          break;
        }
      m = std::min(m, pivot);
    }
    return m;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

std::pair<CVector, SolveReport> direct_solve(const CsrMatrix &a, std::span<const cplx> b, const DirectOptions &opts)
{
  const auto t0 = std::chrono::steady_clock::now();
  if (a.rows() != a.cols())
    throw SolverError("direct_solve: matrix is not square");
  if (b.size() != a.rows())
    throw SolverError("direct_solve: right-hand side size mismatch");
  if (a.rows() > opts.max_unknowns)
    throw SolverError("direct_solve: " + std::to_string(a.rows()) + " unknowns exceeds the direct-solve cap of " +
                      std::to_string(opts.max_unknowns));
  const auto n = static_cast<int>(a.rows());
  std::vector<Eigen::Triplet<cplx, int>> trips;
  trips.reserve(a.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      trips.emplace_back(static_cast<int>(i), static_cast<int>(a.col_idx()[k]), a.values()[k]);
  EigenSparse m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();

  PivotInspectingLU lu;
  lu.analyzePattern(m);
  lu.factorize(m);
  if (lu.info() != Eigen::Success)
    throw SingularMatrixError("direct_solve: factorization failed (" + lu.lastErrorMessage() + ")");
  const double threshold = 1e-14 * a.max_abs();
  if (!(lu.min_abs_pivot() > threshold))
    throw SingularMatrixError("direct_solve: pivot below 1e-14 * max|A|, matrix is numerically singular");

  Eigen::VectorXcd rhs(n);
  for (int i = 0; i < n; ++i)
    rhs[i] = b[static_cast<std::size_t>(i)];
  Eigen::VectorXcd sol = lu.solve(rhs);
  if (lu.info() != Eigen::Success)
    throw SingularMatrixError("direct_solve: triangular solve failed");
  CVector x(sol.data(), sol.data() + n);
  for (const auto &v : x)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw SingularMatrixError("direct_solve: non-finite solution");

  SolveReport rep;
  rep.method = SolveMethod::direct;
  rep.iterations = 1;
  rep.relative_residual = relative_residual(a, x, b);
  rep.converged = true;
  rep.wall_seconds = seconds_since(t0);
  return {std::move(x), rep};
}

// ---------------------------------------------------------------------------
// ILU(0)

Ilu0::Ilu0(const CsrMatrix &a) : lu_(a)
{
  if (a.rows() != a.cols())
    throw SolverError("ilu0: matrix is not square");
  const auto n = a.rows();
  const auto &rp = lu_.row_ptr();
  const auto &ci = lu_.col_idx();
  auto &v = lu_.values();
  diag_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto first = ci.begin() + static_cast<std::ptrdiff_t>(rp[i]);
    auto last = ci.begin() + static_cast<std::ptrdiff_t>(rp[i + 1]);
    auto it = std::lower_bound(first, last, i);
    if (it == last || *it != i)
      throw SolverError("ilu0: missing diagonal entry in row " + std::to_string(i));
    diag_[i] = static_cast<std::size_t>(it - ci.begin());
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t kk = rp[i]; kk < diag_[i]; ++kk) {
      const auto k = ci[kk];
      const cplx pivot = v[diag_[k]];
      if (pivot == cplx{})
        throw SolverError("ilu0: zero pivot in row " + std::to_string(k));
      v[kk] /= pivot;
      const cplx lik = v[kk];
      // a_ij -= l_ik u_kj over the intersection of the two row patterns
      std::size_t jj = kk + 1;
      std::size_t kj = diag_[k] + 1;
      while (jj < rp[i + 1] && kj < rp[k + 1]) {
        if (ci[jj] == ci[kj]) {
          v[jj] -= lik * v[kj];
          ++jj;
          ++kj;
        } else if (ci[jj] < ci[kj])
          ++jj;
        else
          ++kj;
      }
    }
    if (v[diag_[i]] == cplx{})
      throw SolverError("ilu0: zero pivot in row " + std::to_string(i));
  }
}

void Ilu0::apply(std::span<const cplx> r, std::span<cplx> z) const
{
  const auto n = lu_.rows();
  const auto &rp = lu_.row_ptr();
  const auto &ci = lu_.col_idx();
  const auto &v = lu_.values();
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = r[i];
    for (std::size_t k = rp[i]; k < diag_[i]; ++k)
      s -= v[k] * z[ci[k]];
    z[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    cplx s = z[ii];
    for (std::size_t k = diag_[ii] + 1; k < rp[ii + 1]; ++k)
      s -= v[k] * z[ci[k]];
    z[ii] = s / v[diag_[ii]];
  }
}

// ---------------------------------------------------------------------------
// GMRES

namespace {

cplx dot(std::span<const cplx> x, std::span<const cplx> y)
{
  cplx s{};
  for (std::size_t i = 0; i < x.size(); ++i)
    s += std::conj(x[i]) * y[i];
  return s;
}

} // namespace

std::pair<CVector, SolveReport> gmres(const CsrMatrix &a, std::span<const cplx> b, const Preconditioner *precond,
                                      const GmresOptions &opts)
{
  const auto t0 = std::chrono::steady_clock::now();
  if (a.rows() != a.cols())
    throw SolverError("gmres: matrix is not square");
  if (opts.restart < 1)
    throw SolverError("gmres: restart must be >= 1");
  const std::size_t n = a.rows();
  CVector x(n, cplx{});
  SolveReport rep;
  rep.method = SolveMethod::gmres;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    rep.converged = true;
    rep.wall_seconds = seconds_since(t0);
    return {x, rep};
  }

  const std::size_t m = std::min(opts.restart, n);
  std::vector<CVector> basis;
  std::vector<CVector> h(m + 1, CVector(m, cplx{}));
  std::vector<double> cs(m);
  std::vector<cplx> sn(m);
  CVector g(m + 1), r(n), w(n), z(n);
  std::size_t total = 0;
  bool converged = false;

  auto precondition = [&](std::span<const cplx> in, std::span<cplx> out) {
    if (precond)
      precond->apply(in, out);
    else
      std::copy(in.begin(), in.end(), out.begin());
  };

  while (!converged) {
    spmv(a, x, r);
    for (std::size_t i = 0; i < n; ++i)
      r[i] = b[i] - r[i];
    const double beta = norm2(r);
    if (!std::isfinite(beta))
      throw SolverError("gmres: non-finite residual");
    if (beta / bnorm <= opts.tol) {
      converged = true;
      break;
    }
    if (total >= opts.max_iter)
      break;

    basis.assign(1, CVector(n));
    for (std::size_t i = 0; i < n; ++i)
      basis[0][i] = r[i] / beta;
    std::fill(g.begin(), g.end(), cplx{});
    g[0] = beta;

    std::size_t j = 0;
    for (; j < m && total < opts.max_iter; ++j) {
      precondition(basis[j], z);
      spmv(a, z, w);
      for (std::size_t i = 0; i <= j; ++i) {
        h[i][j] = dot(basis[i], w);
        for (std::size_t k = 0; k < n; ++k)
          w[k] -= h[i][j] * basis[i][k];
      }
      const double hnext = norm2(w);
      h[j + 1][j] = hnext;
      for (std::size_t i = 0; i < j; ++i) {
        const cplx t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
        h[i + 1][j] = -std::conj(sn[i]) * h[i][j] + cs[i] * h[i + 1][j];
        h[i][j] = t;
      }
      const cplx hjj = h[j][j];
      const double rho = std::hypot(std::abs(hjj), hnext);
      if (std::abs(hjj) == 0.0) {
        cs[j] = 0.0;
        sn[j] = 1.0;
      } else {
        const cplx phase = hjj / std::abs(hjj);
        cs[j] = std::abs(hjj) / rho;
        sn[j] = phase * hnext / rho;
      }
      h[j][j] = cs[j] * hjj + sn[j] * hnext;
      h[j + 1][j] = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];
      ++total;
      const double res = std::abs(g[j + 1]);
      if (!std::isfinite(res))
        throw SolverError("gmres: non-finite residual");
      const bool happy = hnext <= 1e-14 * rho;
      if (res / bnorm <= opts.tol || happy) {
        ++j;
        break;
      }
      basis.emplace_back(n);
      for (std::size_t k = 0; k < n; ++k)
        basis[j + 1][k] = w[k] / hnext;
    }

    // back substitution on the j x j triangle
    CVector y(j);
    for (std::size_t i = j; i-- > 0;) {
      cplx s = g[i];
      for (std::size_t k = i + 1; k < j; ++k)
        s -= h[i][k] * y[k];
      y[i] = s / h[i][i];
    }
    std::fill(w.begin(), w.end(), cplx{});
    for (std::size_t i = 0; i < j; ++i)
      for (std::size_t k = 0; k < n; ++k)
        w[k] += y[i] * basis[i][k];
    precondition(w, z);
    for (std::size_t k = 0; k < n; ++k)
      x[k] += z[k];
  }

  rep.iterations = total;
  rep.relative_residual = relative_residual(a, x, b);
  if (!std::isfinite(rep.relative_residual))
    throw SolverError("gmres: non-finite residual");
  rep.converged = converged;
  rep.wall_seconds = seconds_since(t0);
  return {std::move(x), rep};
}

// ---------------------------------------------------------------------------

std::vector<EigenPair> dense_generalized_eig(const Eigen::MatrixXd &a, const Eigen::MatrixXd &m,
                                             std::size_t k_smallest, std::size_t max_size)
{
  if (a.rows() != a.cols() || m.rows() != m.cols() || a.rows() != m.rows())
    throw SolverError("dense_generalized_eig: dimension mismatch");
  if (static_cast<std::size_t>(a.rows()) > max_size)
    throw SolverError("dense_generalized_eig: size " + std::to_string(a.rows()) + " exceeds dense cap " +
                      std::to_string(max_size));
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw SolverError("dense_generalized_eig: M is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, m, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success)
    throw SolverError("dense_generalized_eig: eigensolver failed");
  std::vector<EigenPair> out;
  const auto k = std::min<std::size_t>(k_smallest, static_cast<std::size_t>(a.rows()));
  for (std::size_t i = 0; i < k; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    out.push_back({es.eigenvalues()[idx], es.eigenvectors().col(idx)});
  }
  return out;
}

void write_matrix_market(const CsrMatrix &a, const std::filesystem::path &path)
{
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  out << "%%MatrixMarket matrix coordinate complex general\n";
  out << a.rows() << " " << a.cols() << " " << a.nnz() << "\n";
  char buf[128];
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", i + 1, a.col_idx()[k] + 1, a.values()[k].real(),
                    a.values()[k].imag());
      out << buf;
    }
  if (!out)
    throw std::runtime_error("write failure on " + path.string());
}

} // namespace biot
