#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace biot {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class SingularMatrixError : public SolverError
{
public:
  using SolverError::SolverError;
};

struct Triplet
{
  std::size_t row;
  std::size_t col;
  cplx value;
};

/// Compressed sparse row matrix with complex entries. Column indices are
/// strictly increasing within each row.
class CsrMatrix
{
public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<cplx> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t> &row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t> &col_idx() const { return col_idx_; }
  const std::vector<cplx> &values() const { return values_; }
  std::vector<cplx> &values() { return values_; }

  /// Entry (i, j); zero when not stored.
  cplx at(std::size_t i, std::size_t j) const;
  double max_abs() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<cplx> values_;
};

/// Duplicate entries are summed. Throws std::out_of_range on a bad index.
CsrMatrix csr_from_triplets(std::size_t rows, std::size_t cols, std::span<const Triplet> triplets);

CVector spmv(const CsrMatrix &a, std::span<const cplx> x);
void spmv(const CsrMatrix &a, std::span<const cplx> x, std::span<cplx> y);

double norm2(std::span<const cplx> x);
double relative_residual(const CsrMatrix &a, std::span<const cplx> x, std::span<const cplx> b);

Eigen::MatrixXcd to_dense(const CsrMatrix &a);

enum class SolveMethod
{
  direct,
  gmres
};

std::string to_string(SolveMethod m);

struct SolveReport
{
  SolveMethod method = SolveMethod::direct;
  std::size_t iterations = 0;
  double relative_residual = 0.0;
  double wall_seconds = 0.0;
  bool converged = true;
};

struct DirectOptions
{
  std::size_t max_unknowns = 200000;
};

/// Sparse LU with a fill-reducing column ordering.
std::pair<CVector, SolveReport> direct_solve(const CsrMatrix &a, std::span<const cplx> b,
                                             const DirectOptions &opts = {});

class Preconditioner
{
public:
  virtual ~Preconditioner() = default;
  virtual void apply(std::span<const cplx> r, std::span<cplx> z) const = 0;
};

/// Zero-fill incomplete LU on the pattern of A.
class Ilu0 final : public Preconditioner
{
public:
  explicit Ilu0(const CsrMatrix &a);
  void apply(std::span<const cplx> r, std::span<cplx> z) const override;

private:
  CsrMatrix lu_;
  std::vector<std::size_t> diag_;
};

inline Ilu0 ilu0(const CsrMatrix &a) { return Ilu0(a); }

struct GmresOptions
{
  std::size_t restart = 500;
  double tol = 1e-8;
  std::size_t max_iter = 50000;
};

/// Restarted right-preconditioned GMRES. Non-convergence is reported through
/// SolveReport::converged; a non-finite residual throws SolverError.
std::pair<CVector, SolveReport> gmres(const CsrMatrix &a, std::span<const cplx> b,
                                      const Preconditioner *precond, const GmresOptions &opts = {});

struct EigenPair
{
  double value;
  Eigen::VectorXd vector;
};

/// k smallest eigenpairs of A v = lambda M v (A symmetric, M SPD), sorted
/// ascending, M-orthonormal vectors.
std::vector<EigenPair> dense_generalized_eig(const Eigen::MatrixXd &a, const Eigen::MatrixXd &m,
                                             std::size_t k_smallest, std::size_t max_size = 3000);

/// Matrix Market coordinate complex general.
void write_matrix_market(const CsrMatrix &a, const std::filesystem::path &path);

} // namespace biot
