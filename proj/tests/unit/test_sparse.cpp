#include "biot/sparse.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace biot;

namespace {

/// Random diagonally dominant complex matrix with a banded pattern.
CsrMatrix random_matrix(std::size_t n, unsigned seed, double dominance = 4.0)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = (i >= 3 ? i - 3 : 0); j < std::min(n, i + 4); ++j)
      if (j != i)
        t.push_back({i, j, cplx(u(rng), u(rng))});
    t.push_back({i, i, cplx(dominance + u(rng), u(rng))});
  }
  return csr_from_triplets(n, n, t);
}

CVector random_vector(std::size_t n, unsigned seed)
{
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector v(n);
  for (auto &x : v)
    x = cplx(u(rng), u(rng));
  return v;
}

} // namespace

TEST(Csr, SumsDuplicatesAndSortsColumns)
{
  const std::vector<Triplet> t{{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, cplx(0, 3)}, {1, 1, 5.0}};
  const auto a = csr_from_triplets(2, 3, t);
  EXPECT_EQ(a.nnz(), 3u);
  EXPECT_EQ(a.col_idx()[0], 0u);
  EXPECT_EQ(a.col_idx()[1], 2u);
  EXPECT_EQ(a.at(0, 2), cplx(1, 3));
  EXPECT_EQ(a.at(1, 0), cplx(0, 0));
  EXPECT_DOUBLE_EQ(a.max_abs(), 5.0);
  EXPECT_THROW(csr_from_triplets(2, 2, std::vector<Triplet>{{2, 0, 1.0}}), std::out_of_range);
}

TEST(Csr, SpmvMatchesDense)
{
  const auto a = random_matrix(30, 1);
  const auto x = random_vector(30, 2);
  const auto y = spmv(a, x);
  const Eigen::VectorXcd yd = to_dense(a) * Eigen::Map<const Eigen::VectorXcd>(x.data(), 30);
  for (int i = 0; i < 30; ++i)
    EXPECT_LT(std::abs(y[i] - yd(i)), 1e-13);
}

TEST(Direct, MatchesDenseLuOracle)
{
  const std::size_t n = 60;
  const auto a = random_matrix(n, 3, 0.5);
  const auto b = random_vector(n, 4);
  const auto [x, rep] = direct_solve(a, b);
  const Eigen::VectorXcd xd = to_dense(a).partialPivLu().solve(Eigen::Map<const Eigen::VectorXcd>(b.data(), n));
  for (std::size_t i = 0; i < n; ++i)
    EXPECT_LT(std::abs(x[i] - xd(static_cast<Eigen::Index>(i))), 1e-10 * xd.norm());
  EXPECT_LT(rep.relative_residual, 1e-12);
  EXPECT_TRUE(rep.converged);
  EXPECT_EQ(rep.method, SolveMethod::direct);
}

TEST(Direct, SingularMatrixRaises)
{
  const std::vector<Triplet> t{{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 4.0}, {2, 2, 1.0}};
  const auto a = csr_from_triplets(3, 3, t);
  EXPECT_THROW(direct_solve(a, CVector{1.0, 1.0, 1.0}), SingularMatrixError);
}

TEST(Direct, SizeCap)
{
  const auto a = random_matrix(10, 5);
  DirectOptions o;
  o.max_unknowns = 5;
  EXPECT_THROW(direct_solve(a, random_vector(10, 6), o), SolverError);
}

TEST(Gmres, ConvergesWithAndWithoutIlu)
{
  const std::size_t n = 200;
  const auto a = random_matrix(n, 7);
  const auto b = random_vector(n, 8);
  const auto [xd, rd] = direct_solve(a, b);
  const Ilu0 pre(a);
  const auto [x1, r1] = gmres(a, b, &pre);
  const auto [x0, r0] = gmres(a, b, nullptr);
  EXPECT_TRUE(r1.converged);
  EXPECT_TRUE(r0.converged);
  EXPECT_LE(r1.relative_residual, 1e-8);
  EXPECT_LE(r1.iterations, r0.iterations);
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_LT(std::abs(x1[i] - xd[i]), 1e-6);
    EXPECT_LT(std::abs(x0[i] - xd[i]), 1e-6);
  }
}

TEST(Gmres, RestartAndIterationLimit)
{
  const auto a = random_matrix(100, 9, 1.0);
  const auto b = random_vector(100, 10);
  GmresOptions o;
  o.restart = 5;
  o.max_iter = 3;
  const auto [x, r] = gmres(a, b, nullptr, o);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3u);
}

TEST(Gmres, ZeroRightHandSide)
{
  const auto a = random_matrix(20, 11);
  const auto [x, r] = gmres(a, CVector(20), nullptr);
  EXPECT_TRUE(r.converged);
  for (const auto &v : x)
    EXPECT_EQ(v, cplx(0.0));
}

TEST(Ilu0, ExactOnTridiagonal)
{
  // ILU(0) of a tridiagonal matrix is its exact LU factorization.
  const std::size_t n = 50;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    t.push_back({i, i, cplx(4.0, 1.0)});
    if (i > 0)
      t.push_back({i, i - 1, -1.0});
    if (i + 1 < n)
      t.push_back({i, i + 1, cplx(-1.0, 0.5)});
  }
  const auto a = csr_from_triplets(n, n, t);
  const auto b = random_vector(n, 12);
  const Ilu0 pre(a);
  CVector z(n);
  pre.apply(b, z);
  EXPECT_LT(relative_residual(a, z, b), 1e-13);
}

TEST(Ilu0, ZeroPivotRaises)
{
  const std::vector<Triplet> t{{0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}};
  EXPECT_THROW(Ilu0(csr_from_triplets(2, 2, t)), SolverError);
}

TEST(DenseEig, GeneralizedDiagonalPencil)
{
  Eigen::MatrixXd a = Eigen::Vector4d(8.0, 2.0, 6.0, 4.0).asDiagonal();
  Eigen::MatrixXd m = Eigen::Vector4d(2.0, 2.0, 2.0, 2.0).asDiagonal();
  const auto pairs = dense_generalized_eig(a, m, 3);
  ASSERT_EQ(pairs.size(), 3u);
  EXPECT_NEAR(pairs[0].value, 1.0, 1e-14);
  EXPECT_NEAR(pairs[1].value, 2.0, 1e-14);
  EXPECT_NEAR(pairs[2].value, 3.0, 1e-14);
  EXPECT_NEAR(pairs[0].vector.dot(m * pairs[0].vector), 1.0, 1e-14);
  EXPECT_THROW(dense_generalized_eig(a, m, 2, 3), SolverError);
}

TEST(MatrixMarket, WritesHeaderAndEntries)
{
  const std::vector<Triplet> t{{0, 0, cplx(1, 2)}, {1, 0, 3.0}};
  const auto a = csr_from_triplets(2, 2, t);
  const auto path = std::filesystem::temp_directory_path() / "biot_mm.mtx";
  write_matrix_market(a, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "%%MatrixMarket matrix coordinate complex general");
  std::size_t r, c, nnz;
  in >> r >> c >> nnz;
  EXPECT_EQ(nnz, 2u);
  std::filesystem::remove(path);
}
