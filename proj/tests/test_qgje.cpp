#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles/reference_rref.hpp"
#include "qnn/qgje.hpp"
#include "qnn/rng.hpp"
#include "test_util.hpp"

namespace {

using namespace qnn;
using namespace qnn::qgje;
using qnn::test::RandomMatrix;
using qnn::test::RankDeficientMatrix;

TEST(PivotSearch, ClassicalFindsFirstNonzero) {
  const std::vector<double> col{0, 0, 5, 0};
  const auto r = pivot_search(col, 0, PivotStrategy::Classical, 1e-12, 0);
  ASSERT_TRUE(r.row);
  EXPECT_EQ(*r.row, 2u);
  EXPECT_EQ(r.classical_probes, 3u);
  EXPECT_EQ(r.oracle_queries, 0u);
}

TEST(PivotSearch, NoneWhenAllZero) {
  const std::vector<double> col{0, 0, 0};
  for (auto s : {PivotStrategy::Classical, PivotStrategy::Grover}) {
    EXPECT_FALSE(pivot_search(col, 0, s, 1e-12, 1).row);
  }
}

TEST(PivotSearch, GroverFindsRowBelowStart) {
  const std::vector<double> col{3, 0, 4};
  int first_try = 0, found = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto r = pivot_search(col, 1, PivotStrategy::Grover, 1e-12, seed);
    ASSERT_TRUE(r.row);
    EXPECT_EQ(*r.row, 2u);
    EXPECT_LE(r.grover_runs, 4u);
    first_try += r.grover_runs == 1;
    found += r.grover_found;
  }
  // M = 2 after padding, one marked: each round succeeds with probability 1/2,
  // so four rounds miss 1/16 of the time and the classical scan takes over.
  EXPECT_GT(first_try, 150);
  EXPECT_GT(found, 350);
}

TEST(PivotSearch, GroverCanonicalizesToSmallestQualifyingRow) {
  const std::vector<double> col{0, 1e-14, 2, 0, 7, 9, 0, 1};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto r = pivot_search(col, 0, PivotStrategy::Grover, 1e-12, seed);
    ASSERT_TRUE(r.row);
    EXPECT_EQ(*r.row, 2u);
  }
}

TEST(PivotSearch, BadArguments) {
  const std::vector<double> col{1, 2};
  EXPECT_THROW(pivot_search(col, 2, PivotStrategy::Classical, 1e-12, 0), DomainError);
  EXPECT_THROW(pivot_search(col, 0, PivotStrategy::Classical, 0.0, 0), DomainError);
}

TEST(Rref, Identity) {
  const auto e = rref(Matrix::identity(3));
  EXPECT_EQ(e.rref, Matrix::identity(3));
  EXPECT_EQ(e.rank, 3u);
  EXPECT_TRUE(e.nullspace_basis.empty());
  EXPECT_EQ(e.pivot_cols, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Rref, RankOneTwoByTwo) {
  const auto e = rref(Matrix{{1, 1}, {1, 1}});
  EXPECT_EQ(e.rref, (Matrix{{1, 1}, {0, 0}}));
  EXPECT_EQ(e.rank, 1u);
  ASSERT_EQ(e.nullspace_basis.size(), 1u);
  const auto& v = e.nullspace_basis[0];
  EXPECT_DOUBLE_EQ(v[0], -1.0);
  EXPECT_DOUBLE_EQ(v[1], 1.0);
}

TEST(Rref, ZeroMatrix) {
  const auto e = rref(Matrix(2, 3));
  EXPECT_EQ(e.rank, 0u);
  EXPECT_EQ(e.nullspace_basis.size(), 3u);
}

TEST(Rref, EmptyMatrixRejected) { EXPECT_THROW(rref(Matrix(0, 0)), DimensionError); }

TEST(Rref, StrategiesAgreeBitwise) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix a = trial % 2 ? RandomMatrix(rng, 6, 4) : RankDeficientMatrix(rng, 6, 4, 2);
    const auto c = rref(a, PivotStrategy::Classical, kDefaultTol, trial);
    const auto g = rref(a, PivotStrategy::Grover, kDefaultTol, 1000 + trial);
    EXPECT_EQ(c.pivot_cols, g.pivot_cols);
    EXPECT_EQ(c.rank, g.rank);
    EXPECT_EQ(c.rref, g.rref);
    EXPECT_GT(g.total_oracle_queries, 0u);
    EXPECT_EQ(c.total_oracle_queries, 0u);
  }
}

TEST(Rref, MatchesIndependentElimination) {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 2 + trial % 6, n = 2 + (trial / 6) % 6;
    const Matrix a = RankDeficientMatrix(rng, m, n, 1 + trial % std::min(m, n));
    const auto e = rref(a);
    const auto ref = oracle::reference_rref(qnn::test::ToRows(a));
    ASSERT_EQ(e.pivot_cols, ref.pivots) << "trial " << trial;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) EXPECT_NEAR(e.rref(i, j), ref.r[i][j], 1e-9) << "trial " << trial;
  }
}

TEST(Rref, StructuralInvariants) {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + trial % 7, n = 1 + (trial / 7) % 7;
    const Matrix a = RankDeficientMatrix(rng, m, n, 1 + trial % std::min(m, n));
    const auto e = rref(a);
    EXPECT_EQ(e.rank, e.pivot_cols.size());
    EXPECT_EQ(e.rank + e.nullspace_basis.size(), n);
    std::size_t nonzero_rows = 0;
    for (std::size_t i = 0; i < m; ++i) {
      bool nz = false;
      for (double v : e.rref.row(i)) nz = nz || v != 0.0;
      nonzero_rows += nz;
    }
    EXPECT_EQ(nonzero_rows, e.rank);
    for (std::size_t i = 1; i < e.pivot_cols.size(); ++i) EXPECT_LT(e.pivot_cols[i - 1], e.pivot_cols[i]);
    for (std::size_t i = 0; i < e.rank; ++i) {
      for (std::size_t r = 0; r < m; ++r) EXPECT_EQ(e.rref(r, e.pivot_cols[i]), r == i ? 1.0 : 0.0);
    }
    for (const auto& v : e.nullspace_basis) {
      EXPECT_LT(norm_inf(a * v), 1e-8 * (1.0 + a.norm_inf()));
    }
  }
}

TEST(Project, IdentityLeavesVectorAlone) {
  const std::vector<double> v{1.5, -2, 3};
  const auto p = project_onto_colspace(Matrix::identity(3), v);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(p[i], v[i], 1e-15);
}

TEST(Project, OntoFirstAxis) {
  const std::vector<double> v{2, 3};
  const auto p = project_onto_colspace(Matrix{{1}, {0}}, v);
  EXPECT_NEAR(p[0], 2.0, 1e-15);
  EXPECT_NEAR(p[1], 0.0, 1e-15);
}

TEST(Project, ResidualOrthogonalToColumns) {
  Rng rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const Matrix a = RankDeficientMatrix(rng, 7, 4, 1 + trial % 4);
    std::vector<double> v(7);
    for (auto& x : v) x = 10 * uniform01(rng) - 5;
    const auto p = project_onto_colspace(a, v);
    const auto d = subtract(v, p);
    for (std::size_t j = 0; j < a.cols(); ++j) EXPECT_LT(std::abs(dot(d, a.col(j))), 1e-9);
  }
  EXPECT_THROW(project_onto_colspace(Matrix::identity(2), std::vector<double>{1.0}), DimensionError);
}

TEST(PinvSolve, ExactSquareSystem) {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = RandomMatrix(rng, 5, 5);
    std::vector<double> x0(5);
    for (auto& x : x0) x = 4 * uniform01(rng) - 2;
    const auto s = pinv_solve(a, a * x0);
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(s.solution[i], x0[i], 1e-9);
    EXPECT_LT(s.residual_norm, 1e-9);
  }
}

TEST(PinvSolve, DiagonalRankOne) {
  const auto s = pinv_solve(Matrix{{1, 0}, {0, 0}}, std::vector<double>{2, 3});
  EXPECT_NEAR(s.solution[0], 2.0, 1e-15);
  EXPECT_NEAR(s.solution[1], 0.0, 1e-15);
  EXPECT_NEAR(s.residual_norm, 3.0, 1e-15);
  EXPECT_NEAR(s.projected_rhs[0], 2.0, 1e-15);
  EXPECT_NEAR(s.projected_rhs[1], 0.0, 1e-15);
  const Matrix p = pseudoinverse(Matrix{{1, 0}, {0, 0}});
  EXPECT_EQ(p, (Matrix{{1, 0}, {0, 0}}));
}

Eigen::MatrixXd ToEigen(const Matrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
  return e;
}

TEST(PinvSolve, PenroseConditionsAgainstSvdOracle) {
  Rng rng(16);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix a = RankDeficientMatrix(rng, 5, 3, 1 + trial % 2);
    const Eigen::MatrixXd A = ToEigen(a);
    const Eigen::MatrixXd P = ToEigen(pseudoinverse(a));
    auto rel = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) { return (x - y).norm() / (1.0 + y.norm()); };
    EXPECT_LT(rel(A * P * A, A), 1e-8);
    EXPECT_LT(rel(P * A * P, P), 1e-8);
    EXPECT_LT(rel((A * P).transpose(), A * P), 1e-8);
    EXPECT_LT(rel((P * A).transpose(), P * A), 1e-8);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    Eigen::VectorXd b = Eigen::VectorXd::Random(5);
    const Eigen::VectorXd x_svd = svd.solve(b);
    const auto s = pinv_solve(a, std::vector<double>(b.data(), b.data() + 5));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(s.solution[i], x_svd(i), 1e-8);
  }
}

TEST(PinvSolve, MinimalNormAmongLeastSquaresSolutions) {
  Rng rng(17);
  const Matrix a = RankDeficientMatrix(rng, 6, 4, 2);
  std::vector<double> b(6);
  for (auto& x : b) x = uniform01(rng);
  const auto s = pinv_solve(a, b);
  const auto e = rref(a);
  // Adding any null-space direction keeps the residual but grows the norm.
  for (const auto& v : e.nullspace_basis) {
    auto x = s.solution;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += 0.1 * v[k];
    EXPECT_NEAR(norm2(subtract(a * x, b)), s.residual_norm, 1e-9);
    EXPECT_GT(norm2(x), norm2(s.solution));
  }
}

TEST(PinvSolve, GroverStrategySameSolution) {
  Rng rng(18);
  const Matrix a = RankDeficientMatrix(rng, 5, 5, 3);
  const std::vector<double> b{1, 2, 3, 4, 5};
  const auto c = pinv_solve(a, b, PivotStrategy::Classical);
  const auto g = pinv_solve(a, b, PivotStrategy::Grover, kDefaultTol, 99);
  EXPECT_EQ(c.solution, g.solution);
  EXPECT_GT(g.oracle_queries, 0u);
}

TEST(Strategy, Parse) {
  EXPECT_EQ(parse_strategy("grover"), PivotStrategy::Grover);
  EXPECT_EQ(parse_strategy("classical"), PivotStrategy::Classical);
  EXPECT_THROW(parse_strategy("magic"), DomainError);
}

}  // namespace
