#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "qnn/polyfit.hpp"
#include "qnn/rng.hpp"
#include "test_util.hpp"

namespace {

using namespace qnn;
using namespace qnn::polyfit;

std::vector<std::vector<unsigned>> Alphas(const MonomialBasis& b) {
  std::vector<std::vector<unsigned>> out;
  for (const auto& m : b.indices) out.push_back(m.alpha);
  return out;
}

SampleSet Univariate(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<Vector> pts;
  for (double v : x) pts.push_back({v});
  return SampleSet::make(pts, y);
}

TEST(EnumerateBasis, Examples) {
  EXPECT_EQ(Alphas(enumerate_basis(1, 2)), (std::vector<std::vector<unsigned>>{{0}, {1}, {2}}));
  EXPECT_EQ(Alphas(enumerate_basis(2, 2)),
            (std::vector<std::vector<unsigned>>{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}}));
  EXPECT_EQ(Alphas(enumerate_basis(3, 0)), (std::vector<std::vector<unsigned>>{{0, 0, 0}}));
}

TEST(EnumerateBasis, SizeIsBinomialAndOrderIsGradedLex) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (unsigned d = 0; d <= 6; ++d) {
      const auto b = enumerate_basis(n, d);
      // C(n + d, n) by the multiplicative formula in floating point.
      double c = 1.0;
      for (std::size_t i = 1; i <= n; ++i) c = c * (d + i) / i;
      EXPECT_EQ(b.size(), static_cast<std::size_t>(std::llround(c)));
      EXPECT_EQ(b.size(), basis_size(n, d));
      EXPECT_EQ(b.indices.front().degree(), 0u);
      for (std::size_t k = 1; k < b.size(); ++k) {
        const auto& p = b.indices[k - 1];
        const auto& q = b.indices[k];
        EXPECT_TRUE(p.degree() < q.degree() || (p.degree() == q.degree() && p.alpha < q.alpha));
      }
    }
  }
}

TEST(EnumerateBasis, SizeCap) {
  EXPECT_NO_THROW(enumerate_basis(4, 16));     // C(20, 4) = 4845
  EXPECT_THROW(enumerate_basis(5, 20), SizeError);  // C(25, 5) = 53130
  EXPECT_THROW(enumerate_basis(0, 2), DomainError);
}

TEST(DesignMatrix, Examples) {
  EXPECT_EQ(design_matrix(Univariate({0, 1, 2}, {0, 0, 0}), enumerate_basis(1, 2)),
            (Matrix{{1, 0, 0}, {1, 1, 1}, {1, 2, 4}}));
  const auto s = SampleSet::make({{1, 2}}, {0});
  EXPECT_EQ(design_matrix(s, enumerate_basis(2, 1)), (Matrix{{1, 2, 1}}));
  const auto origin = SampleSet::make({{0, 0, 0}}, {0});
  const Matrix a = design_matrix(origin, enumerate_basis(3, 3));
  EXPECT_EQ(a(0, 0), 1.0);
  for (std::size_t k = 1; k < a.cols(); ++k) EXPECT_EQ(a(0, k), 0.0);
  EXPECT_THROW(design_matrix(s, enumerate_basis(1, 1)), DimensionError);
}

TEST(NormalEquations, Examples) {
  const std::vector<double> y{1, 2, 3};
  const auto [m, v] = normal_equations(Matrix::identity(3), y);
  EXPECT_EQ(m, Matrix::identity(3));
  EXPECT_EQ(v, y);
  const auto [m2, v2] = normal_equations(Matrix{{1}, {1}}, std::vector<double>{1, 3});
  EXPECT_EQ(m2, (Matrix{{2}}));
  EXPECT_EQ(v2, (Vector{4}));
  EXPECT_THROW(normal_equations(Matrix{{1}, {1}}, std::vector<double>{1}), DimensionError);
}

TEST(NormalEquations, SymmetricPositiveSemidefinite) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = test::RandomMatrix(rng, 6, 4);
    const auto [m, v] = normal_equations(a, std::vector<double>(6, 1.0));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(m(i, j), m(j, i));
    for (int probe = 0; probe < 10; ++probe) {
      Vector z(4);
      for (auto& x : z) x = uniform01(rng) - 0.5;
      EXPECT_GE(dot(z, m * z), -1e-12);
    }
  }
}

TEST(Fit, TwoPointLine) {
  const auto f = fit(Univariate({0, 1}, {1, 3}), 1);
  EXPECT_NEAR(f.coeffs[0], 1.0, 1e-12);
  EXPECT_NEAR(f.coeffs[1], 2.0, 1e-12);
  for (double r : f.residuals) EXPECT_NEAR(r, 0.0, 1e-12);
  EXPECT_NEAR(predict(f, std::vector<double>{3.0}), 7.0, 1e-12);
}

TEST(Fit, ExactQuadratic) {
  const auto f = fit(Univariate({0, 1, 2}, {0, 1, 4}), 2);
  EXPECT_NEAR(f.coeffs[0], 0.0, 1e-9);
  EXPECT_NEAR(f.coeffs[1], 0.0, 1e-9);
  EXPECT_NEAR(f.coeffs[2], 1.0, 1e-9);
}

TEST(Fit, LargerModelNeverWorse) {
  const auto s = Univariate({0, 1, 2, 3}, {0, 1, 2, 3.1});
  EXPECT_LT(norm2(fit(s, 1).residuals), norm2(fit(s, 0).residuals));
}

TEST(Fit, ResultInvariants) {
  Rng rng(22);
  std::vector<Vector> x;
  Vector y;
  for (int j = 0; j < 15; ++j) {
    x.push_back({2 * uniform01(rng) - 1, 2 * uniform01(rng) - 1});
    y.push_back(uniform01(rng));
  }
  const auto s = SampleSet::make(x, y);
  const auto f = fit(s, 2);
  const Vector ahat = f.design * f.coeffs;
  for (std::size_t j = 0; j < s.size(); ++j) {
    EXPECT_NEAR(f.fitted[j], ahat[j], 1e-10);
    EXPECT_EQ(f.residuals[j], s.y[j] - f.fitted[j]);
    EXPECT_NEAR(predict(f, s.x[j]), f.fitted[j], 1e-10);
  }
  EXPECT_THROW(predict(f, std::vector<double>{1.0}), DimensionError);
}

TEST(Fit, ConstantPredictsMean) {
  const std::vector<double> y{3, 1, 4, 1, 5};
  const auto f = fit(Univariate({0, 1, 2, 3, 4}, y), 0);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  for (double x : {-10.0, 0.0, 2.5, 100.0}) EXPECT_NEAR(predict(f, std::vector<double>{x}), mean, 1e-12);
}

// N + 1 distinct abscissae determine the degree-N interpolant.
TEST(Fit, InterpolatesDistinctAbscissae) {
  Rng rng(23);
  for (unsigned n = 1; n <= 6; ++n) {
    std::vector<double> x, y;
    for (unsigned j = 0; j <= n; ++j) {
      x.push_back(-1.0 + (2.0 * j + uniform01(rng)) / (n + 1));
      y.push_back(4 * uniform01(rng) - 2);
    }
    const auto f = fit(Univariate(x, y), n);
    double ymax = 0.0;
    for (double v : y) ymax = std::max(ymax, std::abs(v));
    EXPECT_LT(norm_inf(f.residuals), 1e-8 * (1.0 + ymax)) << "degree " << n;
  }
}

TEST(Fit, LeastSquaresOptimalUnderPerturbation) {
  Rng rng(24);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> x, y;
    for (int j = 0; j < 20; ++j) {
      x.push_back(2 * uniform01(rng) - 1);
      y.push_back(std::sin(3 * x.back()) + 0.1 * (uniform01(rng) - 0.5));
    }
    const auto f = fit(Univariate(x, y), 3);
    const double base = norm2(f.residuals);
    for (int d = 0; d < 100; ++d) {
      Vector c = f.coeffs, dir(c.size());
      for (auto& v : dir) v = uniform01(rng) - 0.5;
      const double len = norm2(dir);
      for (std::size_t k = 0; k < c.size(); ++k) c[k] += 1e-3 * dir[k] / len;
      EXPECT_GE(norm2(subtract(y, f.design * c)), base - 1e-12);
    }
  }
}

TEST(Fit, DuplicatePointsUseThePseudoinverse) {
  const auto s = Univariate({1, 1, 1, 2, 2}, {0, 1, 2, 5, 7});
  const auto f = fit(s, 3);
  EXPECT_EQ(f.rank, 2u);
  // Two distinct abscissae: best fit passes through the group means.
  EXPECT_NEAR(predict(f, std::vector<double>{1.0}), 1.0, 1e-8);
  EXPECT_NEAR(predict(f, std::vector<double>{2.0}), 6.0, 1e-8);
}

TEST(Fit, StrategiesAgree) {
  const auto s = Univariate({0, 0.5, 1, 1.5, 2, 2.5}, {1, 0, 2, 1, 3, 2});
  const auto c = fit(s, 2, qgje::PivotStrategy::Classical);
  const auto g = fit(s, 2, qgje::PivotStrategy::Grover, qgje::kDefaultTol, 5);
  EXPECT_EQ(c.coeffs, g.coeffs);
  EXPECT_GT(g.oracle_queries, 0u);
}

TEST(SampleSet, Validation) {
  EXPECT_THROW(SampleSet::make({}, {}), DimensionError);
  EXPECT_THROW(SampleSet::make({{1}, {1, 2}}, {0, 0}), DimensionError);
  EXPECT_THROW(SampleSet::make({{NAN}}, {0}), DomainError);
}

}  // namespace
