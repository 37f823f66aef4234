#pragma once

// Multivariate polynomial interpolation and least-squares regression over the
// full monomial basis {x^alpha : |alpha| <= N}, ordered graded-lexicographically
// (by total degree, then lexicographically on the exponent tuple). The
// coefficients solve the normal equations A^T A a = A^T y through the
// minimal-norm pseudoinverse route, so rank-deficient designs (duplicate
// points, too few samples) are handled without special cases.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qnn/error.hpp"
#include "qnn/matrix.hpp"
#include "qnn/qgje.hpp"

namespace qnn::polyfit {

inline constexpr std::size_t kMaxBasisSize = 10000;

struct MultiIndex {
  std::vector<unsigned> alpha;

  unsigned degree() const {
    unsigned d = 0;
    for (unsigned a : alpha) d += a;
    return d;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

struct MonomialBasis {
  std::size_t n_vars = 0;
  unsigned max_degree = 0;
  std::vector<MultiIndex> indices;

  std::size_t size() const noexcept { return indices.size(); }
};

/// C(n + N, n), or kMaxBasisSize + 1 as soon as it exceeds the cap.
inline std::size_t basis_size(std::size_t n_vars, unsigned max_degree) {
  if (max_degree == 0) return 1;
  if (n_vars >= kMaxBasisSize || max_degree >= kMaxBasisSize) return kMaxBasisSize + 1;
  const std::uint64_t total = n_vars + max_degree;
  const std::uint64_t k = std::min<std::uint64_t>(n_vars, max_degree);
  std::uint64_t c = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    c = c * (total - i) / (i + 1);
    if (c > kMaxBasisSize) return kMaxBasisSize + 1;
  }
  return static_cast<std::size_t>(c);
}

inline MonomialBasis enumerate_basis(std::size_t n_vars, unsigned max_degree) {
  if (n_vars < 1) throw DomainError("need at least one variable");
  const std::size_t count = basis_size(n_vars, max_degree);
  if (count > kMaxBasisSize) {
    throw SizeError("monomial basis for n=" + std::to_string(n_vars) + ", N=" + std::to_string(max_degree) +
                    " exceeds " + std::to_string(kMaxBasisSize) + " terms");
  }
  MonomialBasis basis{n_vars, max_degree, {}};
  basis.indices.reserve(count);
  std::vector<unsigned> alpha(n_vars, 0);
  // Lexicographic enumeration of exponent tuples with a fixed total.
  std::function<void(std::size_t, unsigned)> fill = [&](std::size_t pos, unsigned remaining) {
    if (pos + 1 == n_vars) {
      alpha[pos] = remaining;
      basis.indices.push_back({alpha});
      return;
    }
    for (unsigned a = 0; a <= remaining; ++a) {
      alpha[pos] = a;
      fill(pos + 1, remaining - a);
    }
  };
  for (unsigned d = 0; d <= max_degree; ++d) fill(0, d);
  return basis;
}

/// x^alpha with 0^0 = 1.
inline double monomial(std::span<const double> x, const MultiIndex& m) {
  double v = 1.0;
  for (std::size_t i = 0; i < m.alpha.size(); ++i)
    for (unsigned p = 0; p < m.alpha[i]; ++p) v *= x[i];
  return v;
}

struct SampleSet {
  std::size_t n_vars = 0;
  std::vector<Vector> x;
  Vector y;

  std::size_t size() const noexcept { return y.size(); }

  /// Validates and assembles a sample set; every x has n_vars components.
  static SampleSet make(std::vector<Vector> x, Vector y) {
    if (x.empty() || x.size() != y.size()) throw DimensionError("need one y per x and at least one sample");
    SampleSet s{x.front().size(), std::move(x), std::move(y)};
    if (s.n_vars == 0) throw DimensionError("samples need at least one variable");
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (s.x[j].size() != s.n_vars) throw DimensionError("sample " + std::to_string(j) + " has wrong dimension");
      for (double v : s.x[j])
        if (!std::isfinite(v)) throw DomainError("non-finite sample coordinate");
      if (!std::isfinite(s.y[j])) throw DomainError("non-finite sample value");
    }
    return s;
  }
};

/// Vandermonde-type design: row j holds every basis monomial evaluated at x_j.
inline Matrix design_matrix(const SampleSet& samples, const MonomialBasis& basis) {
  if (samples.n_vars != basis.n_vars) {
    throw DimensionError("samples have " + std::to_string(samples.n_vars) + " variables, basis has " +
                         std::to_string(basis.n_vars));
  }
  Matrix a(samples.size(), basis.size());
  for (std::size_t j = 0; j < samples.size(); ++j)
    for (std::size_t k = 0; k < basis.size(); ++k) a(j, k) = monomial(samples.x[j], basis.indices[k]);
  return a;
}

/// (A^T A, A^T y).
inline std::pair<Matrix, Vector> normal_equations(const Matrix& a, std::span<const double> y) {
  if (y.size() != a.rows()) throw DimensionError("y length must equal design row count");
  const Matrix at = a.transpose();
  return {at * a, at * y};
}

struct FitResult {
  MonomialBasis basis;
  Vector coeffs;
  Vector fitted;
  Vector residuals;
  Matrix design;
  std::size_t rank = 0;  // of A^T A
  std::uint64_t oracle_queries = 0;
  std::uint64_t classical_probes = 0;
};

inline FitResult fit(const SampleSet& samples, unsigned max_degree,
                     qgje::PivotStrategy strategy = qgje::PivotStrategy::Classical, double tol = qgje::kDefaultTol,
                     std::uint64_t seed = 0) {
  FitResult out;
  out.basis = enumerate_basis(samples.n_vars, max_degree);
  out.design = design_matrix(samples, out.basis);
  const auto [ata, aty] = normal_equations(out.design, samples.y);
  const Vector rhs = qgje::project_onto_colspace(ata, aty, tol);
  auto sol = qgje::pinv_solve(ata, rhs, strategy, tol, seed);
  out.coeffs = std::move(sol.solution);
  out.rank = sol.rank;
  out.oracle_queries = sol.oracle_queries;
  out.classical_probes = sol.classical_probes;
  out.fitted = out.design * out.coeffs;
  out.residuals = subtract(samples.y, out.fitted);
  return out;
}

/// Sum of a_alpha x^alpha over the fitted basis.
inline double predict(const FitResult& f, std::span<const double> x) {
  if (x.size() != f.basis.n_vars) throw DimensionError("prediction point has wrong dimension");
  double s = 0.0;
  for (std::size_t k = 0; k < f.basis.size(); ++k) s += f.coeffs[k] * monomial(x, f.basis.indices[k]);
  return s;
}

}  // namespace qnn::polyfit
