#pragma once

// Gauss-Jordan elimination with a pluggable pivot search, plus null-space
// extraction, column-space projection and the minimal-norm least-squares solve
// built on top of the reduced row echelon form.
//
// Pivot choice: the committed pivot is always the smallest row index at or
// below the current row whose entry exceeds the threshold. The Grover strategy
// locates *a* qualifying row by simulated amplitude amplification and is then
// canonicalized to that smallest index, so both strategies perform the same
// arithmetic and give bitwise-identical results; only the query accounting
// differs. There is no partial pivoting by magnitude.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qnn/error.hpp"
#include "qnn/grover.hpp"
#include "qnn/matrix.hpp"
#include "qnn/rng.hpp"

namespace qnn::qgje {

enum class PivotStrategy { Classical, Grover };

inline constexpr double kDefaultTol = 1e-10;
/// Extra Grover attempts after a failed measurement before the classical scan.
inline constexpr int kGroverRetries = 3;

inline const char* to_string(PivotStrategy s) { return s == PivotStrategy::Grover ? "grover" : "classical"; }

inline PivotStrategy parse_strategy(std::string_view s) {
  if (s == "classical") return PivotStrategy::Classical;
  if (s == "grover") return PivotStrategy::Grover;
  throw DomainError("unknown pivot strategy '" + std::string(s) + "' (expected classical|grover)");
}

struct PivotSearch {
  std::optional<std::size_t> row;
  std::uint64_t oracle_queries = 0;
  std::uint64_t classical_probes = 0;
  std::uint32_t grover_runs = 0;
  bool grover_found = false;  // some Grover run measured a qualifying row
};

/// Smallest i >= start_row with |column[i]| > tol, or none.
inline PivotSearch pivot_search(std::span<const double> column, std::size_t start_row, PivotStrategy strategy,
                                double tol, std::uint64_t seed) {
  if (start_row >= column.size()) throw DomainError("pivot search start row beyond column length");
  if (!(tol > 0.0)) throw DomainError("pivot tolerance must be positive");

  PivotSearch out;
  auto classical_scan = [&] {
    for (std::size_t i = start_row; i < column.size(); ++i) {
      ++out.classical_probes;
      if (std::abs(column[i]) > tol) return std::optional<std::size_t>(i);
    }
    return std::optional<std::size_t>();
  };

  if (strategy == PivotStrategy::Classical) {
    out.row = classical_scan();
    return out;
  }

  const std::size_t m = column.size() - start_row;
  std::vector<std::size_t> marked;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(column[start_row + i]) > tol) marked.push_back(i);
  }
  grover::Oracle oracle(grover::padded_size(m), marked);
  // The number of qualifying rows is unknown to the searcher; assume one.
  const std::uint64_t iterations = grover::optimal_iterations(oracle.size(), 1);

  for (int attempt = 0; attempt <= kGroverRetries; ++attempt) {
    const auto run = grover::grover_search(oracle, iterations, mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    ++out.grover_runs;
    ++out.classical_probes;  // reading the measured row to confirm it
    if (run.success) {
      out.grover_found = true;
      break;
    }
  }
  out.oracle_queries = oracle.query_count();
  if (out.grover_found) {
    out.row = start_row + oracle.marked().front();
  } else {
    out.row = classical_scan();
  }
  return out;
}

struct EchelonResult {
  Matrix rref;
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  std::vector<Vector> nullspace_basis;
  PivotStrategy pivot_strategy = PivotStrategy::Classical;
  std::uint64_t total_oracle_queries = 0;
  std::uint64_t total_classical_probes = 0;
  double threshold = 0.0;  // absolute pivot threshold actually used
};

namespace detail {

struct Elimination {
  Matrix work;
  std::vector<std::size_t> pivots;
  std::uint64_t oracle_queries = 0;
  std::uint64_t classical_probes = 0;
};

// Reduces the leading `search_cols` columns of `work` to RREF, carrying the
// row operations across all of its columns.
inline Elimination eliminate(Matrix work, std::size_t search_cols, PivotStrategy strategy, double threshold,
                             std::uint64_t seed) {
  Elimination e;
  const std::size_t m = work.rows();
  const std::size_t width = work.cols();
  std::size_t r = 0;
  for (std::size_t c = 0; c < search_cols && r < m; ++c) {
    const Vector column = work.col(c);
    const auto ps = pivot_search(column, r, strategy, threshold, mix_seed(seed, c));
    e.oracle_queries += ps.oracle_queries;
    e.classical_probes += ps.classical_probes;
    if (!ps.row) {
      for (std::size_t i = r; i < m; ++i) work(i, c) = 0.0;
      continue;
    }
    work.swap_rows(*ps.row, r);
    const double pivot = work(r, c);
    for (std::size_t j = 0; j < width; ++j) work(r, j) /= pivot;
    work(r, c) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = work(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) work(i, j) -= f * work(r, j);
      work(i, c) = 0.0;
    }
    e.pivots.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < m; ++i)
    for (std::size_t j = 0; j < search_cols; ++j) work(i, j) = 0.0;
  // Dividing an exact zero by a negative pivot leaves -0.0 behind.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < width; ++j) work(i, j) += 0.0;
  e.work = std::move(work);
  return e;
}

inline double scaled_threshold(const Matrix& a, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  return tol * (1.0 + a.max_abs());
}

// Modified Gram-Schmidt with one reorthogonalization pass; drops vectors whose
// remaining norm falls below `drop` times their original norm.
inline std::vector<Vector> orthonormalize(const std::vector<Vector>& vecs, double drop = 1e-12) {
  std::vector<Vector> q;
  for (const auto& v0 : vecs) {
    Vector v = v0;
    const double n0 = norm2(v);
    if (n0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : q) {
        const double d = dot(u, v);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] -= d * u[k];
      }
    }
    const double n = norm2(v);
    if (n <= drop * n0) continue;
    for (double& x : v) x /= n;
    q.push_back(std::move(v));
  }
  return q;
}

inline Vector project(const std::vector<Vector>& orthonormal, std::span<const double> v) {
  Vector p(v.size(), 0.0);
  for (const auto& u : orthonormal) {
    const double d = dot(u, v);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] += d * u[k];
  }
  return p;
}

inline std::vector<Vector> nullspace_from_rref(const Matrix& r, const std::vector<std::size_t>& pivots,
                                               std::size_t cols) {
  std::vector<bool> is_pivot(cols, false);
  for (std::size_t p : pivots) is_pivot[p] = true;
  std::vector<Vector> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    Vector v(cols, 0.0);
    v[f] = 1.0;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = 0.0 - r(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

inline void require_nonempty(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) throw DimensionError("matrix must be non-empty");
}

}  // namespace detail

/// Reduced row echelon form of `a`. The pivot threshold is tol * (1 + max|a_ij|).
inline EchelonResult rref(const Matrix& a, PivotStrategy strategy = PivotStrategy::Classical,
                          double tol = kDefaultTol, std::uint64_t seed = 0) {
  detail::require_nonempty(a);
  const double threshold = detail::scaled_threshold(a, tol);
  auto e = detail::eliminate(a, a.cols(), strategy, threshold, seed);

  EchelonResult out;
  out.rank = e.pivots.size();
  out.nullspace_basis = detail::nullspace_from_rref(e.work, e.pivots, a.cols());
  out.pivot_cols = std::move(e.pivots);
  out.rref = std::move(e.work);
  out.pivot_strategy = strategy;
  out.total_oracle_queries = e.oracle_queries;
  out.total_classical_probes = e.classical_probes;
  out.threshold = threshold;
  return out;
}

/// Orthogonal projection of v onto col(a), using the pivot columns found by
/// elimination as a basis.
inline Vector project_onto_colspace(const Matrix& a, std::span<const double> v, double tol = kDefaultTol) {
  detail::require_nonempty(a);
  if (v.size() != a.rows()) throw DimensionError("projection vector length must equal row count");
  const auto ech = rref(a, PivotStrategy::Classical, tol);
  std::vector<Vector> cols;
  for (std::size_t c : ech.pivot_cols) cols.push_back(a.col(c));
  return detail::project(detail::orthonormalize(cols), v);
}

struct PinvSolve {
  Vector solution;
  double residual_norm = 0.0;
  Vector projected_rhs;
  std::size_t rank = 0;
  std::uint64_t oracle_queries = 0;
  std::uint64_t classical_probes = 0;
};

/// Minimal-norm least-squares solver for a fixed matrix. One elimination of
/// [A | I] records the row operations, so each right-hand side costs a
/// projection, a back-read of the transformed rhs and a null-space removal.
class PinvSolver {
 public:
  PinvSolver(const Matrix& a, PivotStrategy strategy = PivotStrategy::Classical, double tol = kDefaultTol,
             std::uint64_t seed = 0)
      : a_(a) {
    detail::require_nonempty(a);
    const std::size_t m = a.rows(), n = a.cols();
    Matrix aug(m, n + m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
      aug(i, n + i) = 1.0;
    }
    auto e = detail::eliminate(std::move(aug), n, strategy, detail::scaled_threshold(a, tol), seed);
    pivots_ = e.pivots;
    oracle_queries_ = e.oracle_queries;
    classical_probes_ = e.classical_probes;

    transform_ = Matrix(pivots_.size(), m);
    Matrix reduced(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) reduced(i, j) = e.work(i, j);
      if (i < pivots_.size())
        for (std::size_t j = 0; j < m; ++j) transform_(i, j) = e.work(i, n + j);
    }

    std::vector<Vector> cols;
    for (std::size_t c : pivots_) cols.push_back(a.col(c));
    colspace_ = detail::orthonormalize(cols);
    nullspace_ = detail::orthonormalize(detail::nullspace_from_rref(reduced, pivots_, n));
  }

  std::size_t rank() const noexcept { return pivots_.size(); }
  const std::vector<std::size_t>& pivot_cols() const noexcept { return pivots_; }

  PinvSolve solve(std::span<const double> b) const {
    if (b.size() != a_.rows()) throw DimensionError("rhs length must equal row count");
    PinvSolve out;
    out.projected_rhs = detail::project(colspace_, b);
    const Vector y = transform_ * out.projected_rhs;
    Vector x(a_.cols(), 0.0);
    for (std::size_t i = 0; i < pivots_.size(); ++i) x[pivots_[i]] = y[i];
    const Vector in_null = detail::project(nullspace_, x);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] -= in_null[k];
    out.residual_norm = norm2(subtract(a_ * x, b));
    out.solution = std::move(x);
    out.rank = rank();
    out.oracle_queries = oracle_queries_;
    out.classical_probes = classical_probes_;
    return out;
  }

  /// A+ assembled column by column from solves against the unit vectors.
  Matrix pseudoinverse() const {
    const std::size_t m = a_.rows(), n = a_.cols();
    Matrix p(n, m);
    Vector e(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      e[j] = 1.0;
      const auto s = solve(e);
      for (std::size_t i = 0; i < n; ++i) p(i, j) = s.solution[i];
      e[j] = 0.0;
    }
    return p;
  }

 private:
  Matrix a_;
  std::vector<std::size_t> pivots_;
  Matrix transform_;  // first `rank` rows of the accumulated row operations
  std::vector<Vector> colspace_;
  std::vector<Vector> nullspace_;
  std::uint64_t oracle_queries_ = 0;
  std::uint64_t classical_probes_ = 0;
};

/// x = A+ b: project b onto col(A), solve the now consistent system, strip the
/// null-space component.
inline PinvSolve pinv_solve(const Matrix& a, std::span<const double> b,
                            PivotStrategy strategy = PivotStrategy::Classical, double tol = kDefaultTol,
                            std::uint64_t seed = 0) {
  if (b.size() != a.rows()) throw DimensionError("rhs length must equal row count");
  return PinvSolver(a, strategy, tol, seed).solve(b);
}

inline Matrix pseudoinverse(const Matrix& a, PivotStrategy strategy = PivotStrategy::Classical,
                            double tol = kDefaultTol, std::uint64_t seed = 0) {
  return PinvSolver(a, strategy, tol, seed).pseudoinverse();
}

}  // namespace qnn::qgje
