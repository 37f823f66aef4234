#pragma once

// Statistics behind the training gates: Pearson correlation, the regression
// F-ratio, the contingency-table chi-squared statistic, the regularized
// incomplete gamma/beta functions and the chi-squared / F quantiles derived
// from them by bisection.
//
// Gate direction: a gate passes when the statistic lies strictly below the
// upper-alpha quantile, i.e. inside the 1 - alpha region. For the F gate this
// means a *small* F passes, the reverse of the usual regression significance
// test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qnn/error.hpp"
#include "qnn/matrix.hpp"
#include "qnn/polyfit.hpp"

namespace qnn::stats {

/// A test statistic that is either a finite value or the explicit infinite-F
/// signal (|r| = 1, zero residual). Never carries a floating-point infinity.
class Statistic {
 public:
  static Statistic finite(double v) {
    if (!std::isfinite(v)) throw DomainError("statistic value must be finite");
    return Statistic(v, false);
  }
  static Statistic infinite() { return Statistic(0.0, true); }

  bool is_infinite() const noexcept { return infinite_; }

  double value() const {
    if (infinite_) throw DegenerateError("statistic is infinite");
    return value_;
  }

  friend bool operator==(const Statistic&, const Statistic&) = default;

 private:
  Statistic(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

// ---------------------------------------------------------------------------
// Correlation and F-ratio

/// Sample Pearson correlation. Exactly one constant series gives 0; both
/// constant is degenerate.
inline double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("pearson_r needs equal-length series");
  if (x.size() < 2) throw DimensionError("pearson_r needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 && syy == 0.0) throw DegenerateError("pearson_r of two constant series");
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// (N - 2) r^2 / (1 - r^2); |r| = 1 gives the infinite signal.
inline Statistic f_ratio_pearson(double r, long long n_samples) {
  if (n_samples < 3) throw DomainError("F-ratio needs N >= 3");
  if (!(std::abs(r) <= 1.0)) throw DomainError("correlation outside [-1, 1]");
  const double r2 = r * r;
  if (1.0 - r2 <= 0.0) return Statistic::infinite();
  return Statistic::finite(static_cast<double>(n_samples - 2) * r2 / (1.0 - r2));
}

struct SSDecomposition {
  double ss_total = 0.0;
  double ss_regr = 0.0;
  double ss_resid = 0.0;
  double ms_regr = 0.0;
  double ms_resid = 0.0;
  long long df_regr = 0;
  long long df_resid = 0;
};

struct FTest {
  SSDecomposition ss;
  Statistic f = Statistic::finite(0.0);
};

/// A residual vector this small relative to ||y|| counts as an exact fit.
inline constexpr double kExactFitRelTol = 1e-10;

/// Sum-of-squares split of a fit that includes the constant term, and
/// F = MS_regr / MS_resid with df (p, N - p - 1), p = basis size - 1.
inline FTest f_ratio_ss(const polyfit::FitResult& fit, std::span<const double> y) {
  if (y.size() != fit.fitted.size()) throw DimensionError("y length does not match the fit");
  if (fit.basis.indices.empty() || fit.basis.indices.front().degree() != 0) {
    throw DomainError("F-ratio requires a fit with a constant term");
  }
  const long long n = static_cast<long long>(y.size());
  const long long p = static_cast<long long>(fit.basis.size()) - 1;
  FTest out;
  out.ss.df_regr = p;
  out.ss.df_resid = n - p - 1;
  if (out.ss.df_resid <= 0) {
    throw SaturatedModelError("no residual degrees of freedom (N=" + std::to_string(n) +
                              ", p=" + std::to_string(p) + ")");
  }
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double sumsq_y = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    const double dy = y[j] - mean, dr = fit.fitted[j] - mean, e = y[j] - fit.fitted[j];
    out.ss.ss_total += dy * dy;
    out.ss.ss_regr += dr * dr;
    out.ss.ss_resid += e * e;
    sumsq_y += y[j] * y[j];
  }
  out.ss.ms_regr = p > 0 ? out.ss.ss_regr / static_cast<double>(p) : 0.0;
  out.ss.ms_resid = out.ss.ss_resid / static_cast<double>(out.ss.df_resid);
  if (out.ss.ss_resid <= kExactFitRelTol * kExactFitRelTol * sumsq_y) {
    out.f = Statistic::infinite();
  } else {
    out.f = Statistic::finite(out.ss.ms_regr / out.ss.ms_resid);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Contingency tables

class ContingencyTable {
 public:
  /// observed >= 0 and expected > 0, same shape.
  static ContingencyTable make(Matrix observed, Matrix expected) {
    if (observed.rows() != expected.rows() || observed.cols() != expected.cols()) {
      throw DimensionError("observed and expected tables differ in shape");
    }
    if (observed.empty()) throw DimensionError("contingency table is empty");
    for (double v : observed.data())
      if (!(v >= 0.0)) throw DomainError("observed counts must be non-negative");
    for (double v : expected.data())
      if (!(v > 0.0)) throw DomainError("expected counts must be positive");
    return ContingencyTable(std::move(observed), std::move(expected));
  }

  /// Extension: expected counts from the observed marginals,
  /// e_ij = (row_i total)(col_j total) / grand total.
  static ContingencyTable from_marginals(Matrix observed) {
    const std::size_t n = observed.rows(), r = observed.cols();
    std::vector<double> row(n, 0.0), col(r, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < r; ++j) {
        row[i] += observed(i, j);
        col[j] += observed(i, j);
        total += observed(i, j);
      }
    Matrix expected(n, r);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < r; ++j) expected(i, j) = total > 0.0 ? row[i] * col[j] / total : 0.0;
    return make(std::move(observed), std::move(expected));
  }

  const Matrix& observed() const noexcept { return observed_; }
  const Matrix& expected() const noexcept { return expected_; }
  std::size_t rows() const noexcept { return observed_.rows(); }
  std::size_t cols() const noexcept { return observed_.cols(); }

 private:
  ContingencyTable(Matrix o, Matrix e) : observed_(std::move(o)), expected_(std::move(e)) {}
  Matrix observed_;
  Matrix expected_;
};

/// Sum over cells of (x_ij - e_ij)^2 / e_ij.
inline double chi2_stat(const ContingencyTable& t) {
  double s = 0.0;
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) {
      const double e = t.expected()(i, j);
      if (!(e > 0.0)) throw DomainError("expected count must be positive");
      const double d = t.observed()(i, j) - e;
      s += d * d / e;
    }
  return s;
}

/// (n-1)(r-1) for r > 1, n-1 for a single column.
inline long long chi2_df(long long n, long long r) {
  if (n < 2) throw DomainError("chi-squared df needs n >= 2 rows");
  if (r < 1) throw DomainError("chi-squared df needs r >= 1 columns");
  return r > 1 ? (n - 1) * (r - 1) : n - 1;
}

// ---------------------------------------------------------------------------
// Special functions

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
inline constexpr int kMaxIter = 100000;

// Series for P(s, x), valid for x < s + 1.
inline double gamma_series(double s, double x) {
  double ap = s, del = 1.0 / s, sum = del;
  for (int n = 0; n < kMaxIter; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Modified Lentz continued fraction for Q(s, x), valid for x >= s + 1.
inline double gamma_cont_frac(double s, double x) {
  double b = x + 1.0 - s, c = 1.0 / kTiny, d = 1.0 / b, h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
inline double beta_cont_frac(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized lower incomplete gamma P(s, x).
inline double reg_inc_gamma(double s, double x) {
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("reg_inc_gamma needs s > 0");
  if (!(x >= 0.0)) throw DomainError("reg_inc_gamma needs x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < s + 1.0) return std::clamp(detail::gamma_series(s, x), 0.0, 1.0);
  return std::clamp(1.0 - detail::gamma_cont_frac(s, x), 0.0, 1.0);
}

/// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("reg_inc_beta needs a, b > 0");
  }
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("reg_inc_beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::clamp(front * detail::beta_cont_frac(a, b, x) / a, 0.0, 1.0);
  return std::clamp(1.0 - front * detail::beta_cont_frac(b, a, 1.0 - x) / b, 0.0, 1.0);
}

inline double chi2_cdf(double df, double x) {
  if (!(df > 0.0)) throw DomainError("chi-squared df must be positive");
  if (x <= 0.0) return 0.0;
  return reg_inc_gamma(0.5 * df, 0.5 * x);
}

inline double f_cdf(double d1, double d2, double x) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw DomainError("F degrees of freedom must be positive");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return reg_inc_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

namespace detail {

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
}

// Solves cdf(q) = target for an increasing cdf on [0, inf) by bracketing and
// bisection down to a relative interval width of 1e-15.
template <class Cdf>
double invert_cdf(Cdf cdf, double target) {
  double lo = 0.0, hi = 1.0;
  while (cdf(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw DomainError("quantile bracket overflow");
  }
  for (int i = 0; i < 2000 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (cdf(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Upper-alpha quantile: q with CDF_chi2(df)(q) = 1 - alpha.
inline double chi2_quantile(long long df, double alpha) {
  if (df < 1) throw DomainError("chi-squared df must be >= 1");
  detail::check_alpha(alpha);
  const double d = static_cast<double>(df);
  return detail::invert_cdf([d](double q) { return chi2_cdf(d, q); }, 1.0 - alpha);
}

/// Upper-alpha quantile of F(d1, d2).
inline double f_quantile(long long d1, long long d2, double alpha) {
  if (d1 < 1 || d2 < 1) throw DomainError("F degrees of freedom must be >= 1");
  detail::check_alpha(alpha);
  const double a = static_cast<double>(d1), b = static_cast<double>(d2);
  return detail::invert_cdf([a, b](double q) { return f_cdf(a, b, q); }, 1.0 - alpha);
}

// ---------------------------------------------------------------------------
// Gate decisions

enum class TestKind { F, ChiSquared };

inline const char* to_string(TestKind k) { return k == TestKind::F ? "F" : "chi2"; }

struct GateDecision {
  TestKind test = TestKind::F;
  Statistic statistic = Statistic::finite(0.0);
  std::vector<long long> df;
  double alpha = 0.05;
  double threshold = 0.0;
  bool pass = false;  // statistic < threshold; never for an infinite statistic
};

inline GateDecision f_threshold_pass(Statistic f, long long d1, long long d2, double alpha) {
  GateDecision g;
  g.test = TestKind::F;
  g.statistic = f;
  g.df = {d1, d2};
  g.alpha = alpha;
  g.threshold = f_quantile(d1, d2, alpha);
  g.pass = !f.is_infinite() && f.value() < g.threshold;
  return g;
}

inline GateDecision chi2_threshold_pass(double stat, long long df, double alpha) {
  GateDecision g;
  g.test = TestKind::ChiSquared;
  g.statistic = Statistic::finite(stat);
  g.df = {df};
  g.alpha = alpha;
  g.threshold = chi2_quantile(df, alpha);
  g.pass = stat < g.threshold;
  return g;
}

}  // namespace qnn::stats
