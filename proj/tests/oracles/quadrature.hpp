#pragma once

// Test-only reference values by adaptive Gauss-Kronrod (7/15) quadrature.
// Deliberately shares nothing with the series / continued-fraction code under
// test.

#include <algorithm>
#include <cmath>
#include <functional>

namespace qnn::oracle {

namespace detail {

struct GkEstimate {
  double value;
  double error;
};

inline GkEstimate gauss_kronrod15(const std::function<double(double)>& f, double a, double b) {
  static constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                   0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                   0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                   0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                   0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = wk[7] * fc, g = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double f1 = f(c - h * xk[i]), f2 = f(c + h * xk[i]);
    k += wk[i] * (f1 + f2);
    if (i % 2 == 1) g += wg[i / 2] * (f1 + f2);
  }
  return {k * h, std::abs((k - g) * h)};
}

inline double adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
  const auto whole = gauss_kronrod15(f, a, b);
  if (whole.error <= tol || depth > 40) return whole.value;
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, 0.5 * tol, depth + 1) + adapt(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Tolerance is relative to a first coarse estimate of the integral.
inline double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-14) {
  if (a == b) return 0.0;
  const double scale = std::abs(detail::gauss_kronrod15(f, a, b).value);
  return detail::adapt(f, a, b, rel_tol * std::max(scale, 1e-300), 0);
}

/// P(s, x). For s < 1 the substitution t = u^{1/s} removes the t^{s-1} pole:
/// P = 1/Gamma(s+1) * integral_0^{x^s} exp(-u^{1/s}) du.
inline double inc_gamma_p(double s, double x) {
  if (x <= 0.0) return 0.0;
  if (s >= 1.0) {
    const double lg = std::lgamma(s);
    return integrate([s, lg](double t) { return t > 0.0 ? std::exp((s - 1.0) * std::log(t) - t - lg) : (s == 1.0 ? 1.0 : 0.0); },
                     0.0, x);
  }
  const double upper = std::pow(x, s);
  const double v = integrate([s](double u) { return std::exp(-std::pow(u, 1.0 / s)); }, 0.0, upper);
  return v / std::tgamma(s + 1.0);
}

/// I_x(a, b), integrating from whichever end keeps the substituted integrand bounded.
inline double inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  auto lower_tail = [](double p, double q, double z) {
    // integral_0^z t^{p-1}(1-t)^{q-1} dt with t = u^{1/p}
    const double upper = std::pow(z, p);
    const double v = integrate([p, q](double u) { return std::pow(1.0 - std::pow(u, 1.0 / p), q - 1.0) / p; },
                               0.0, upper);
    return v * std::exp(std::lgamma(p + q) - std::lgamma(p) - std::lgamma(q));
  };
  if (x <= 0.5) return lower_tail(a, b, x);
  return 1.0 - lower_tail(b, a, 1.0 - x);
}

inline double chi2_cdf(double df, double x) { return inc_gamma_p(0.5 * df, 0.5 * x); }

inline double f_cdf(double d1, double d2, double x) {
  if (x <= 0.0) return 0.0;
  return inc_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2));
}

/// Upper-alpha quantile by plain bisection on an oracle CDF.
inline double quantile_by_bisection(const std::function<double(double)>& cdf, double alpha) {
  double lo = 0.0, hi = 1.0;
  while (cdf(hi) < 1.0 - alpha) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < 1.0 - alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qnn::oracle
