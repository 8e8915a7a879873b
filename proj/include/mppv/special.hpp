#pragma once
// Scalar special functions used across the library: log-gamma wrappers, the
// regularized incomplete gamma pair, normal cdf/quantile, gamma quantile, the
// Kolmogorov tail, and chi-square tail. All double precision, all pure.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "mppv/errors.hpp"

namespace mppv {

inline double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: requires x > 0, got " + std::to_string(x));
  return std::lgamma(x);
}

// log(k!) for k >= 0.
inline double log_factorial(std::int64_t k) {
  if (k < 0) throw DomainError("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(k) + 1.0);
}

namespace detail {

// Series expansion of P(a,x), effective for x < a+1.
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) {
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw NumericError("regularized_gamma_p: series did not converge");
}

// Continued fraction for Q(a,x) by modified Lentz, effective for x >= a+1.
inline double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) {
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
  }
  throw NumericError("regularized_gamma_q: continued fraction did not converge");
}

}  // namespace detail

// Regularized lower incomplete gamma P(a,x) = gamma(a,x)/Gamma(a).
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw DomainError("regularized_gamma_p: requires a > 0");
  if (x < 0.0) throw DomainError("regularized_gamma_p: requires x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_contfrac(a, x);
}

// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
inline double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw DomainError("regularized_gamma_q: requires a > 0");
  if (x < 0.0) throw DomainError("regularized_gamma_q: requires x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_contfrac(a, x);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// Standard normal quantile: Acklam's rational approximation polished by one
// Halley step, giving close to full double accuracy on (0,1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile: requires p in (0,1), got " + std::to_string(p));
  }
  static constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                  -2.759285104469687e+02, 1.383577518672690e+02,
                                  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                  -1.556989798598866e+02, 6.680131188771972e+01,
                                  -1.328068155288572e+01};
  static constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                  -2.400758277161838e+00, -2.549732539343734e+00,
                                  4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                  2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the exact cdf.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

// Quantile of Gamma(shape, rate). Wilson-Hilferty start, then safeguarded
// Newton on the regularized cdf.
inline double gamma_quantile(double shape, double rate, double p) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw DomainError("gamma_quantile: requires shape > 0 and rate > 0");
  }
  if (!(p >= 0.0 && p < 1.0)) throw DomainError("gamma_quantile: requires p in [0,1)");
  if (p == 0.0) return 0.0;

  double x;
  if (shape > 0.3) {
    const double z = normal_quantile(p);
    const double t = 1.0 - 1.0 / (9.0 * shape) + z / (3.0 * std::sqrt(shape));
    x = shape * t * t * t;
  } else {
    x = 0.0;
  }
  if (!(x > 0.0)) {
    // Small-x inversion of the leading series term P(a,x) ~ x^a / (a Gamma(a)).
    x = std::exp((std::log(p) + std::log(shape) + std::lgamma(shape)) / shape);
  }

  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 200; ++it) {
    const double f = regularized_gamma_p(shape, x) - p;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double log_pdf = (shape - 1.0) * std::log(x) - x - std::lgamma(shape);
    const double step = f * std::exp(-log_pdf);
    double next = x - step;
    if (!(next > lo && (next < hi))) {
      next = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);
    }
    if (std::fabs(next - x) <= 1e-14 * std::fabs(x)) {
      x = next;
      break;
    }
    x = next;
  }
  return x / rate;
}

// Kolmogorov limiting tail Q(lambda) = P(sup|B(t)| > lambda). Two theta-series
// forms, switched where both converge fast.
inline double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    const double y = std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    const double sum = y + std::pow(y, 9.0) + std::pow(y, 25.0) + std::pow(y, 49.0);
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-18) break;
    sign = -sign;
  }
  return 2.0 * sum;
}

// Asymptotic p-value of the one-sample statistic D_n, with Stephens' finite-n
// adjustment lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) D_n.
inline double ks_p_value(std::size_t n, double d) {
  if (n == 0) throw DomainError("ks_p_value: empty sample");
  if (d <= 0.0) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

// Critical statistic: smallest d with p-value <= alpha, found by bisection.
inline double ks_critical_value(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ks_critical_value: alpha in (0,1)");
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ks_p_value(n, mid) > alpha) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Upper tail of chi-square with df degrees of freedom.
inline double chi_square_sf(double df, double x) {
  if (!(df > 0.0)) throw DomainError("chi_square_sf: requires df > 0");
  if (x <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace mppv
