#pragma once

#include <cmath>

// Standard normal kernels used throughout the library.  The CDF is built on
// std::erfc, which stays accurate deep into the lower tail; the inverse CDF
// combines a rational initial guess with Halley refinement against the
// erfc-based CDF, so its accuracy is limited only by erfc itself (~1e-16).

namespace tnbma {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779;  // 1/sqrt(2*pi)
inline constexpr double kLogSqrt2Pi = 0.9189385332046727418;  // log(sqrt(2*pi))
inline constexpr double kInvSqrt2 = 0.7071067811865475244;    // 1/sqrt(2)

inline double std_normal_pdf(double x) {
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * kInvSqrt2);
}

// Upper tail 1 - Phi(x), computed without cancellation.
inline double std_normal_cdf_complement(double x) {
  return 0.5 * std::erfc(x * kInvSqrt2);
}

namespace detail {

// Asymptotic series S(t) with Phi(-t) = phi(t)/t * S(t) for large t > 0.
// Truncated after the t^-14 term; below 1e-16 relative for t >= 26.
inline double mills_tail_series(double t) {
  const double inv2 = 1.0 / (t * t);
  double term = 1.0;
  double sum = 1.0;
  double odd = 1.0;
  for (int k = 1; k <= 7; ++k) {
    term *= -odd * inv2;
    sum += term;
    odd += 2.0;
  }
  return sum;
}

}  // namespace detail

// phi(t)/Phi(t).  erfc covers t > -30; further out Phi underflows in ratio
// form, so the Mills asymptotic expansion takes over.
inline double mills_ratio(double t) {
  if (t > -30.0) {
    return std_normal_pdf(t) / std_normal_cdf(t);
  }
  return -t / detail::mills_tail_series(-t);
}

// log Phi(t), safe for arbitrarily negative t.
inline double log_std_normal_cdf(double t) {
  if (t > -30.0) {
    return std::log(std_normal_cdf(t));
  }
  const double a = -t;
  return -0.5 * t * t - kLogSqrt2Pi - std::log(a) +
         std::log(detail::mills_tail_series(a));
}

namespace detail {

// Rational approximation of Phi^-1 (Acklam), good to ~1e-9; refined below.
inline double std_normal_quantile_guess(double p) {
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
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

// Inverse standard normal CDF for p in (0, 1).
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -HUGE_VAL;
    if (p == 1.0) return HUGE_VAL;
    return NAN;
  }
  double x = detail::std_normal_quantile_guess(p);
  // Two Halley steps; each roughly cubes the error.
  for (int i = 0; i < 2; ++i) {
    const double e = std_normal_cdf(x) - p;
    const double u = e / std_normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

}  // namespace tnbma
