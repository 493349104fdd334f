#pragma once

#include <cmath>
#include <stdexcept>

#include "tnbma/normal.hpp"
#include "tnbma/rng.hpp"

namespace tnbma {

// Normal distribution with location mu and scale sigma, truncated below at
// zero.  The location may be any real; the scale must be positive.  Note the
// location is not the mean: the mean carries a Mills-ratio correction that
// dies off exponentially as mu/sigma grows.
class TruncatedNormal {
 public:
  TruncatedNormal(double mu, double sigma) : mu_(mu), sigma_(sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(mu)) {
      throw std::invalid_argument("TruncatedNormal: requires finite mu and sigma > 0");
    }
  }

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }

  double log_pdf(double x) const {
    if (x < 0.0) return -HUGE_VAL;
    const double t = (x - mu_) / sigma_;
    return -0.5 * t * t - kLogSqrt2Pi - std::log(sigma_) -
           log_std_normal_cdf(mu_ / sigma_);
  }

  double pdf(double x) const {
    if (x < 0.0) return 0.0;
    return std::exp(log_pdf(x));
  }

  // 1 - Phi_c(t)/Phi_c(-m) written through expm1 so both tails are formed
  // directly and no 1-eps cancellation occurs.
  double cdf(double x) const {
    if (x <= 0.0) return 0.0;
    const double t = (x - mu_) / sigma_;
    const double m = mu_ / sigma_;
    return -std::expm1(log_std_normal_cdf(-t) - log_std_normal_cdf(m));
  }

  // Mean (kappa).
  double mean() const {
    const double m = mu_ / sigma_;
    if (m <= -30.0) {
      return sigma_ * corrected_location_gap(-m);
    }
    return mu_ + sigma_ * mills_ratio(m);
  }

  // Variance (rho^2); always strictly between 0 and sigma^2.
  double variance() const {
    const double m = mu_ / sigma_;
    if (m <= -30.0) {
      // 1 - r(m + r) expanded asymptotically; avoids total cancellation.
      const double x = -m;
      const double ix2 = 1.0 / (x * x);
      return sigma_ * sigma_ * ix2 * (1.0 + ix2 * (-6.0 + 50.0 * ix2));
    }
    const double r = mills_ratio(m);
    return sigma_ * sigma_ * (1.0 - m * r - r * r);
  }

  // Inverse CDF for p in (0, 1): mu - sigma * Phi^-1((1-p) * Phi(mu/sigma)),
  // arranged through the upper tail so no cancellation occurs for any mu.
  double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::invalid_argument("TruncatedNormal::quantile: p must lie in (0, 1)");
    }
    const double m = mu_ / sigma_;
    const double q = (1.0 - p) * std_normal_cdf(m);
    if (q >= 1e-300) {
      return mu_ - sigma_ * std_normal_quantile(q);
    }
    // q underflows for extreme negative locations; solve for the standardized
    // point in log space instead.
    const double target = std::log1p(-p) + log_std_normal_cdf(m);
    double t = -m;
    for (int i = 0; i < 40; ++i) {
      const double g = log_std_normal_cdf(-t) - target;
      const double step = g / mills_ratio(-t);
      t += step;
      if (std::fabs(step) < 1e-14 * std::fabs(t)) break;
    }
    return mu_ + sigma_ * t;
  }

  double sample(Rng& rng) const { return quantile(rng.uniform()); }

 private:
  // Asymptotic expansion of m + phi(m)/Phi(m) in x = -m, for m << 0.
  static double corrected_location_gap(double x) {
    const double ix2 = 1.0 / (x * x);
    return (1.0 / x) * (1.0 + ix2 * (-2.0 + ix2 * (10.0 - 74.0 * ix2)));
  }

  double mu_;
  double sigma_;
};

}  // namespace tnbma
