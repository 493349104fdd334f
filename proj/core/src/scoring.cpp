#include "tnbma/scoring.hpp"

#include <cmath>
#include <stdexcept>

#include "tnbma/errors.hpp"
#include "tnbma/key_value.hpp"
#include "tnbma/normal.hpp"
#include "tnbma/quadrature.hpp"

namespace tnbma {

DifferenceParams difference_params(double mu1, double mu2, double sigma1, double sigma2) {
  DifferenceParams d;
  d.mu_d = mu1 - mu2;
  d.sigma_d = std::sqrt(sigma1 * sigma1 + sigma2 * sigma2);
  d.rho_d = (mu1 * sigma2 * sigma2 + mu2 * sigma1 * sigma1) / (sigma1 * sigma2 * d.sigma_d);
  return d;
}

double abs_moment(double mu, double sigma) {
  const double m = mu / sigma;
  return mu * (2.0 * std_normal_cdf(m) - 1.0) + 2.0 * sigma * std_normal_pdf(m);
}

double crps_term_s1(double x, double mu, double sigma) {
  const double m = mu / sigma;
  const double cdf_m = std_normal_cdf(m);
  return (abs_moment(x - mu, sigma) + (x - mu) * (cdf_m - 1.0) -
          sigma * std_normal_pdf(m)) / cdf_m;
}

double crps_correction_c(double mu1, double mu2, double sigma1, double sigma2) {
  const DifferenceParams d = difference_params(mu1, mu2, sigma1, sigma2);
  const double a = d.mu_d / d.sigma_d;
  const double rho = d.rho_d;
  const double b1 = sigma2 / sigma1;
  const double b2 = sigma1 / sigma2;
  const auto integrand = [&](double u) {
    return u * (std_normal_pdf(u - a) * std_normal_cdf(b1 * u - rho) +
                std_normal_pdf(u + a) * std_normal_cdf(b2 * u - rho));
  };
  const double upper = std::fabs(a) + 12.0;
  const QuadratureResult q = integrate_adaptive(integrand, 0.0, upper, 1e-9);
  if (!q.converged) {
    throw NumericError("crps_correction_c: quadrature did not converge (mu1=" +
                       format_real(mu1) + ", mu2=" + format_real(mu2) + ", sigma1=" +
                       format_real(sigma1) + ", sigma2=" + format_real(sigma2) + ")");
  }
  return q.value;
}

double crps_term_s2(double mu1, double mu2, double sigma1, double sigma2) {
  const double sigma_d = std::sqrt(sigma1 * sigma1 + sigma2 * sigma2);
  const double c = crps_correction_c(mu1, mu2, sigma1, sigma2);
  return (abs_moment(mu1 - mu2, sigma_d) - sigma_d * c) /
         (std_normal_cdf(mu1 / sigma1) * std_normal_cdf(mu2 / sigma2));
}

double crps_mixture(const CaseMixture& mix, double x) {
  const auto& comps = mix.components();
  const double sigma = mix.sigma();
  double s1 = 0.0;
  for (const auto& c : comps) {
    s1 += c.weight * crps_term_s1(x, c.mu, sigma);
  }
  double s2 = 0.0;
  for (size_t j = 0; j < comps.size(); ++j) {
    s2 += comps[j].weight * comps[j].weight *
          crps_term_s2(comps[j].mu, comps[j].mu, sigma, sigma);
    for (size_t l = j + 1; l < comps.size(); ++l) {
      s2 += 2.0 * comps[j].weight * comps[l].weight *
            crps_term_s2(comps[j].mu, comps[l].mu, sigma, sigma);
    }
  }
  return s1 - 0.5 * s2;
}

double crps_mixture(const BmaModel& model, const ForecastCase& fc, double x) {
  return crps_mixture(CaseMixture(model, fc), x);
}

std::pair<double, double> mae_rmse(std::span<const double> forecasts,
                                   std::span<const double> observations) {
  if (forecasts.size() != observations.size() || forecasts.empty()) {
    throw std::invalid_argument("mae_rmse: inputs must be nonempty and equal length");
  }
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (size_t i = 0; i < forecasts.size(); ++i) {
    const double e = forecasts[i] - observations[i];
    abs_sum += std::fabs(e);
    sq_sum += e * e;
  }
  const double n = static_cast<double>(forecasts.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

}  // namespace tnbma
