#pragma once

#include <span>
#include <utility>

#include "tnbma/bma_model.hpp"

namespace tnbma {

// Parameters of the difference X1 - X2 of two independent truncated normals.
struct DifferenceParams {
  double mu_d;     // mu1 - mu2
  double sigma_d;  // sqrt(sigma1^2 + sigma2^2)
  double rho_d;    // (mu1*sigma2^2 + mu2*sigma1^2) / (sigma1*sigma2*sigma_d)
};

DifferenceParams difference_params(double mu1, double mu2, double sigma1, double sigma2);

// E|Y| for Y ~ N(mu, sigma^2).
double abs_moment(double mu, double sigma);

// E|X - x| for X ~ N0(mu, sigma^2), x >= 0.
double crps_term_s1(double x, double mu, double sigma);

// Correction integral in the closed form of E|X1 - X2|; evaluated by
// adaptive quadrature on [0, |mu_d|/sigma_d + 12] to 1e-9 absolute.
double crps_correction_c(double mu1, double mu2, double sigma1, double sigma2);

// E|X1 - X2| for independent X1 ~ N0(mu1, sigma1^2), X2 ~ N0(mu2, sigma2^2).
double crps_term_s2(double mu1, double mu2, double sigma1, double sigma2);

// CRPS of a truncated-normal mixture at observation x, through the energy
// form sum_k w_k S1 - 1/2 sum_k sum_l w_k w_l S2.
double crps_mixture(const CaseMixture& mix, double x);
double crps_mixture(const BmaModel& model, const ForecastCase& fc, double x);

// Mean absolute error and root mean square error of point forecasts.
std::pair<double, double> mae_rmse(std::span<const double> forecasts,
                                   std::span<const double> observations);

}  // namespace tnbma
