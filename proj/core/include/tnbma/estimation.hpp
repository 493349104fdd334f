#pragma once

#include <string>
#include <vector>

#include "tnbma/bma_model.hpp"
#include "tnbma/forecast_case.hpp"
#include "tnbma/group_spec.hpp"

namespace tnbma {

// Pooled training window: complete cases only.
class TrainingSet {
 public:
  TrainingSet(GroupSpec spec, std::vector<ForecastCase> cases,
              int min_cases_per_group_pair = 2);

  const GroupSpec& spec() const { return spec_; }
  const std::vector<ForecastCase>& cases() const { return cases_; }
  int size() const { return static_cast<int>(cases_.size()); }

 private:
  GroupSpec spec_;
  std::vector<ForecastCase> cases_;
};

enum class Variant { naive, mean_corrected, full_ml };

std::string variant_name(Variant v);
Variant parse_variant(std::string_view name);  // throws ParseError

struct EmConfig {
  Variant variant = Variant::full_ml;
  double tol = 1e-7;        // relative log-likelihood change
  int max_iters = 500;
  double min_sigma = 1e-4;  // floor, m/s
};

struct FitDiagnostics {
  int iterations = 0;
  double initial_log_likelihood = 0.0;
  double final_log_likelihood = 0.0;
  bool converged = false;
  bool sigma_floored = false;
  // One entry per degenerate event: regression fallbacks, skipped
  // alpha/beta updates, non-positive sigma update right-hand sides.
  std::vector<std::string> flags;

  std::string to_key_value() const;
};

struct FitResult {
  BmaModel model;
  FitDiagnostics diagnostics;
};

// OLS of observations on the pooled member forecasts of one group.  Falls
// back to (mean(x), 0) when the design is singular; *singular reports it.
std::pair<double, double> regress_location(const TrainingSet& training, int group,
                                           bool* singular = nullptr);

// Weights and sigma by EM with the location coefficients frozen at their
// regression estimates.
FitResult fit_naive(const TrainingSet& training, const EmConfig& config);

// EM with per-case location correction; coefficients recovered afterwards by
// regressing the converged locations on the forecasts.
FitResult fit_mean_corrected(const TrainingSet& training, const EmConfig& config);

// All parameters updated inside the EM loop.
FitResult fit_full_ml(const TrainingSet& training, const EmConfig& config);

// Dispatch on config.variant.
FitResult fit(const TrainingSet& training, const EmConfig& config);

// Sum over cases of log predictive density; -inf when some observation has
// zero density.
double log_likelihood(const BmaModel& model, const TrainingSet& training);

}  // namespace tnbma
