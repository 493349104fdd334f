#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tnbma/bma_model.hpp"
#include "tnbma/forecast_case.hpp"

namespace tnbma {

// Predictive CDF at the verifying observation; uniform iff calibrated.
double pit(const BmaModel& model, const ForecastCase& fc);

struct PitSample {
  std::vector<double> values;  // each in [0, 1]
};

// Histogram bin counts over [0, 1]; the value 1.0 lands in the last bin.
std::vector<long> pit_histogram(const PitSample& sample, int bins = 10);

// Mean absolute gap between the sorted sample and the uniform plotting
// positions i/(n+1); zero for a perfectly uniform grid.
double pit_discrepancy(const PitSample& sample);

struct RankHistogram {
  std::vector<long> counts;  // M+1 bins, rank 1 = observation below all members
  long skipped = 0;          // incomplete cases
};

// Rank of the observation among the ensemble members; ties are resolved
// uniformly at random from a stream seeded per case.
RankHistogram rank_histogram(std::span<const ForecastCase> cases, int ensemble_size,
                             std::uint64_t seed);

// Percentage of complete cases whose observation falls inside the ensemble
// range; the nominal value for an M-member ensemble is (M-1)/(M+1).
double ensemble_containment(std::span<const ForecastCase> cases);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// One-sample Kolmogorov-Smirnov test against Uniform(0,1); p-value from the
// asymptotic Kolmogorov distribution at sqrt(n) * D_n.
KsResult ks_uniform_test(const PitSample& sample);

// Survival function of the asymptotic Kolmogorov distribution.
double kolmogorov_survival(double lambda);

// Sample quantile, Hyndman-Fan definition 7: h = (n-1)p + 1 with linear
// interpolation between the bracketing order statistics.
double hyndman_fan_quantile(std::span<const double> sample, double p);

// CRPS of the empirical ensemble CDF via the energy form
// mean|f_i - x| - 1/2 mean|f_i - f_j|.
double crps_raw_ensemble(std::span<const double> members, double x);

struct IntervalScore {
  double level_percent = 0.0;
  double coverage_percent = 0.0;
  double average_width = 0.0;
};

// Central prediction intervals from the BMA predictive distribution.
std::vector<IntervalScore> interval_scores(const BmaModel& model,
                                           std::span<const ForecastCase> cases,
                                           std::span<const double> levels_percent);

// Central intervals from Hyndman-Fan quantiles of the raw ensemble.
std::vector<IntervalScore> interval_scores(std::span<const ForecastCase> cases,
                                           std::span<const double> levels_percent);

struct VerificationReport {
  std::string source;  // "naive", "mean-corrected", "full-ml", "raw-ensemble"
  double mean_crps = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
  std::vector<IntervalScore> intervals;
  double ks_statistic = 0.0;   // NaN when no PIT sample applies
  double ks_p_value = 0.0;
  long case_count = 0;
  long renormalized_count = 0;  // cases scored with renormalized weights
};

// Per-case raw ingredients for a report.
struct CaseScore {
  double crps = 0.0;
  double median = 0.0;
  double observation = 0.0;
  std::vector<bool> covered;   // per level
  std::vector<double> widths;  // per level
  double pit_value = 0.0;      // NaN for the raw-ensemble path
  bool renormalized = false;
};

CaseScore score_case(const BmaModel& model, const ForecastCase& fc,
                     std::span<const double> levels_percent);
CaseScore score_case_raw(const ForecastCase& fc, std::span<const double> levels_percent);

VerificationReport assemble_report(std::string source,
                                   std::span<const CaseScore> scores,
                                   std::span<const double> levels_percent);

}  // namespace tnbma
