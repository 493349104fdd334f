#pragma once

#include <cstdint>
#include <vector>

#include "tnbma/archive.hpp"
#include "tnbma/estimation.hpp"
#include "tnbma/verification.hpp"

namespace tnbma::cli {

struct PipelineOptions {
  std::vector<Variant> variants;
  int training_days = 28;
  std::vector<double> levels_percent = {66.7, 90.0};
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 = hardware concurrency
  bool score_cases = true;
  EmConfig em;
};

struct FitOutcome {
  Variant variant{};
  BmaModel model;
  FitDiagnostics diagnostics;
  bool failed = false;       // non-finite likelihood etc.
  std::string error;
};

struct DateResult {
  Date date{};
  std::vector<FitOutcome> fits;                 // one per variant
  std::vector<std::vector<CaseScore>> scores;   // per variant, per case
  std::vector<CaseScore> raw_scores;            // complete cases only
  long skipped_no_observation = 0;
  long skipped_incomplete_raw = 0;
};

struct PipelineResult {
  WindowPlan plan;
  std::vector<DateResult> dates;  // one per plan entry, in date order
  bool all_converged = true;
  bool any_failed = false;
};

// Rolling fit-then-score over the window plan; per-date work is dispatched
// to a worker pool, results assembled in date order.
PipelineResult run_pipeline(const Archive& archive, const PipelineOptions& options);

// Flattened per-variant scores across all dates, in date order.
std::vector<CaseScore> collect_scores(const PipelineResult& result, size_t variant_index);
std::vector<CaseScore> collect_raw_scores(const PipelineResult& result);

}  // namespace tnbma::cli
