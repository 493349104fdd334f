#include "pipeline.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include "tnbma/errors.hpp"
#include "tnbma/log.hpp"

namespace tnbma::cli {

namespace {

DateResult process_date(const Archive& archive, const WindowPlan::Entry& entry,
                        const PipelineOptions& options) {
  DateResult out;
  out.date = entry.date;
  TrainingSet training(archive.spec(), entry.training);
  const auto day_rows = archive.rows_on(entry.date);

  for (Variant v : options.variants) {
    FitOutcome outcome;
    outcome.variant = v;
    EmConfig cfg = options.em;
    cfg.variant = v;
    std::vector<CaseScore> scores;
    try {
      FitResult r = fit(training, cfg);
      outcome.model = std::move(r.model);
      outcome.diagnostics = std::move(r.diagnostics);
      if (options.score_cases) {
        for (const ForecastCase* fc : day_rows) {
          if (!fc->observation.has_value()) continue;
          if (fc->present_count() == 0) continue;
          scores.push_back(score_case(outcome.model, *fc, options.levels_percent));
        }
      }
    } catch (const NumericError& e) {
      outcome.failed = true;
      outcome.error = e.what();
      log::error("fit failed for ", format_date(entry.date), " (", variant_name(v),
                 "): ", e.what());
    }
    out.fits.push_back(std::move(outcome));
    out.scores.push_back(std::move(scores));
  }

  if (options.score_cases) {
    for (const ForecastCase* fc : day_rows) {
      if (!fc->observation.has_value()) {
        ++out.skipped_no_observation;
        continue;
      }
      if (!fc->ensemble_complete()) {
        ++out.skipped_incomplete_raw;
        continue;
      }
      out.raw_scores.push_back(score_case_raw(*fc, options.levels_percent));
    }
  }
  return out;
}

}  // namespace

PipelineResult run_pipeline(const Archive& archive, const PipelineOptions& options) {
  PipelineResult result;
  result.plan = plan_windows(archive, options.training_days,
                             2 * archive.spec().group_count());
  const size_t n = result.plan.entries.size();
  result.dates.resize(n);

  unsigned jobs = options.jobs > 0 ? static_cast<unsigned>(options.jobs)
                                   : std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  jobs = std::min<unsigned>(jobs, n == 0 ? 1 : static_cast<unsigned>(n));

  std::atomic<size_t> next{0};
  std::atomic<bool> threw{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    size_t i;
    while ((i = next.fetch_add(1)) < n && !threw.load()) {
      try {
        result.dates[i] = process_date(archive, result.plan.entries[i], options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        threw.store(true);
      }
    }
  };
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) workers.emplace_back(work);
    for (std::thread& t : workers) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  for (const DateResult& d : result.dates) {
    for (const FitOutcome& f : d.fits) {
      if (f.failed) result.any_failed = true;
      else if (!f.diagnostics.converged) result.all_converged = false;
    }
  }
  return result;
}

std::vector<CaseScore> collect_scores(const PipelineResult& result, size_t variant_index) {
  std::vector<CaseScore> out;
  for (const DateResult& d : result.dates) {
    const auto& s = d.scores[variant_index];
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::vector<CaseScore> collect_raw_scores(const PipelineResult& result) {
  std::vector<CaseScore> out;
  for (const DateResult& d : result.dates) {
    out.insert(out.end(), d.raw_scores.begin(), d.raw_scores.end());
  }
  return out;
}

}  // namespace tnbma::cli
