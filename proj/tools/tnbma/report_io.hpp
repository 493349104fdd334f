#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tnbma/verification.hpp"

namespace tnbma::cli {

// CSV/table renderers for the verify outputs.  Everything is written with
// fixed formatting so repeated runs are byte-identical.

std::string format_metric(double v);  // 6 significant digits
std::string format_level(double level_percent);

// One row per source, score and interval columns (the side-by-side
// comparison table).
void write_comparison_csv(const std::filesystem::path& path,
                          std::span<const VerificationReport> reports);

// One row per metric for a single source.
void write_metrics_csv(const std::filesystem::path& path,
                       const VerificationReport& report);

// KS statistic and p-value per source with a PIT sample.
void write_ks_csv(const std::filesystem::path& path,
                  std::span<const VerificationReport> reports);

void write_pit_histogram_csv(const std::filesystem::path& path,
                             std::span<const long> counts);

void write_rank_histogram_csv(const std::filesystem::path& path,
                              std::span<const long> counts);

// Human-readable summary of everything above.
void write_summary_text(const std::filesystem::path& path,
                        std::span<const VerificationReport> reports,
                        double raw_containment_percent,
                        long raw_skipped,
                        const std::vector<std::pair<std::string, std::string>>& notes);

}  // namespace tnbma::cli
