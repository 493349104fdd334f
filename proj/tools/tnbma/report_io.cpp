#include "report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "tnbma/errors.hpp"

namespace tnbma::cli {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open for writing: " + path.string());
  return out;
}

}  // namespace

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string format_level(double level_percent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", level_percent);
  return buf;
}

void write_comparison_csv(const std::filesystem::path& path,
                          std::span<const VerificationReport> reports) {
  auto out = open_out(path);
  out << "source,mean_crps,mae,rmse";
  if (!reports.empty()) {
    for (const IntervalScore& iv : reports.front().intervals) {
      out << ",avg_width_" << format_level(iv.level_percent);
    }
    for (const IntervalScore& iv : reports.front().intervals) {
      out << ",coverage_" << format_level(iv.level_percent);
    }
  }
  out << ",cases\n";
  for (const VerificationReport& r : reports) {
    out << r.source << ',' << format_metric(r.mean_crps) << ',' << format_metric(r.mae)
        << ',' << format_metric(r.rmse);
    for (const IntervalScore& iv : r.intervals) out << ',' << format_metric(iv.average_width);
    for (const IntervalScore& iv : r.intervals) out << ',' << format_metric(iv.coverage_percent);
    out << ',' << r.case_count << '\n';
  }
}

void write_metrics_csv(const std::filesystem::path& path,
                       const VerificationReport& report) {
  auto out = open_out(path);
  out << "metric,value\n";
  out << "mean_crps," << format_metric(report.mean_crps) << '\n';
  out << "mae," << format_metric(report.mae) << '\n';
  out << "rmse," << format_metric(report.rmse) << '\n';
  for (const IntervalScore& iv : report.intervals) {
    out << "avg_width_" << format_level(iv.level_percent) << ','
        << format_metric(iv.average_width) << '\n';
    out << "coverage_" << format_level(iv.level_percent) << ','
        << format_metric(iv.coverage_percent) << '\n';
  }
  if (!std::isnan(report.ks_statistic)) {
    out << "ks_statistic," << format_metric(report.ks_statistic) << '\n';
    out << "ks_p_value," << format_metric(report.ks_p_value) << '\n';
  }
  out << "cases," << report.case_count << '\n';
  out << "renormalized_cases," << report.renormalized_count << '\n';
}

void write_ks_csv(const std::filesystem::path& path,
                  std::span<const VerificationReport> reports) {
  auto out = open_out(path);
  out << "source,ks_statistic,ks_p_value\n";
  for (const VerificationReport& r : reports) {
    if (std::isnan(r.ks_statistic)) continue;
    out << r.source << ',' << format_metric(r.ks_statistic) << ','
        << format_metric(r.ks_p_value) << '\n';
  }
}

void write_pit_histogram_csv(const std::filesystem::path& path,
                             std::span<const long> counts) {
  auto out = open_out(path);
  out << "bin_lo,bin_hi,count\n";
  const double width = 1.0 / static_cast<double>(counts.size());
  for (size_t i = 0; i < counts.size(); ++i) {
    out << format_metric(width * static_cast<double>(i)) << ','
        << format_metric(width * static_cast<double>(i + 1)) << ',' << counts[i] << '\n';
  }
}

void write_rank_histogram_csv(const std::filesystem::path& path,
                              std::span<const long> counts) {
  auto out = open_out(path);
  out << "rank,count\n";
  for (size_t i = 0; i < counts.size(); ++i) {
    out << (i + 1) << ',' << counts[i] << '\n';
  }
}

void write_summary_text(const std::filesystem::path& path,
                        std::span<const VerificationReport> reports,
                        double raw_containment_percent,
                        long raw_skipped,
                        const std::vector<std::pair<std::string, std::string>>& notes) {
  auto out = open_out(path);
  out << "Verification summary\n";
  out << "====================\n\n";
  out << std::left << std::setw(16) << "source" << std::right << std::setw(10) << "meanCRPS"
      << std::setw(10) << "MAE" << std::setw(10) << "RMSE";
  if (!reports.empty()) {
    for (const IntervalScore& iv : reports.front().intervals) {
      out << std::setw(12) << ("width" + format_level(iv.level_percent));
    }
    for (const IntervalScore& iv : reports.front().intervals) {
      out << std::setw(12) << ("cover" + format_level(iv.level_percent));
    }
  }
  out << std::setw(8) << "cases" << '\n';
  for (const VerificationReport& r : reports) {
    out << std::left << std::setw(16) << r.source << std::right << std::setw(10)
        << format_metric(r.mean_crps) << std::setw(10) << format_metric(r.mae)
        << std::setw(10) << format_metric(r.rmse);
    for (const IntervalScore& iv : r.intervals) {
      out << std::setw(12) << format_metric(iv.average_width);
    }
    for (const IntervalScore& iv : r.intervals) {
      out << std::setw(12) << format_metric(iv.coverage_percent);
    }
    out << std::setw(8) << r.case_count << '\n';
  }
  out << "\nPIT uniformity (Kolmogorov-Smirnov)\n";
  for (const VerificationReport& r : reports) {
    if (std::isnan(r.ks_statistic)) continue;
    out << "  " << std::left << std::setw(16) << r.source << " D=" << format_metric(r.ks_statistic)
        << "  p=" << format_metric(r.ks_p_value) << '\n';
  }
  out << "\nRaw ensemble: range contains observation in "
      << format_metric(raw_containment_percent) << "% of cases";
  out << " (" << raw_skipped << " incomplete cases skipped)\n";
  for (const auto& [key, value] : notes) {
    out << key << ": " << value << '\n';
  }
}

}  // namespace tnbma::cli
