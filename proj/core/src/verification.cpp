#include "tnbma/verification.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tnbma/rng.hpp"
#include "tnbma/scoring.hpp"

namespace tnbma {

double pit(const BmaModel& model, const ForecastCase& fc) {
  if (!fc.observation.has_value()) {
    throw std::invalid_argument("pit: case has no observation");
  }
  return CaseMixture(model, fc).cdf(*fc.observation);
}

std::vector<long> pit_histogram(const PitSample& sample, int bins) {
  std::vector<long> counts(bins, 0);
  for (double v : sample.values) {
    int b = static_cast<int>(v * bins);
    b = std::clamp(b, 0, bins - 1);
    ++counts[b];
  }
  return counts;
}

double pit_discrepancy(const PitSample& sample) {
  std::vector<double> sorted = sample.values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sum = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    sum += std::fabs(sorted[i] - static_cast<double>(i + 1) / (n + 1.0));
  }
  return sum / n;
}

RankHistogram rank_histogram(std::span<const ForecastCase> cases, int ensemble_size,
                             std::uint64_t seed) {
  RankHistogram hist;
  hist.counts.assign(ensemble_size + 1, 0);
  for (const ForecastCase& fc : cases) {
    if (!fc.complete() || static_cast<int>(fc.members.size()) != ensemble_size) {
      ++hist.skipped;
      continue;
    }
    const double obs = *fc.observation;
    int below = 0;
    int tied = 0;
    for (const MemberValue& m : fc.members) {
      if (m.value < obs) ++below;
      else if (m.value == obs) ++tied;
    }
    int rank = below;  // 0-based position
    if (tied > 0) {
      Rng rng(mix_seed(seed, fnv1a(fc.station + "|" + format_date(fc.date))));
      rank += static_cast<int>(rng.below(static_cast<std::uint64_t>(tied) + 1));
    }
    ++hist.counts[rank];
  }
  return hist;
}

double ensemble_containment(std::span<const ForecastCase> cases) {
  long total = 0;
  long inside = 0;
  for (const ForecastCase& fc : cases) {
    if (!fc.complete()) continue;
    ++total;
    const auto values = fc.present_values();
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo <= *fc.observation && *fc.observation <= *hi) ++inside;
  }
  if (total == 0) throw std::invalid_argument("ensemble_containment: no complete cases");
  return 100.0 * static_cast<double>(inside) / static_cast<double>(total);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Complement via the theta-function form, which converges fast for
    // small arguments.
    const double pi2 = 9.869604401089358;  // pi^2
    double sum = 0.0;
    for (int j = 1; j < 200; j += 2) {
      const double term = std::exp(-pi2 * j * j / (8.0 * lambda * lambda));
      sum += term;
      if (term < 1e-12) break;
    }
    return 1.0 - std::sqrt(2.0 * 3.141592653589793) / lambda * sum;
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j < 200; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return 2.0 * sum;
}

KsResult ks_uniform_test(const PitSample& sample) {
  if (sample.values.empty()) {
    throw std::invalid_argument("ks_uniform_test: empty sample");
  }
  std::vector<double> sorted = sample.values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (size_t i = 0; i < sorted.size(); ++i) {
    const double u = sorted[i];
    d = std::max(d, static_cast<double>(i + 1) / n - u);
    d = std::max(d, u - static_cast<double>(i) / n);
  }
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_survival(std::sqrt(n) * d);
  return r;
}

double hyndman_fan_quantile(std::span<const double> sample, double p) {
  if (sample.empty()) throw std::invalid_argument("hyndman_fan_quantile: empty sample");
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("hyndman_fan_quantile: p must lie in (0, 1)");
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p + 1.0;
  const size_t lo = static_cast<size_t>(std::floor(h)) - 1;
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - std::floor(h)) * (sorted[lo + 1] - sorted[lo]);
}

double crps_raw_ensemble(std::span<const double> members, double x) {
  if (members.empty()) throw std::invalid_argument("crps_raw_ensemble: empty ensemble");
  const double n = static_cast<double>(members.size());
  double term1 = 0.0;
  for (double f : members) term1 += std::fabs(f - x);
  term1 /= n;
  double term2 = 0.0;
  for (double a : members) {
    for (double b : members) term2 += std::fabs(a - b);
  }
  term2 /= 2.0 * n * n;
  return term1 - term2;
}

CaseScore score_case(const BmaModel& model, const ForecastCase& fc,
                     std::span<const double> levels_percent) {
  if (!fc.observation.has_value()) {
    throw std::invalid_argument("score_case: case has no observation");
  }
  const CaseMixture mix(model, fc);
  CaseScore s;
  s.observation = *fc.observation;
  s.crps = crps_mixture(mix, s.observation);
  s.median = mix.quantile(0.5);
  s.pit_value = mix.cdf(s.observation);
  s.renormalized = mix.renormalized();
  for (double level : levels_percent) {
    const auto [lo, hi] = mix.central_interval(level / 100.0);
    s.covered.push_back(lo <= s.observation && s.observation <= hi);
    s.widths.push_back(hi - lo);
  }
  return s;
}

CaseScore score_case_raw(const ForecastCase& fc, std::span<const double> levels_percent) {
  if (!fc.complete()) {
    throw std::invalid_argument("score_case_raw: case must be complete");
  }
  const std::vector<double> values = fc.present_values();
  CaseScore s;
  s.observation = *fc.observation;
  s.crps = crps_raw_ensemble(values, s.observation);
  s.median = hyndman_fan_quantile(values, 0.5);
  s.pit_value = NAN;
  for (double level : levels_percent) {
    const double tail = 0.5 * (1.0 - level / 100.0);
    const double lo = hyndman_fan_quantile(values, tail);
    const double hi = hyndman_fan_quantile(values, 1.0 - tail);
    s.covered.push_back(lo <= s.observation && s.observation <= hi);
    s.widths.push_back(hi - lo);
  }
  return s;
}

VerificationReport assemble_report(std::string source,
                                   std::span<const CaseScore> scores,
                                   std::span<const double> levels_percent) {
  if (scores.empty()) {
    throw std::invalid_argument("assemble_report: zero verification cases");
  }
  VerificationReport rep;
  rep.source = std::move(source);
  rep.case_count = static_cast<long>(scores.size());
  const double n = static_cast<double>(scores.size());
  PitSample pits;
  double abs_err = 0.0;
  double sq_err = 0.0;
  std::vector<double> width_sum(levels_percent.size(), 0.0);
  std::vector<long> cover_count(levels_percent.size(), 0);
  for (const CaseScore& s : scores) {
    rep.mean_crps += s.crps;
    const double e = s.median - s.observation;
    abs_err += std::fabs(e);
    sq_err += e * e;
    for (size_t l = 0; l < levels_percent.size(); ++l) {
      width_sum[l] += s.widths[l];
      cover_count[l] += s.covered[l] ? 1 : 0;
    }
    if (!std::isnan(s.pit_value)) pits.values.push_back(s.pit_value);
    rep.renormalized_count += s.renormalized ? 1 : 0;
  }
  rep.mean_crps /= n;
  rep.mae = abs_err / n;
  rep.rmse = std::sqrt(sq_err / n);
  for (size_t l = 0; l < levels_percent.size(); ++l) {
    rep.intervals.push_back({levels_percent[l], 100.0 * cover_count[l] / n,
                             width_sum[l] / n});
  }
  if (!pits.values.empty()) {
    const KsResult ks = ks_uniform_test(pits);
    rep.ks_statistic = ks.statistic;
    rep.ks_p_value = ks.p_value;
  } else {
    rep.ks_statistic = NAN;
    rep.ks_p_value = NAN;
  }
  return rep;
}

}  // namespace tnbma
