#include "tnbma/estimation.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "tnbma/errors.hpp"
#include "tnbma/key_value.hpp"
#include "tnbma/log.hpp"
#include "tnbma/normal.hpp"

namespace tnbma {

TrainingSet::TrainingSet(GroupSpec spec, std::vector<ForecastCase> cases,
                         int min_cases_per_group_pair)
    : spec_(std::move(spec)), cases_(std::move(cases)) {
  const int min_cases = min_cases_per_group_pair * spec_.group_count();
  if (static_cast<int>(cases_.size()) < min_cases) {
    throw std::invalid_argument("TrainingSet: needs at least " +
                                std::to_string(min_cases) + " complete cases, got " +
                                std::to_string(cases_.size()));
  }
  for (const ForecastCase& fc : cases_) {
    if (static_cast<int>(fc.members.size()) != spec_.total_members()) {
      throw std::invalid_argument("TrainingSet: case layout mismatch at " + fc.station +
                                  " " + format_date(fc.date));
    }
    if (!fc.complete()) {
      throw std::invalid_argument("TrainingSet: incomplete case at " + fc.station + " " +
                                  format_date(fc.date));
    }
  }
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::naive: return "naive";
    case Variant::mean_corrected: return "mean-corrected";
    case Variant::full_ml: return "full-ml";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "naive") return Variant::naive;
  if (name == "mean-corrected") return Variant::mean_corrected;
  if (name == "full-ml") return Variant::full_ml;
  throw ParseError("unknown variant '" + std::string(name) +
                   "' (expected naive, mean-corrected or full-ml)");
}

std::string FitDiagnostics::to_key_value() const {
  KeyValueDoc doc;
  doc.set_int("iterations", iterations);
  doc.set("converged", converged ? "true" : "false");
  doc.set_real("initial-log-likelihood", initial_log_likelihood);
  doc.set_real("final-log-likelihood", final_log_likelihood);
  doc.set("sigma-floored", sigma_floored ? "true" : "false");
  std::string joined;
  for (const std::string& f : flags) {
    if (!joined.empty()) joined += ';';
    joined += f;
  }
  doc.set("degenerate-updates", joined);
  return doc.to_text();
}

namespace {

// Flattened training data plus the EM iteration state.
struct EmState {
  const TrainingSet* training = nullptr;
  int n_cases = 0;
  int n_members = 0;
  int n_groups = 0;
  std::vector<int> group_of;   // flat member -> group
  std::vector<int> group_size;
  std::vector<double> fc;      // n_cases * n_members forecasts
  std::vector<double> obs;     // n_cases

  std::vector<double> weight;  // per-member weight, by group
  std::vector<double> alpha;
  std::vector<double> beta;
  double sigma = 1.0;
  std::vector<double> mu;      // current locations, n_cases * n_members
  std::vector<double> mu0;     // anchors (regression means)
  std::vector<double> resp;    // member responsibilities, n_cases * n_members

  double at(int i, int j, const std::vector<double>& v) const {
    return v[static_cast<size_t>(i) * n_members + j];
  }
};

EmState flatten(const TrainingSet& training) {
  EmState s;
  s.training = &training;
  const GroupSpec& spec = training.spec();
  s.n_cases = training.size();
  s.n_members = spec.total_members();
  s.n_groups = spec.group_count();
  s.group_of.resize(s.n_members);
  for (int k = 0; k < s.n_groups; ++k) {
    s.group_size.push_back(spec.groups()[k].member_count);
    for (int l = 0; l < spec.groups()[k].member_count; ++l) {
      s.group_of[spec.flat_index(k, l)] = k;
    }
  }
  s.fc.resize(static_cast<size_t>(s.n_cases) * s.n_members);
  s.obs.resize(s.n_cases);
  for (int i = 0; i < s.n_cases; ++i) {
    const ForecastCase& c = training.cases()[i];
    s.obs[i] = *c.observation;
    for (int j = 0; j < s.n_members; ++j) {
      s.fc[static_cast<size_t>(i) * s.n_members + j] = c.members[j].value;
    }
  }
  return s;
}

double truncated_log_density(double x, double mu, double sigma) {
  const double t = (x - mu) / sigma;
  return -0.5 * t * t - kLogSqrt2Pi - std::log(sigma) - log_std_normal_cdf(mu / sigma);
}

// E step: member responsibilities from the current parameters; returns the
// observed-data log-likelihood at those parameters.
double e_step(EmState& s) {
  double ll = 0.0;
  std::vector<double> logs(s.n_members);
  for (int i = 0; i < s.n_cases; ++i) {
    const size_t row = static_cast<size_t>(i) * s.n_members;
    double max_log = -HUGE_VAL;
    for (int j = 0; j < s.n_members; ++j) {
      const double lw = std::log(s.weight[s.group_of[j]]);
      logs[j] = lw + truncated_log_density(s.obs[i], s.mu[row + j], s.sigma);
      max_log = std::max(max_log, logs[j]);
    }
    if (!std::isfinite(max_log)) {
      const ForecastCase& c = s.training->cases()[i];
      throw NumericError("non-finite likelihood at case " + c.station + " " +
                         format_date(c.date));
    }
    double denom = 0.0;
    for (int j = 0; j < s.n_members; ++j) {
      const double e = std::exp(logs[j] - max_log);
      s.resp[row + j] = e;
      denom += e;
    }
    for (int j = 0; j < s.n_members; ++j) s.resp[row + j] /= denom;
    ll += max_log + std::log(denom);
  }
  return ll;
}

// First part of the M step: per-member weights from group responsibility
// totals.  Sum_k M_k w_k stays 1 because responsibilities sum to 1 per case.
void update_weights(EmState& s) {
  std::vector<double> total(s.n_groups, 0.0);
  for (int i = 0; i < s.n_cases; ++i) {
    const size_t row = static_cast<size_t>(i) * s.n_members;
    for (int j = 0; j < s.n_members; ++j) total[s.group_of[j]] += s.resp[row + j];
  }
  for (int k = 0; k < s.n_groups; ++k) {
    s.weight[k] = total[k] / (static_cast<double>(s.n_cases) * s.group_size[k]);
  }
}

// Scale update: responsibility-weighted squared residuals plus the
// truncation correction sigma * mu * phi/Phi, averaged over cases.
void update_sigma(EmState& s, double min_sigma, FitDiagnostics& diag) {
  double sum = 0.0;
  double correction = 0.0;
  for (int i = 0; i < s.n_cases; ++i) {
    const size_t row = static_cast<size_t>(i) * s.n_members;
    for (int j = 0; j < s.n_members; ++j) {
      const double mu = s.mu[row + j];
      const double r = s.obs[i] - mu;
      sum += s.resp[row + j] * r * r;
      correction += s.resp[row + j] * mu * mills_ratio(mu / s.sigma);
    }
  }
  correction *= s.sigma;
#ifndef NDEBUG
  if (correction < 0.0) {
    log::debug("sigma update: negative correction term ", correction);
  }
#endif
  const double rhs = (sum + correction) / s.n_cases;
  if (!(rhs > min_sigma * min_sigma)) {
    if (rhs <= 0.0 && diag.flags.empty()) diag.flags.push_back("sigma-update-nonpositive");
    diag.sigma_floored = true;
    s.sigma = min_sigma;
    return;
  }
  s.sigma = std::sqrt(rhs);
}

struct OlsResult {
  double intercept = 0.0;
  double slope = 0.0;
  bool singular = false;
};

// OLS of y on x over explicit point pairs.
OlsResult ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double xbar = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  OlsResult r;
  if (sxx <= 1e-14 * n * (1.0 + xbar * xbar)) {
    r.intercept = ybar;
    r.slope = 0.0;
    r.singular = true;
    return r;
  }
  r.slope = sxy / sxx;
  r.intercept = ybar - r.slope * xbar;
  return r;
}

OlsResult regress_group(const EmState& s, int group, const std::vector<double>& target) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < s.n_cases; ++i) {
    const size_t row = static_cast<size_t>(i) * s.n_members;
    for (int j = 0; j < s.n_members; ++j) {
      if (s.group_of[j] != group) continue;
      xs.push_back(s.fc[row + j]);
      ys.push_back(target[row + j]);
    }
  }
  return ols(xs, ys);
}

// Shared initialization: regression coefficients, uniform member weights,
// pooled residual standard deviation, anchor locations.
void initialize(EmState& s, const EmConfig& config, FitDiagnostics& diag) {
  const GroupSpec& spec = s.training->spec();
  s.weight.assign(s.n_groups, 1.0 / s.n_members);
  s.alpha.resize(s.n_groups);
  s.beta.resize(s.n_groups);
  std::vector<double> obs_target(static_cast<size_t>(s.n_cases) * s.n_members);
  for (int i = 0; i < s.n_cases; ++i) {
    for (int j = 0; j < s.n_members; ++j) {
      obs_target[static_cast<size_t>(i) * s.n_members + j] = s.obs[i];
    }
  }
  for (int k = 0; k < s.n_groups; ++k) {
    const OlsResult r = regress_group(s, k, obs_target);
    if (r.singular) diag.flags.push_back("regression-fallback:" + spec.groups()[k].id);
    s.alpha[k] = r.intercept;
    s.beta[k] = r.slope;
  }
  s.mu0.resize(static_cast<size_t>(s.n_cases) * s.n_members);
  double residual_sq = 0.0;
  for (int i = 0; i < s.n_cases; ++i) {
    const size_t row = static_cast<size_t>(i) * s.n_members;
    for (int j = 0; j < s.n_members; ++j) {
      const int k = s.group_of[j];
      s.mu0[row + j] = s.alpha[k] + s.beta[k] * s.fc[row + j];
      const double e = s.obs[i] - s.mu0[row + j];
      residual_sq += e * e;
    }
  }
  s.sigma = std::sqrt(residual_sq / (static_cast<double>(s.n_cases) * s.n_members));
  s.sigma = std::max(s.sigma, config.min_sigma);
  s.mu = s.mu0;
  s.resp.assign(static_cast<size_t>(s.n_cases) * s.n_members, 0.0);
}

BmaModel finish(const EmState& s) {
  std::vector<BmaModel::GroupParams> params(s.n_groups);
  double total = 0.0;
  for (int k = 0; k < s.n_groups; ++k) total += s.weight[k] * s.group_size[k];
  for (int k = 0; k < s.n_groups; ++k) {
    params[k].weight = s.weight[k] / total;
    params[k].alpha = s.alpha[k];
    params[k].beta = s.beta[k];
  }
  return BmaModel(s.training->spec(), std::move(params), s.sigma);
}

using MStep = void (*)(EmState&, const EmConfig&, FitDiagnostics&);

void run_em_loop(EmState& s, const EmConfig& config, MStep m_step, FitDiagnostics& diag) {
  double prev_ll = -HUGE_VAL;
  for (int iter = 0; iter <= config.max_iters; ++iter) {
    const double ll = e_step(s);
    if (iter == 0) {
      diag.initial_log_likelihood = ll;
    } else if (std::fabs(ll - prev_ll) < config.tol * std::fabs(ll)) {
      diag.converged = true;
      break;
    }
    if (iter == config.max_iters) break;
    prev_ll = ll;
    m_step(s, config, diag);
    ++diag.iterations;
  }
}

void m_step_naive(EmState& s, const EmConfig& config, FitDiagnostics& diag) {
  update_weights(s);
  update_sigma(s, config.min_sigma, diag);
}

void m_step_mean_corrected(EmState& s, const EmConfig& config, FitDiagnostics& diag) {
  update_weights(s);
  const double sigma_old = s.sigma;
  for (size_t idx = 0; idx < s.mu.size(); ++idx) {
    s.mu[idx] = s.mu0[idx] - sigma_old * mills_ratio(s.mu[idx] / sigma_old);
  }
  update_sigma(s, config.min_sigma, diag);
}

void m_step_full_ml(EmState& s, const EmConfig& config, FitDiagnostics& diag) {
  update_weights(s);
  const GroupSpec& spec = s.training->spec();
  const double sigma_old = s.sigma;
  // Location coefficients, coordinate-wise: alpha with the previous beta,
  // then beta with the fresh alpha; Mills terms at the previous locations.
  for (int k = 0; k < s.n_groups; ++k) {
    double za = 0.0, num_a = 0.0;
    for (int i = 0; i < s.n_cases; ++i) {
      const size_t row = static_cast<size_t>(i) * s.n_members;
      for (int j = 0; j < s.n_members; ++j) {
        if (s.group_of[j] != k) continue;
        const double z = s.resp[row + j];
        const double mills = mills_ratio(s.mu[row + j] / sigma_old);
        za += z;
        num_a += z * ((s.obs[i] - s.beta[k] * s.fc[row + j]) - sigma_old * mills);
      }
    }
    if (za > 0.0) {
      s.alpha[k] = num_a / za;
    } else {
      diag.flags.push_back("alpha-update-degenerate:" + spec.groups()[k].id);
    }
    double zf2 = 0.0, num_b = 0.0;
    for (int i = 0; i < s.n_cases; ++i) {
      const size_t row = static_cast<size_t>(i) * s.n_members;
      for (int j = 0; j < s.n_members; ++j) {
        if (s.group_of[j] != k) continue;
        const double z = s.resp[row + j];
        const double f = s.fc[row + j];
        const double mills = mills_ratio(s.mu[row + j] / sigma_old);
        zf2 += z * f * f;
        num_b += z * f * ((s.obs[i] - s.alpha[k]) - sigma_old * mills);
      }
    }
    if (zf2 > 0.0) {
      s.beta[k] = num_b / zf2;
    } else {
      diag.flags.push_back("beta-update-degenerate:" + spec.groups()[k].id);
    }
  }
  // Mean correction at the refreshed coefficients.  Anchoring at the
  // current alpha + beta * f (rather than the initial regression means)
  // makes the scheme collapse to the exact Gaussian-mixture EM when the
  // truncation effect vanishes.
  for (int i = 0; i < s.n_cases; ++i) {
    const size_t row = static_cast<size_t>(i) * s.n_members;
    for (int j = 0; j < s.n_members; ++j) {
      const int k = s.group_of[j];
      const double loc = s.alpha[k] + s.beta[k] * s.fc[row + j];
      s.mu[row + j] = loc - sigma_old * mills_ratio(loc / sigma_old);
    }
  }
  update_sigma(s, config.min_sigma, diag);
}

}  // namespace

std::pair<double, double> regress_location(const TrainingSet& training, int group,
                                           bool* singular) {
  if (group < 0 || group >= training.spec().group_count()) {
    throw std::invalid_argument("regress_location: group index out of range");
  }
  EmState s = flatten(training);
  std::vector<double> obs_target(static_cast<size_t>(s.n_cases) * s.n_members);
  for (int i = 0; i < s.n_cases; ++i) {
    for (int j = 0; j < s.n_members; ++j) {
      obs_target[static_cast<size_t>(i) * s.n_members + j] = s.obs[i];
    }
  }
  const OlsResult r = regress_group(s, group, obs_target);
  if (singular != nullptr) *singular = r.singular;
  return {r.intercept, r.slope};
}

FitResult fit_naive(const TrainingSet& training, const EmConfig& config) {
  FitDiagnostics diag;
  EmState s = flatten(training);
  initialize(s, config, diag);
  run_em_loop(s, config, m_step_naive, diag);
  FitResult result{finish(s), std::move(diag)};
  result.diagnostics.final_log_likelihood = log_likelihood(result.model, training);
  return result;
}

FitResult fit_mean_corrected(const TrainingSet& training, const EmConfig& config) {
  FitDiagnostics diag;
  EmState s = flatten(training);
  initialize(s, config, diag);
  run_em_loop(s, config, m_step_mean_corrected, diag);
  // Coefficients from the converged corrected locations.
  for (int k = 0; k < s.n_groups; ++k) {
    const OlsResult r = regress_group(s, k, s.mu);
    if (r.singular) {
      diag.flags.push_back("final-regression-fallback:" + training.spec().groups()[k].id);
    }
    s.alpha[k] = r.intercept;
    s.beta[k] = r.slope;
  }
  FitResult result{finish(s), std::move(diag)};
  result.diagnostics.final_log_likelihood = log_likelihood(result.model, training);
  return result;
}

FitResult fit_full_ml(const TrainingSet& training, const EmConfig& config) {
  FitDiagnostics diag;
  EmState s = flatten(training);
  initialize(s, config, diag);
  run_em_loop(s, config, m_step_full_ml, diag);
  FitResult result{finish(s), std::move(diag)};
  result.diagnostics.final_log_likelihood = log_likelihood(result.model, training);
  return result;
}

FitResult fit(const TrainingSet& training, const EmConfig& config) {
  switch (config.variant) {
    case Variant::naive: return fit_naive(training, config);
    case Variant::mean_corrected: return fit_mean_corrected(training, config);
    case Variant::full_ml: return fit_full_ml(training, config);
  }
  throw std::invalid_argument("fit: unknown variant");
}

double log_likelihood(const BmaModel& model, const TrainingSet& training) {
  if (!(model.spec() == training.spec())) {
    throw std::invalid_argument("log_likelihood: model and training specs differ");
  }
  const GroupSpec& spec = model.spec();
  double ll = 0.0;
  std::vector<double> logs(spec.total_members());
  for (const ForecastCase& c : training.cases()) {
    double max_log = -HUGE_VAL;
    int idx = 0;
    for (int k = 0; k < spec.group_count(); ++k) {
      const double lw = std::log(model.group(k).weight);
      for (int l = 0; l < spec.groups()[k].member_count; ++l, ++idx) {
        const double mu = model.location(k, c.members[spec.flat_index(k, l)].value);
        logs[idx] = lw + truncated_log_density(*c.observation, mu, model.sigma());
        max_log = std::max(max_log, logs[idx]);
      }
    }
    if (!std::isfinite(max_log)) return -HUGE_VAL;
    double denom = 0.0;
    for (double lg : logs) denom += std::exp(lg - max_log);
    ll += max_log + std::log(denom);
  }
  return ll;
}

}  // namespace tnbma
