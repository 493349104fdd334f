#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "test_data.hpp"
#include "test_oracles.hpp"
#include "tnbma/errors.hpp"
#include "tnbma/estimation.hpp"
#include "tnbma/normal.hpp"
#include "tnbma/synthetic.hpp"
#include "tnbma/truncated_normal.hpp"

using namespace tnbma;
using testdata::make_case;
using testdata::make_model;
using testdata::training_from_archive;

namespace {

TrainingSet toy_training() {
  // Two groups of one member each; hand-traceable.
  const GroupSpec spec({{"a", 1}, {"b", 1}});
  std::vector<ForecastCase> cases;
  cases.push_back(make_case("S1", "2020-01-01", {1.0, 3.0}, 2.0));
  cases.push_back(make_case("S1", "2020-01-02", {2.0, 2.0}, 1.0));
  return TrainingSet(spec, cases, 1);
}

TrainingSet toy_two_by_two() {
  // Two cases, two groups of two members each.  The group regressions have
  // simple closed forms: (a, b) = (2.5, -0.5) and (0.5, 0.4).
  const GroupSpec spec({{"a", 2}, {"b", 2}});
  std::vector<ForecastCase> cases;
  cases.push_back(make_case("S1", "2020-01-01", {1.0, 2.0, 3.0, 4.0}, 2.0));
  cases.push_back(make_case("S1", "2020-01-02", {2.0, 3.0, 1.0, 2.0}, 1.0));
  return TrainingSet(spec, cases, 1);
}

SynthConfig recovery_config(std::uint64_t seed) {
  SynthConfig c;
  const GroupSpec spec = GroupSpec::two_group();
  std::vector<BmaModel::GroupParams> params;
  params.push_back({0.6, 0.5, 0.9});    // control
  params.push_back({0.04, 0.2, 1.0});   // perturbed, per member
  c.truth = BmaModel(spec, std::move(params), 1.0);
  c.station_count = 10;
  c.day_count = 500;  // 5000 cases
  c.member_noise = 2.0;
  c.signal_location = 6.0;
  c.signal_scale = 2.5;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("training set validation") {
  const GroupSpec spec({{"a", 1}, {"b", 1}});
  std::vector<ForecastCase> cases;
  cases.push_back(make_case("S1", "2020-01-01", {1.0, 3.0}, 2.0));
  // Default minimum is 2 cases per coefficient pair.
  CHECK_THROWS_AS(TrainingSet(spec, cases), std::invalid_argument);
  auto incomplete = make_case("S1", "2020-01-02", {1.0, 2.0}, 2.0);
  incomplete.members[0].present = false;
  CHECK_THROWS_AS(TrainingSet(spec, {incomplete}, 1), std::invalid_argument);
}

TEST_CASE("location regression") {
  const GroupSpec spec({{"g", 1}});
  SUBCASE("perfect fit") {
    std::vector<ForecastCase> cases;
    for (int i = 1; i <= 4; ++i) {
      cases.push_back(make_case("S1", "2020-01-0" + std::to_string(i),
                                {static_cast<double>(i)}, static_cast<double>(i)));
    }
    const auto [a, b] = regress_location(TrainingSet(spec, cases), 0);
    CHECK(a == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(b == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("constant observations") {
    std::vector<ForecastCase> cases;
    for (int i = 1; i <= 4; ++i) {
      cases.push_back(
          make_case("S1", "2020-01-0" + std::to_string(i), {static_cast<double>(i)}, 2.5));
    }
    const auto [a, b] = regress_location(TrainingSet(spec, cases), 0);
    CHECK(a == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(b == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("three points, closed-form") {
    std::vector<ForecastCase> cases;
    cases.push_back(make_case("S1", "2020-01-01", {1.0}, 2.0));
    cases.push_back(make_case("S1", "2020-01-02", {2.0}, 3.0));
    cases.push_back(make_case("S1", "2020-01-03", {3.0}, 5.0));
    const auto [a, b] = regress_location(TrainingSet(spec, cases, 1), 0);
    CHECK(a == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(b == doctest::Approx(1.5).epsilon(1e-12));
  }
  SUBCASE("singular design falls back") {
    std::vector<ForecastCase> cases;
    for (int i = 1; i <= 4; ++i) {
      cases.push_back(make_case("S1", "2020-01-0" + std::to_string(i), {3.0},
                                static_cast<double>(i)));
    }
    bool singular = false;
    const auto [a, b] = regress_location(TrainingSet(spec, cases), 0, &singular);
    CHECK(singular);
    CHECK(a == doctest::Approx(2.5));
    CHECK(b == 0.0);
  }
}

TEST_CASE("one naive EM pass on the toy set matches the hand evaluation") {
  EmConfig cfg;
  cfg.variant = Variant::naive;
  cfg.max_iters = 1;
  const FitResult r = fit_naive(toy_two_by_two(), cfg);
  // Regression coefficients (2.5, -0.5) and (0.5, 0.4) put the component
  // locations at (2.0, 1.5, 1.7, 2.1) and (1.5, 1.0, 0.9, 1.3); with uniform
  // member weights 1/4 and pooled residual scale sqrt(0.0875) the
  // member responsibilities evaluate to
  //   case 1: 0.35944875210904007 0.086142283041293094
  //           0.21492430664098953 0.33948465820867731
  //   case 2: 0.08609666326181891 0.35938835365231977
  //           0.33970330755659404 0.21481167552926728
  CHECK(r.model.group(0).alpha == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(r.model.group(0).beta == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(r.model.group(1).alpha == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.model.group(1).beta == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(r.model.group(0).weight == doctest::Approx(0.22276901301611796).epsilon(1e-12));
  CHECK(r.model.group(1).weight == doctest::Approx(0.27723098698388204).epsilon(1e-12));
  CHECK(r.model.sigma() == doctest::Approx(0.2109773079465415).epsilon(1e-12));
  CHECK(r.diagnostics.iterations == 1);
  CHECK(r.diagnostics.initial_log_likelihood ==
        doctest::Approx(-0.12745224590874373).epsilon(1e-12));
}

TEST_CASE("toy log-likelihood matches hand-summed component densities") {
  const auto model = make_model(GroupSpec({{"a", 1}, {"b", 1}}), {0.5, 0.5}, {0.2, 0.0},
                                {0.9, 0.8}, 1.0);
  CHECK(log_likelihood(model, toy_training()) ==
        doctest::Approx(-2.2837667623722611).epsilon(1e-12));
}

TEST_CASE("log-likelihood reductions") {
  const GroupSpec spec({{"g", 1}});
  const auto model = make_model(spec, {1.0}, {0.1}, {1.0}, 1.2);
  std::vector<ForecastCase> one;
  one.push_back(make_case("S1", "2020-01-01", {2.0}, 3.0));
  const TrainingSet single(spec, one, 1);
  CHECK(log_likelihood(model, single) ==
        doctest::Approx(TruncatedNormal(0.1 + 2.0, 1.2).log_pdf(3.0)).epsilon(1e-13));

  std::vector<ForecastCase> doubled = one;
  auto copy = one.front();
  copy.date = parse_date("2020-01-02");
  doubled.push_back(copy);
  CHECK(log_likelihood(model, TrainingSet(spec, doubled, 1)) ==
        doctest::Approx(2.0 * log_likelihood(model, single)).epsilon(1e-13));
}

TEST_CASE("two identical groups fit symmetric weights") {
  oracle::NormalStream stream(311);
  const GroupSpec spec({{"a", 1}, {"b", 1}});
  std::vector<ForecastCase> cases;
  for (int i = 0; i < 300; ++i) {
    const double f = 4.0 + 2.0 * std::fabs(stream.next());
    const double x = std::fabs(f + stream.next());
    cases.push_back(make_case("S" + std::to_string(i % 5),
                              format_date(add_days(parse_date("2020-01-01"), i / 5)),
                              {f, f}, x));
  }
  EmConfig cfg;
  const FitResult r = fit_naive(TrainingSet(spec, cases), cfg);
  CHECK(r.model.group(0).weight == doctest::Approx(r.model.group(1).weight).epsilon(1e-6));
  CHECK(r.diagnostics.converged);
}

TEST_CASE("single-component data concentrates the weights") {
  SynthConfig c = recovery_config(17);
  std::vector<BmaModel::GroupParams> params;
  params.push_back({1.0, 0.5, 0.9});  // all mass on the control member
  params.push_back({0.0, 0.2, 1.0});
  c.truth = BmaModel(GroupSpec::two_group(), std::move(params), 1.0);
  c.day_count = 200;  // N = 2000
  const Archive archive = generate_synthetic(c);
  EmConfig cfg;
  cfg.variant = Variant::naive;
  const FitResult r = fit_naive(training_from_archive(archive), cfg);
  CHECK(r.model.group(0).weight == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("mean-corrected location update fixed point") {
  // With anchor 2 and unit scale the corrected location settles where the
  // component mean equals the anchor.
  double m = 0.0;
  for (int i = 0; i < 200; ++i) m = 2.0 - mills_ratio(m);
  CHECK(m == doctest::Approx(1.9372571488700489).epsilon(1e-12));
  CHECK(TruncatedNormal(m, 1.0).mean() == doctest::Approx(2.0).epsilon(1e-12));

  // With anchor 0 there is no fixed point (the truncated-normal mean is
  // strictly positive for every location), so the iteration drifts down.
  double m0 = 0.0;
  double prev = 1.0;
  for (int i = 0; i < 200; ++i) {
    prev = m0;
    m0 = 0.0 - mills_ratio(m0);
    CHECK(m0 < prev);
  }
  CHECK(m0 < -15.0);
}

TEST_CASE("mean-corrected fit reduces to the regression in the large-location regime") {
  oracle::NormalStream stream(555);
  const GroupSpec spec({{"g", 2}});
  std::vector<ForecastCase> cases;
  for (int i = 0; i < 400; ++i) {
    const double f1 = 20.0 + 2.0 * stream.next();
    const double f2 = 20.0 + 2.0 * stream.next();
    const double x = 0.5 + 0.9 * f1 + stream.next();
    cases.push_back(make_case("S" + std::to_string(i % 4),
                              format_date(add_days(parse_date("2020-01-01"), i / 4)),
                              {f1, f2}, x));
  }
  const TrainingSet training(spec, cases);
  const auto [a, b] = regress_location(training, 0);
  EmConfig cfg;
  const FitResult r = fit_mean_corrected(training, cfg);
  CHECK(r.model.group(0).alpha == doctest::Approx(a).epsilon(1e-6));
  CHECK(r.model.group(0).beta == doctest::Approx(b).epsilon(1e-6));
  CHECK(r.diagnostics.converged);
}

TEST_CASE("symmetric two-group data gives equal group parameters") {
  oracle::NormalStream stream(901);
  const GroupSpec spec({{"a", 1}, {"b", 1}});
  std::vector<ForecastCase> cases;
  for (int i = 0; i < 400; ++i) {
    const double f = 5.0 + 1.5 * std::fabs(stream.next());
    const double x = std::fabs(0.3 + f + 0.8 * stream.next());
    cases.push_back(make_case("S" + std::to_string(i % 4),
                              format_date(add_days(parse_date("2020-01-01"), i / 4)),
                              {f, f}, x));
  }
  EmConfig cfg;
  const FitResult r = fit_mean_corrected(TrainingSet(spec, cases), cfg);
  CHECK(r.model.group(0).alpha == doctest::Approx(r.model.group(1).alpha).epsilon(1e-5));
  CHECK(r.model.group(0).beta == doctest::Approx(r.model.group(1).beta).epsilon(1e-5));
  CHECK(r.model.group(0).weight == doctest::Approx(r.model.group(1).weight).epsilon(1e-5));
}

TEST_CASE("full ML recovers OLS in the truncation-free single-component case") {
  oracle::NormalStream stream(246);
  const GroupSpec spec({{"g", 1}});
  std::vector<ForecastCase> cases;
  for (int i = 0; i < 2000; ++i) {
    const double f = 12.0 + 2.0 * stream.next();
    const double x = 1.0 + 0.8 * f + 0.9 * stream.next();
    cases.push_back(make_case("S" + std::to_string(i % 10),
                              format_date(add_days(parse_date("2019-01-01"), i / 10)),
                              {f}, x));
  }
  const TrainingSet training(spec, cases);
  const auto [a, b] = regress_location(training, 0);
  double rss = 0.0;
  for (const auto& fc : training.cases()) {
    const double e = *fc.observation - (a + b * fc.members[0].value);
    rss += e * e;
  }
  const double residual_sd = std::sqrt(rss / training.size());
  EmConfig cfg;
  const FitResult r = fit_full_ml(training, cfg);
  CHECK(r.model.group(0).alpha == doctest::Approx(a).epsilon(1e-4));
  CHECK(r.model.group(0).beta == doctest::Approx(b).epsilon(1e-4));
  CHECK(r.model.sigma() == doctest::Approx(residual_sd).epsilon(0.01));
}

TEST_CASE("full ML two-group parameter recovery") {
  const Archive archive = generate_synthetic(recovery_config(3));
  const TrainingSet training = training_from_archive(archive);
  EmConfig cfg;
  const FitResult r = fit_full_ml(training, cfg);
  const BmaModel& truth = recovery_config(3).truth;
  CHECK(r.model.sigma() == doctest::Approx(truth.sigma()).epsilon(0.05));
  CHECK(std::fabs(r.model.group(0).weight - truth.group(0).weight) < 0.05);
  CHECK(std::fabs(r.model.group(1).weight - truth.group(1).weight) < 0.05);
  CHECK(std::fabs(r.model.group(0).alpha - truth.group(0).alpha) <
        0.1 * std::max(1.0, std::fabs(truth.group(0).alpha)));
  CHECK(std::fabs(r.model.group(0).beta - truth.group(0).beta) < 0.1 * truth.group(0).beta);
}

TEST_CASE("permuting case order leaves fitted parameters unchanged") {
  const Archive archive = generate_synthetic([&] {
    SynthConfig c = recovery_config(11);
    c.day_count = 40;
    return c;
  }());
  std::vector<ForecastCase> cases = archive.rows();
  EmConfig cfg;
  const FitResult base = fit_full_ml(TrainingSet(archive.spec(), cases), cfg);
  std::mt19937 shuffle_rng(5);
  std::shuffle(cases.begin(), cases.end(), shuffle_rng);
  const FitResult shuffled = fit_full_ml(TrainingSet(archive.spec(), cases), cfg);
  for (int k = 0; k < 2; ++k) {
    CHECK(shuffled.model.group(k).weight ==
          doctest::Approx(base.model.group(k).weight).epsilon(1e-10));
    CHECK(shuffled.model.group(k).alpha ==
          doctest::Approx(base.model.group(k).alpha).epsilon(1e-10));
    CHECK(shuffled.model.group(k).beta ==
          doctest::Approx(base.model.group(k).beta).epsilon(1e-10));
  }
  CHECK(shuffled.model.sigma() == doctest::Approx(base.model.sigma()).epsilon(1e-10));
}

TEST_CASE("weight simplex and sigma floor hold for every variant") {
  const Archive archive = generate_synthetic([&] {
    SynthConfig c = recovery_config(29);
    c.day_count = 30;
    return c;
  }());
  const TrainingSet training = training_from_archive(archive);
  for (Variant v : {Variant::naive, Variant::mean_corrected, Variant::full_ml}) {
    EmConfig cfg;
    cfg.variant = v;
    const FitResult r = fit(training, cfg);
    double total = 0.0;
    for (int k = 0; k < r.model.spec().group_count(); ++k) {
      CHECK(r.model.group(k).weight >= 0.0);
      total += r.model.group(k).weight * r.model.spec().groups()[k].member_count;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.model.sigma() >= cfg.min_sigma);
    CHECK(r.diagnostics.final_log_likelihood >=
          r.diagnostics.initial_log_likelihood - 1e-8);
  }
}

TEST_CASE("all-zero forecasts in a group degenerate the beta update") {
  oracle::NormalStream stream(808);
  const GroupSpec spec({{"g", 1}, {"z", 1}});
  std::vector<ForecastCase> cases;
  for (int i = 0; i < 60; ++i) {
    const double f = 5.0 + std::fabs(stream.next());
    const double x = std::fabs(f + 0.7 * stream.next());
    cases.push_back(make_case("S" + std::to_string(i % 3),
                              format_date(add_days(parse_date("2020-01-01"), i / 3)),
                              {f, 0.0}, x));
  }
  EmConfig cfg;
  const FitResult r = fit_full_ml(TrainingSet(spec, cases), cfg);
  bool flagged = false;
  for (const std::string& f : r.diagnostics.flags) {
    if (f.find("beta-update-degenerate:z") != std::string::npos) flagged = true;
  }
  CHECK(flagged);
}

TEST_CASE("log-likelihood flags zero-density observations as -inf") {
  const GroupSpec spec({{"g", 1}});
  const auto model = make_model(spec, {1.0}, {0.0}, {1.0}, 1e-4);
  std::vector<ForecastCase> cases;
  cases.push_back(make_case("S1", "2020-01-01", {1.0}, 1.0));
  cases.push_back(make_case("FAR", "2020-01-02", {1.0}, 1e200));
  const TrainingSet training(spec, cases, 1);
  CHECK(log_likelihood(model, training) == -HUGE_VAL);
}

TEST_CASE("full ML matches a joint-M-step Gaussian mixture EM when truncation vanishes") {
  // Two groups, locations >= 8 sigma; the truncated EM and a plain Gaussian
  // mixture-of-regressions EM maximize the same likelihood here.
  oracle::NormalStream stream(133);
  const GroupSpec spec({{"a", 1}, {"b", 2}});
  std::vector<ForecastCase> cases;
  const int n = 1500;
  for (int i = 0; i < n; ++i) {
    const double s = 14.0 + 1.5 * stream.next();
    const double f1 = s + 1.5 * stream.next();
    const double f2 = s + 1.5 * stream.next();
    const double f3 = s + 1.5 * stream.next();
    const double pick = stream.uniform();
    double x;
    if (pick < 0.5) x = 2.2 + 0.85 * f1 + 0.5 * stream.next();
    else if (pick < 0.75) x = 0.3 + 1.1 * f2 + 0.5 * stream.next();
    else x = 0.3 + 1.1 * f3 + 0.5 * stream.next();
    cases.push_back(make_case("S" + std::to_string(i % 10),
                              format_date(add_days(parse_date("2018-01-01"), i / 10)),
                              {f1, std::max(0.0, f2), std::max(0.0, f3)}, std::max(0.0, x)));
  }
  const TrainingSet training(spec, cases);
  EmConfig cfg;
  cfg.tol = 1e-13;
  cfg.max_iters = 20000;
  const FitResult r = fit_full_ml(training, cfg);

  // Oracle: standard Gaussian mixture EM with exact joint (alpha, beta) M-step.
  const int m = 2;
  std::vector<double> w = {1.0 / 3.0, 1.0 / 3.0};
  std::vector<double> alpha(m), beta(m);
  const auto [a0, b0] = regress_location(training, 0);
  const auto [a1, b1] = regress_location(training, 1);
  alpha = {a0, a1};
  beta = {b0, b1};
  double sigma = 0.0;
  {
    double rss = 0.0;
    long cnt = 0;
    for (const auto& fc : training.cases()) {
      for (int j = 0; j < 3; ++j) {
        const int k = j == 0 ? 0 : 1;
        const double e = *fc.observation - (alpha[k] + beta[k] * fc.members[j].value);
        rss += e * e;
        ++cnt;
      }
    }
    sigma = std::sqrt(rss / cnt);
  }
  double prev_ll = -1e300;
  for (int iter = 0; iter < 40000; ++iter) {
    double ll = 0.0;
    std::vector<double> zsum(m, 0.0), zx(m, 0.0), zf(m, 0.0), zf2(m, 0.0), zfx(m, 0.0);
    double wss = 0.0;
    std::vector<std::array<double, 3>> resp(training.cases().size());
    for (size_t i = 0; i < training.cases().size(); ++i) {
      const auto& fc = training.cases()[i];
      double dens[3];
      double total = 0.0;
      for (int j = 0; j < 3; ++j) {
        const int k = j == 0 ? 0 : 1;
        const double t = (*fc.observation - (alpha[k] + beta[k] * fc.members[j].value)) / sigma;
        dens[j] = w[k] * std::exp(-0.5 * t * t) / (sigma * 2.5066282746310002);
        total += dens[j];
      }
      ll += std::log(total);
      for (int j = 0; j < 3; ++j) resp[i][j] = dens[j] / total;
    }
    for (size_t i = 0; i < training.cases().size(); ++i) {
      const auto& fc = training.cases()[i];
      for (int j = 0; j < 3; ++j) {
        const int k = j == 0 ? 0 : 1;
        const double z = resp[i][j];
        const double f = fc.members[j].value;
        zsum[k] += z;
        zx[k] += z * *fc.observation;
        zf[k] += z * f;
        zf2[k] += z * f * f;
        zfx[k] += z * f * *fc.observation;
      }
    }
    const double n_cases = static_cast<double>(training.cases().size());
    w[0] = zsum[0] / n_cases;
    w[1] = zsum[1] / (2.0 * n_cases);
    for (int k = 0; k < m; ++k) {
      const double det = zsum[k] * zf2[k] - zf[k] * zf[k];
      beta[k] = (zsum[k] * zfx[k] - zf[k] * zx[k]) / det;
      alpha[k] = (zx[k] - beta[k] * zf[k]) / zsum[k];
    }
    for (size_t i = 0; i < training.cases().size(); ++i) {
      const auto& fc = training.cases()[i];
      for (int j = 0; j < 3; ++j) {
        const int k = j == 0 ? 0 : 1;
        const double e = *fc.observation - (alpha[k] + beta[k] * fc.members[j].value);
        wss += resp[i][j] * e * e;
      }
    }
    sigma = std::sqrt(wss / n_cases);
    if (std::fabs(ll - prev_ll) < 1e-13 * std::fabs(ll)) break;
    prev_ll = ll;
  }

  CHECK(r.model.group(0).weight == doctest::Approx(w[0]).epsilon(1e-4));
  CHECK(r.model.group(1).weight == doctest::Approx(w[1]).epsilon(1e-4));
  CHECK(r.model.group(0).alpha == doctest::Approx(alpha[0]).epsilon(1e-4));
  CHECK(r.model.group(1).alpha == doctest::Approx(alpha[1]).epsilon(1e-4));
  CHECK(r.model.group(0).beta == doctest::Approx(beta[0]).epsilon(1e-4));
  CHECK(r.model.group(1).beta == doctest::Approx(beta[1]).epsilon(1e-4));
  CHECK(r.model.sigma() == doctest::Approx(sigma).epsilon(1e-4));
}
