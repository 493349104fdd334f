#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_oracles.hpp"
#include "tnbma/normal.hpp"
#include "tnbma/rng.hpp"
#include "tnbma/truncated_normal.hpp"

using tnbma::TruncatedNormal;

TEST_CASE("standard normal pdf") {
  CHECK(tnbma::std_normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-12));
  CHECK(tnbma::std_normal_pdf(1.0) == doctest::Approx(0.2419707245191434).epsilon(1e-12));
  for (double x : {0.3, 1.7, 4.2, 9.0}) {
    CHECK(tnbma::std_normal_pdf(x) == tnbma::std_normal_pdf(-x));
  }
}

TEST_CASE("standard normal cdf") {
  CHECK(tnbma::std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(tnbma::std_normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
  CHECK(std::fabs(tnbma::std_normal_cdf(40.0) - 1.0) < 1e-15);
  double prev = 0.0;
  for (double x = -8.0; x <= 8.0; x += 0.25) {
    const double c = tnbma::std_normal_cdf(x);
    CHECK(c >= prev);
    prev = c;
  }
}

TEST_CASE("standard normal quantile inverts the cdf") {
  for (double p : {1e-300, 1e-100, 1e-15, 1e-6, 0.02425, 0.1, 0.25, 0.5, 0.75,
                   0.97575, 1.0 - 1e-6, 1.0 - 1e-12}) {
    const double x = tnbma::std_normal_quantile(p);
    CHECK(tnbma::std_normal_cdf(x) == doctest::Approx(p).epsilon(1e-13));
  }
  CHECK(tnbma::std_normal_quantile(0.75) ==
        doctest::Approx(0.6744897501960817).epsilon(1e-14));
}

TEST_CASE("mills ratio is continuous across the series switch and safe far out") {
  for (double t : {-30.5, -32.0, -36.0}) {
    const double series_path = tnbma::mills_ratio(t);
    const double erfc_path = tnbma::std_normal_pdf(t) / tnbma::std_normal_cdf(t);
    CHECK(series_path == doctest::Approx(erfc_path).epsilon(1e-11));
  }
  CHECK(std::isfinite(tnbma::mills_ratio(-500.0)));
  // r(t) ~ -t + 1/(-t) for very negative t.
  CHECK(tnbma::mills_ratio(-100.0) == doctest::Approx(100.01).epsilon(1e-4));
  CHECK(tnbma::log_std_normal_cdf(-40.0) ==
        doctest::Approx(-0.5 * 1600 - tnbma::kLogSqrt2Pi - std::log(40.0)).epsilon(1e-3));
}

TEST_CASE("construction rejects bad scales") {
  CHECK_THROWS_AS(TruncatedNormal(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(TruncatedNormal(0.0, -1.0), std::invalid_argument);
  CHECK_NOTHROW(TruncatedNormal(-5.0, 1.0));
}

TEST_CASE("pdf values") {
  CHECK(TruncatedNormal(0, 1).pdf(0.0) ==
        doctest::Approx(0.7978845608028654).epsilon(1e-12));
  CHECK(TruncatedNormal(2, 1).pdf(-0.5) == 0.0);
  // (1/2) phi(0) / Phi(0.5)
  CHECK(TruncatedNormal(1, 2).pdf(1.0) ==
        doctest::Approx(0.2884771789826343).epsilon(1e-12));
}

TEST_CASE("pdf integrates to one across the location range") {
  for (double m : {-3.0, -1.0, 0.0, 0.5, 2.0, 5.0, 10.0}) {
    const TruncatedNormal d(m, 1.0);
    const double total = oracle::integrate([&](double x) { return d.pdf(x); }, 0.0,
                                           std::max(0.0, m) + 14.0, 1e-11);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("cdf values and monotonicity") {
  CHECK(TruncatedNormal(0, 1).cdf(0.0) == 0.0);
  CHECK(TruncatedNormal(3, 2).cdf(-0.1) == 0.0);
  CHECK(TruncatedNormal(0, 1).cdf(0.6744897501960817) ==
        doctest::Approx(0.5).epsilon(1e-12));
  tnbma::Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const TruncatedNormal d(rng.uniform(-4.0, 8.0), rng.uniform(0.2, 3.0));
    const double x1 = rng.uniform(0.0, 12.0);
    const double x2 = rng.uniform(0.0, 12.0);
    const double lo = std::min(x1, x2);
    const double hi = std::max(x1, x2);
    CHECK(d.cdf(lo) <= d.cdf(hi));
  }
}

TEST_CASE("mean and variance closed forms") {
  CHECK(TruncatedNormal(0, 1).mean() ==
        doctest::Approx(0.7978845608028654).epsilon(1e-12));
  CHECK(TruncatedNormal(8, 1).mean() == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(std::fabs(TruncatedNormal(8, 1).mean() - 8.0) < 1e-10);
  CHECK(TruncatedNormal(1, 1).mean() ==
        doctest::Approx(1.2875999709391784).epsilon(1e-12));

  CHECK(TruncatedNormal(0, 1).variance() ==
        doctest::Approx(0.3633802276324187).epsilon(1e-12));
  CHECK(std::fabs(TruncatedNormal(8, 1).variance() - 1.0) < 1e-9);
  CHECK(TruncatedNormal(1, 1).variance() ==
        doctest::Approx(0.6296862857766054).epsilon(1e-10));
}

TEST_CASE("mean and variance match rejection-sampling Monte Carlo at (1,1)") {
  oracle::NormalStream stream(20240601);
  const auto stats = oracle::monte_carlo(
      [&] { return oracle::draw_truncated(stream, 1.0, 1.0); }, 10'000'000);
  const TruncatedNormal d(1, 1);
  CHECK(std::fabs(stats.mean - d.mean()) < 4.0 * stats.std_error);
  // Variance estimator SE ~ sqrt((m4 - var^2)/n); 1e-3 is ~4 sigma here.
  CHECK(stats.variance == doctest::Approx(d.variance()).epsilon(2e-3));
}

TEST_CASE("moments agree with numerical integration") {
  for (double m : {-3.0, -0.7, 0.0, 1.0, 4.0, 10.0}) {
    const TruncatedNormal d(m, 1.0);
    const double hi = std::max(0.0, m) + 14.0;
    const double mean =
        oracle::integrate([&](double x) { return x * d.pdf(x); }, 0.0, hi, 1e-11);
    const double var = oracle::integrate(
        [&](double x) { return (x - mean) * (x - mean) * d.pdf(x); }, 0.0, hi, 1e-11);
    CHECK(d.mean() == doctest::Approx(mean).epsilon(1e-8));
    CHECK(d.variance() == doctest::Approx(var).epsilon(1e-8));
  }
}

TEST_CASE("truncation corrections decay exponentially for large mu/sigma") {
  for (double m : {8.0, 9.0, 12.0}) {
    const TruncatedNormal d(m, 1.0);
    CHECK(std::fabs(d.mean() - m) < 1e-9);
    CHECK(std::fabs(d.variance() - 1.0) < 1e-8);
  }
  const TruncatedNormal wide(16.0, 2.0);
  CHECK(std::fabs(wide.mean() - 16.0) < 1e-9 * 2.0);
  CHECK(std::fabs(wide.variance() - 4.0) < 1e-8 * 4.0);
}

TEST_CASE("quantile inverts cdf") {
  const TruncatedNormal half(0, 1);
  CHECK(half.quantile(0.5) == doctest::Approx(0.6744897501960817).epsilon(1e-12));
  CHECK(half.quantile(1e-14) < 1e-10);
  CHECK_THROWS_AS(half.quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(half.quantile(1.0), std::invalid_argument);
  for (double m : {-25.0, -2.0, 0.0, 3.0, 9.0}) {
    const TruncatedNormal d(m, 1.3);
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      CHECK(d.cdf(d.quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
  }
  // Extreme location: the log-space path must still return the support.
  const TruncatedNormal far(-60.0, 1.0);
  const double q = far.quantile(0.5);
  CHECK(q >= 0.0);
  CHECK(far.cdf(q) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("sampling is reproducible and concentrates correctly") {
  const TruncatedNormal tight(5.0, 0.01);
  tnbma::Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const double x = tight.sample(rng);
    CHECK(x > 4.9);
    CHECK(x < 5.1);
  }

  tnbma::Rng a(123), b(123);
  const TruncatedNormal d(1.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    CHECK(d.sample(a) == d.sample(b));
  }

  tnbma::Rng big(2024);
  const TruncatedNormal half(0, 1);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += half.sample(big);
  CHECK(sum / n == doctest::Approx(0.7978845608).epsilon(0.004));
}
