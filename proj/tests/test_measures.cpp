#include <doctest.h>

#include <cmath>

#include "dhg/measures.hpp"
#include "dhg/noise.hpp"

using namespace dhg;

TEST_CASE("stationary measure presets") {
  const GaussianMeasure tcc = stationary_tcc(10);
  CHECK(tcc.variances[0] == doctest::Approx(2.0));
  CHECK(tcc.variances[1] == doctest::Approx(0.125));
  CHECK(tcc.variances[9] == doctest::Approx(2e-4));

  const GaussianMeasure wn = stationary_wn(4);
  CHECK(wn.variances[0] == doctest::Approx(2.0));
  CHECK(wn.variances[1] == doctest::Approx(0.5));
  CHECK(wn.variances[3] == doctest::Approx(0.125));

  const GaussianMeasure b4 = burgers_training_measure(3);
  CHECK(b4.variances[0] == doctest::Approx(1.0));
  CHECK(b4.variances[1] == doctest::Approx(1.0 / 16.0));
  CHECK(b4.variances[2] == doctest::Approx(1.0 / 81.0));
}

TEST_CASE("degenerate measure reproduces the mean") {
  GaussianMeasure mu;
  mu.mean = HVec(std::vector<double>{1.0, -2.0, 0.5});
  mu.variances = {0.0, 0.0, 0.0};
  for (const HVec& x : sample(mu, 5, 11)) {
    CHECK(norm(sub(x, mu.mean)) == 0.0);
  }
}

TEST_CASE("empirical variance of a single active mode") {
  GaussianMeasure mu;
  mu.mean = HVec(4);
  mu.variances = {1.0, 0.0, 0.0, 0.0};
  const std::size_t count = 100000;
  double sq1 = 0.0, others = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    const HVec x = sample_one(mu, 21, streams::kSample, m);
    sq1 += x[0] * x[0];
    for (std::size_t i = 1; i < 4; ++i) others = std::max(others, std::fabs(x[i]));
  }
  CHECK(sq1 / count == doctest::Approx(1.0).epsilon(0.03));
  CHECK(others == 0.0);
}

TEST_CASE("sampling is deterministic per seed and splittable") {
  const GaussianMeasure mu = stationary_tcc(8);
  const auto a = sample(mu, 6, 77);
  const auto b = sample(mu, 6, 77);
  for (std::size_t m = 0; m < 6; ++m) CHECK(norm(sub(a[m], b[m])) == 0.0);
  // Sample m is independent of batch composition.
  const auto tail = sample(mu, 3, 77, streams::kSample, 3);
  for (std::size_t m = 0; m < 3; ++m) CHECK(norm(sub(a[3 + m], tail[m])) == 0.0);
  // Different seed changes the draw.
  const auto c = sample(mu, 1, 78);
  CHECK(norm(sub(a[0], c[0])) > 0.0);
}

TEST_CASE("independence across samples and modes") {
  const GaussianMeasure mu = stationary_wn(6);
  const std::size_t count = 20000;
  std::vector<HVec> xs = sample(mu, count, 5);
  // Lag-1 cross-correlation on coefficient 1.
  double lag = 0.0, var = 0.0;
  for (std::size_t m = 0; m + 1 < count; ++m) {
    lag += xs[m][0] * xs[m + 1][0];
    var += xs[m][0] * xs[m][0];
  }
  CHECK(std::fabs(lag / var) < 3.0 / std::sqrt(static_cast<double>(count)));
  // Off-diagonal covariance vanishes to Monte Carlo tolerance.
  for (std::size_t i = 0; i < 5; ++i) {
    double cov = 0.0;
    for (std::size_t m = 0; m < count; ++m) cov += xs[m][i] * xs[m][i + 1];
    cov /= static_cast<double>(count);
    const double scale = std::sqrt(mu.variances[i] * mu.variances[i + 1]);
    CHECK(std::fabs(cov) / scale < 5.0 / std::sqrt(static_cast<double>(count)));
  }
}

TEST_CASE("moment_norm") {
  GaussianMeasure point;
  point.mean = HVec(std::vector<double>{3.0, 4.0});
  point.variances = {0.0, 0.0};
  CHECK(moment_norm(point, 3.0, 100, 1) == doctest::Approx(5.0));

  const GaussianMeasure tcc = stationary_tcc(200);
  // q = 2: sqrt of the covariance trace, sum 2/n^4 -> 2 pi^4 / 90.
  const double expected = std::sqrt(2.0 * std::pow(M_PI, 4) / 90.0);
  CHECK(moment_norm(tcc, 2.0, 60000, 2) == doctest::Approx(expected).epsilon(0.02));

  // Jensen monotonicity on the same draw.
  const double m1 = moment_norm(tcc, 1.0, 20000, 3);
  const double m2 = moment_norm(tcc, 2.0, 20000, 3);
  const double m4 = moment_norm(tcc, 4.0, 20000, 3);
  CHECK(m1 <= m2 + 1e-12);
  CHECK(m2 <= m4 + 1e-12);

  CHECK_THROWS_AS(moment_norm(tcc, 0.5, 10, 1), DomainError);
  CHECK_THROWS_AS(moment_norm(tcc, 2.0, 0, 1), DomainError);
}

TEST_CASE("empirical_stationary: zero dynamics stay at zero") {
  SpdeDynamics dyn;
  dyn.n_modes = 6;
  dyn.with_burgers = false;
  dyn.noise = NoiseModel::none();
  const auto ends = empirical_stationary(dyn, 0.01, 50, 4, 9);
  for (const HVec& x : ends) CHECK(norm(x) == 0.0);
}

TEST_CASE("empirical_stationary: heat-only matches the OU stationary law") {
  SpdeDynamics dyn;
  dyn.n_modes = 8;
  dyn.with_burgers = false;
  dyn.noise = NoiseModel::trace_class(8);
  // Exponential transition is exact per mode, so large steps are fine;
  // horizon 24 time units is 6 relaxation times of the slowest mode.
  const auto ends = empirical_stationary(dyn, 0.4, 60, 2000, 31);
  for (std::size_t n = 1; n <= 5; ++n) {
    double sq = 0.0;
    for (const HVec& x : ends) sq += x[n - 1] * x[n - 1];
    sq /= static_cast<double>(ends.size());
    const double target = 2.0 / std::pow(static_cast<double>(n), 4);
    CHECK(sq == doctest::Approx(target).epsilon(0.10));
  }
}

TEST_CASE("empirical_stationary: deterministic per seed, burgers path smoke") {
  SpdeDynamics dyn;
  dyn.n_modes = 16;
  dyn.with_burgers = true;
  dyn.noise = NoiseModel::rank_one(16);
  const auto a = empirical_stationary(dyn, 1e-3, 200, 3, 12);
  const auto b = empirical_stationary(dyn, 1e-3, 200, 3, 12);
  for (std::size_t m = 0; m < 3; ++m) CHECK(norm(sub(a[m], b[m])) == 0.0);
  for (const HVec& x : a) CHECK(norm(x) < 10.0);
}
