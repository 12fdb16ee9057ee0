#pragma once

#include <cstdint>
#include <vector>

#include "dhg/noise.hpp"
#include "dhg/rng.hpp"
#include "dhg/spectral.hpp"

namespace dhg {

// Gaussian measure on H with covariance diagonal in the sine basis:
// a draw is mean + sum_n zeta_n sqrt(v_n) e_n with iid standard normals.
struct GaussianMeasure {
  HVec mean;
  std::vector<double> variances;  // v_n >= 0, slot n-1

  std::size_t modes() const { return variances.size(); }
  double total_variance() const;
};

// Stationary law of the uncontrolled stochastic heat dynamics under the
// trace-class covariance, v_n = 1/(2 n^2 lambda_n) = 2/n^4.
GaussianMeasure stationary_tcc(std::size_t n_modes);
// Stationary law under white noise, v_n = 1/(2 lambda_n) = 2/n^2.
GaussianMeasure stationary_wn(std::size_t n_modes);
// Burgers training measure, v_n = 1/n^4.
GaussianMeasure burgers_training_measure(std::size_t n_modes);

// Draw `index` of the stream; bitwise-reproducible per address.
HVec sample_one(const GaussianMeasure& mu, std::uint64_t seed, std::uint32_t stream,
                std::uint64_t index);
std::vector<HVec> sample(const GaussianMeasure& mu, std::size_t count, std::uint64_t seed,
                         std::uint32_t stream = streams::kSample,
                         std::uint64_t first_index = 0);

// Monte Carlo estimate of (integral |x|^q mu(dx))^{1/q}.
double moment_norm(const GaussianMeasure& mu, double q, std::size_t count, std::uint64_t seed);

// Forward dynamics dX = (AX + B(X) + u) dt + dW^Q truncated at n_modes.
struct SpdeDynamics {
  std::size_t n_modes = 0;
  bool with_burgers = false;
  NoiseModel noise;
  HVec control;  // zero-length means u = 0
};

// End states of `count` independent trajectories started from zero, using
// the exponential-Euler update per mode
//   x_n <- exp(-lambda_n dt) x_n + phi_n(dt) f_n + g_n(dt) (noise),
// with phi_n = (1 - e^{-lambda_n dt})/lambda_n and the exact Ornstein-
// Uhlenbeck quadrature g_n = sqrt((1 - e^{-2 lambda_n dt})/(2 lambda_n)).
std::vector<HVec> empirical_stationary(const SpdeDynamics& dyn, double dt, std::size_t steps,
                                       std::size_t count, std::uint64_t seed);

}  // namespace dhg
