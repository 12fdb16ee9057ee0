#include "dhg/measures.hpp"

#include <cmath>
#include <string>

namespace dhg {

double GaussianMeasure::total_variance() const {
  double s = 0.0;
  for (double v : variances) s += v;
  return s;
}

GaussianMeasure stationary_tcc(std::size_t n_modes) {
  GaussianMeasure mu;
  mu.mean = HVec(n_modes);
  mu.variances.resize(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    const double dn = static_cast<double>(n);
    mu.variances[n - 1] = 2.0 / (dn * dn * dn * dn);
  }
  return mu;
}

GaussianMeasure stationary_wn(std::size_t n_modes) {
  GaussianMeasure mu;
  mu.mean = HVec(n_modes);
  mu.variances.resize(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    const double dn = static_cast<double>(n);
    mu.variances[n - 1] = 2.0 / (dn * dn);
  }
  return mu;
}

GaussianMeasure burgers_training_measure(std::size_t n_modes) {
  GaussianMeasure mu;
  mu.mean = HVec(n_modes);
  mu.variances.resize(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    const double dn = static_cast<double>(n);
    mu.variances[n - 1] = 1.0 / (dn * dn * dn * dn);
  }
  return mu;
}

HVec sample_one(const GaussianMeasure& mu, std::uint64_t seed, std::uint32_t stream,
                std::uint64_t index) {
  const std::size_t n_modes = mu.modes();
  HVec x(n_modes);
  normal_fill(seed, stream, index * n_modes, n_modes, x.coeffs.data());
  for (std::size_t i = 0; i < n_modes; ++i) {
    x[i] = x[i] * std::sqrt(mu.variances[i]) + (i < mu.mean.modes() ? mu.mean[i] : 0.0);
  }
  return x;
}

std::vector<HVec> sample(const GaussianMeasure& mu, std::size_t count, std::uint64_t seed,
                         std::uint32_t stream, std::uint64_t first_index) {
  std::vector<HVec> out;
  out.reserve(count);
  for (std::size_t m = 0; m < count; ++m) {
    out.push_back(sample_one(mu, seed, stream, first_index + m));
  }
  return out;
}

double moment_norm(const GaussianMeasure& mu, double q, std::size_t count, std::uint64_t seed) {
  if (count < 1) throw DomainError("moment_norm: count must be >= 1");
  if (q < 1.0) throw DomainError("moment_norm: q must be >= 1");
  double acc = 0.0;
  for (std::size_t m = 0; m < count; ++m) {
    const HVec x = sample_one(mu, seed, streams::kMoment, m);
    acc += std::pow(norm(x), q);
  }
  return std::pow(acc / static_cast<double>(count), 1.0 / q);
}

std::vector<HVec> empirical_stationary(const SpdeDynamics& dyn, double dt, std::size_t steps,
                                       std::size_t count, std::uint64_t seed) {
  const std::size_t n_modes = dyn.n_modes;
  if (n_modes == 0) throw ConfigError("empirical_stationary: n_modes must be positive");
  if (dt <= 0.0) throw ConfigError("empirical_stationary: dt must be positive");

  // Per-mode transition coefficients, fixed over the run.
  std::vector<double> decay(n_modes), drift_w(n_modes), noise_w(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double lam = basis_eigenvalue(i + 1);
    decay[i] = std::exp(-lam * dt);
    drift_w[i] = (1.0 - decay[i]) / lam;
    noise_w[i] = std::sqrt((1.0 - decay[i] * decay[i]) / (2.0 * lam));
  }
  const std::size_t n_cols = dyn.noise.columns.size();

  std::vector<HVec> out;
  out.reserve(count);
  std::vector<double> zeta(n_cols);
  for (std::size_t traj = 0; traj < count; ++traj) {
    HVec x(n_modes);
    for (std::size_t step = 0; step < steps; ++step) {
      HVec forcing(0);
      if (dyn.with_burgers) forcing = burgers_B(x);
      if (n_cols > 0) {
        const std::uint64_t base = (traj * steps + step) * n_cols;
        normal_fill(seed, streams::kStationary, base, n_cols, zeta.data());
      }
      for (std::size_t i = 0; i < n_modes; ++i) {
        double f = 0.0;
        if (dyn.with_burgers) f += forcing[i];
        if (i < dyn.control.modes()) f += dyn.control[i];
        double w = 0.0;
        for (std::size_t c = 0; c < n_cols; ++c) {
          const HVec& col = dyn.noise.columns[c];
          if (i < col.modes()) w += col[i] * zeta[c];
        }
        x[i] = decay[i] * x[i] + drift_w[i] * f + noise_w[i] * w;
      }
      const double mag = norm(x);
      if (!(mag < 1e6)) {
        throw DivergedError("empirical_stationary: |X| exceeded 1e6 at step " +
                            std::to_string(step) + " with dt = " + std::to_string(dt));
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace dhg
