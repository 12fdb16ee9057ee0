#include "dhg/noise.hpp"

#include <algorithm>
#include <cmath>

namespace dhg {

NoiseModel NoiseModel::none() { return NoiseModel{}; }

NoiseModel NoiseModel::diagonal(const std::vector<double>& sigma, std::size_t n_modes) {
  NoiseModel q;
  q.columns.reserve(std::min(sigma.size(), n_modes));
  for (std::size_t n = 1; n <= n_modes && n <= sigma.size(); ++n) {
    if (sigma[n - 1] == 0.0) continue;
    HVec col(n_modes);
    col[n - 1] = sigma[n - 1];
    q.columns.push_back(std::move(col));
  }
  return q;
}

NoiseModel NoiseModel::trace_class(std::size_t n_modes) {
  std::vector<double> sigma(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) sigma[n - 1] = 1.0 / static_cast<double>(n);
  return diagonal(sigma, n_modes);
}

NoiseModel NoiseModel::rank_one(std::size_t n_modes) {
  NoiseModel q;
  HVec col(n_modes);
  const double c = 2.0 * std::sqrt(2.0) / 3.14159265358979323846264338327950288;
  for (std::size_t n = 1; n <= n_modes; n += 2) col[n - 1] = c / static_cast<double>(n);
  q.columns.push_back(std::move(col));
  return q;
}

std::vector<double> NoiseModel::mode_variances(std::size_t n_modes) const {
  std::vector<double> v(n_modes, 0.0);
  for (const HVec& s : columns) {
    const std::size_t m = std::min(n_modes, s.modes());
    for (std::size_t i = 0; i < m; ++i) v[i] += s[i] * s[i];
  }
  return v;
}

SymMat NoiseModel::trace_quad_form(std::size_t d) const {
  SymMat s(d);
  for (const HVec& col : columns) {
    const std::size_t m = std::min(d, col.modes());
    for (std::size_t i = 0; i < m; ++i) {
      const double ci = 0.5 * col[i];
      for (std::size_t j = 0; j < m; ++j) s.at(i, j) += ci * col[j];
    }
  }
  return s;
}

double NoiseModel::trace(std::size_t n_modes) const {
  double t = 0.0;
  for (const HVec& s : columns) {
    const std::size_t m = std::min(n_modes, s.modes());
    for (std::size_t i = 0; i < m; ++i) t += s[i] * s[i];
  }
  return t;
}

}  // namespace dhg
