#pragma once

#include <cstddef>
#include <vector>

#include "dhg/spectral.hpp"

namespace dhg {

// Symmetric dense matrix, row-major.
struct SymMat {
  std::size_t n = 0;
  std::vector<double> a;

  SymMat() = default;
  explicit SymMat(std::size_t size) : n(size), a(size * size, 0.0) {}
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
};

// Noise of the driving Wiener process as columns s_i = Q^{1/2} xi_i, so the
// increment is sum_i s_i dbeta_i with independent scalar Brownian motions.
// An empty column list means Q = 0.
struct NoiseModel {
  std::vector<HVec> columns;

  bool empty() const { return columns.empty(); }

  static NoiseModel none();
  // Diagonal Q^{1/2} e_n = sigma_n e_n.
  static NoiseModel diagonal(const std::vector<double>& sigma, std::size_t n_modes);
  // The trace-class example: sigma_n = 1/n.
  static NoiseModel trace_class(std::size_t n_modes);
  // Rank-one column Q^{1/2} e_1 = sum over odd n of (2 sqrt2)/(n pi) e_n,
  // the sine expansion of the constant 1/sqrt(2pi).
  static NoiseModel rank_one(std::size_t n_modes);

  // Per-mode marginal variance rates sigma_n^2 = sum_i s_{i,n}^2.
  std::vector<double> mode_variances(std::size_t n_modes) const;
  // Quadratic form (1/2) sum_i (P_d s_i)(P_d s_i)^T pairing the Hessian in
  // the trace term.
  SymMat trace_quad_form(std::size_t d) const;
  // Trace of Q restricted to the first n_modes coordinates.
  double trace(std::size_t n_modes) const;
};

}  // namespace dhg
