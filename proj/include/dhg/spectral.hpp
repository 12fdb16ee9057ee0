#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dhg/common.hpp"

namespace dhg {

// Sine eigenbasis of the Dirichlet Laplacian on [0,2pi]:
//   e_n(xi) = sin(n xi / 2) / sqrt(pi),   A e_n = -lambda_n e_n,
//   lambda_n = n^2 / 4,                   n = 1, 2, ...
// Modes are 1-based in all documentation; mode n is stored at index n-1.

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kSqrtPi = 1.7724538509055160272981674833411;
inline constexpr std::size_t kMaxModes = std::size_t{1} << 20;

double basis_eigenvalue(std::size_t n);       // lambda_n = n^2/4
double eval_basis(std::size_t n, double xi);  // e_n(xi); domain-checked

// A point of H = L^2([0,2pi]) by its first N sine coefficients,
// coefficient n meaning <x, e_n>. Parseval: |x|^2 = sum of squares.
struct HVec {
  std::vector<double> coeffs;

  HVec() = default;
  explicit HVec(std::size_t n_modes) : coeffs(n_modes, 0.0) {}
  explicit HVec(std::vector<double> c) : coeffs(std::move(c)) {}

  std::size_t modes() const { return coeffs.size(); }
  // 0-based storage access (slot i holds mode i+1).
  double operator[](std::size_t i) const { return coeffs[i]; }
  double& operator[](std::size_t i) { return coeffs[i]; }
  // 1-based mode access.
  double mode(std::size_t n) const { return coeffs.at(n - 1); }
};

HVec unit_mode(std::size_t n, std::size_t n_modes);  // e_n truncated at n_modes

double inner(const HVec& x, const HVec& y);  // shorter side zero-padded
double norm(const HVec& x);

HVec add(const HVec& x, const HVec& y);
HVec sub(const HVec& x, const HVec& y);
HVec scale(const HVec& x, double a);
void axpy(double a, const HVec& x, HVec& y);  // y += a*x, y keeps its length

HVec apply_A(const HVec& x);             // mode n: -lambda_n x_n
double dirichlet_energy(const HVec& x);  // |(-A)^{1/2} x|^2 = sum lambda_n x_n^2
HVec project_Pd(const HVec& x, std::size_t d);

// Coefficient-space Burgers nonlinearity B(x) = x x', truncated at the
// input's mode count:
//   (B(x))_n = n/(8 sqrt pi) sum_{m<n} x_m x_{n-m}
//            - n/(4 sqrt pi) sum_{m<=N-n} x_m x_{n+m}.
HVec burgers_B(const HVec& x);

// Pointwise evaluation of the truncated series sum_n x_n e_n(xi).
double eval_series(const HVec& x, double xi);
// Series of the spatial derivative, sum_n x_n (n/2) cos(n xi/2)/sqrt(pi).
double eval_series_derivative(const HVec& x, double xi);

// Coefficients <f, e_n> for n = 1..n_modes by composite Simpson quadrature.
// panels = 0 selects the default 4*max(n_modes, 64) panels (a panel spans
// two grid intervals).
HVec project_function(const std::function<double(double)>& f, std::size_t n_modes,
                      std::size_t panels = 0);
// Same, from samples on the uniform grid xi_j = 2pi j/(m-1), m odd.
HVec project_grid(const std::vector<double>& values, std::size_t n_modes);

// Serialization. Binary form: u32 little-endian coefficient count, then
// that many little-endian f64 coefficients.
std::vector<std::uint8_t> hvec_to_bytes(const HVec& x);
HVec hvec_from_bytes(const std::vector<std::uint8_t>& bytes);
// Sparse one-line CSV "n1,c1;n2,c2;..." with 1-based mode indices.
std::string hvec_to_sparse_csv(const HVec& x);
HVec hvec_from_sparse_csv(const std::string& text, std::size_t n_modes);

}  // namespace dhg
