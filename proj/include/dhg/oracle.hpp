#pragma once

#include <cstdint>
#include <vector>

#include "dhg/hgno.hpp"
#include "dhg/noise.hpp"
#include "dhg/spectral.hpp"

namespace dhg {

// Closed-form quadratic value functions of the controlled heat problem,
// per mode v_n(x_n) = M_n x_n^2 + Q_n x_n + R_n. Two solves share the
// container: the full control problem (Riccati per mode) and the fixed-
// control Kolmogorov problem.
struct LQSolution {
  std::vector<double> m;  // quadratic coefficients M_n
  std::vector<double> q;  // linear coefficients Q_n
  std::vector<double> r;  // constants R_n
  double gamma = 0.0;
  double lambda = 0.0;
  std::vector<double> sigma_sq;  // per-mode noise variance rates
  HVec xbar;

  std::size_t modes() const { return m.size(); }

  double value(const HVec& x) const;  // sum over min(modes(), x.modes())
  double value_truncated(const HVec& x, std::size_t d) const;
  HVec control(const HVec& x) const;  // u*_n = -M_n x_n / lambda - Q_n/(2 lambda)

  // Reference critic: the jet of the d-truncated value sum. grad_n =
  // 2 M_n x_n + Q_n for n <= d; Hessian diag(2 M_n) on the d block.
  CriticJet jet(const HVec& x, std::size_t d) const;
};

// Control problem solve:
//   M_n = 2 lambda / (lambda(2 lambda_n + gamma)
//         + sqrt(lambda^2 (2 lambda_n + gamma)^2 + 4 lambda)),
//   Q_n = -2 xbar_n / (lambda_n + gamma + M_n/lambda),
//   R_n = (M_n sigma_n^2 + xbar_n^2 - Q_n^2/(4 lambda)) / gamma.
LQSolution lq_solve(double gamma, double lambda, const HVec& xbar,
                    const std::vector<double>& sigma_sq, std::size_t n_modes);

// Fixed-control Kolmogorov solve, from the per-mode ansatz:
//   M_n = 1/(gamma + 2 lambda_n),
//   Q_n = (2 M_n u_n - 2 xbar_n)/(gamma + lambda_n),
//   R_n = (Q_n u_n + xbar_n^2 + lambda u_n^2 + M_n sigma_n^2)/gamma.
LQSolution kolmogorov_solve(double gamma, double lambda, const HVec& xbar, const HVec& u,
                            const std::vector<double>& sigma_sq, std::size_t n_modes);

inline double oracle_value(const LQSolution& sol, const HVec& x) { return sol.value(x); }
inline HVec oracle_control(const LQSolution& sol, const HVec& x) { return sol.control(x); }

// Discounted cost of holding the control u_t == u from x0, summed per mode
// via the Ornstein-Uhlenbeck transition and Ito isometry.
double kolmogorov_value(const HVec& x0, const HVec& u, double gamma, double lambda,
                        const HVec& xbar, const std::vector<double>& sigma_sq,
                        std::size_t n_modes);

// Monte Carlo finite-difference estimator of the Burgers value
//   E integral_0^inf e^{-gamma t} ( |x'(t)|^2 + lambda |u|^2 ) dt
// on a uniform grid with pinned endpoints. Centered interior stencils,
// trapezoid cost quadrature, left-endpoint time quadrature.
struct FdParams {
  std::size_t grid_points = 251;
  double dt = 1e-4;
  std::size_t steps = 100000;
  std::size_t mc_count = 1;
  std::uint64_t seed = 0;
  double gamma = 1.0;
  double lambda = 1.0;
  bool with_burgers = true;
  bool semi_implicit_diffusion = false;
  std::vector<double> control_grid;  // empty = uncontrolled
};

struct FdResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t paths = 0;
  double runtime_s = 0.0;
  double tail_bound = 0.0;  // e^{-gamma T} x (terminal cost rate averaged)
  bool cfl_warning = false;
};

FdResult fd_burgers_value(const std::vector<double>& x0_grid, const NoiseModel& noise,
                          const FdParams& params);

// x evaluated at the FD grid xi_j = 2 pi j / (grid_points - 1).
std::vector<double> grid_from_hvec(const HVec& x, std::size_t grid_points);

}  // namespace dhg
