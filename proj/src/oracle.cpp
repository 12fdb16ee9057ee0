#include "dhg/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "dhg/rng.hpp"

namespace dhg {

double LQSolution::value(const HVec& x) const {
  return value_truncated(x, std::min(modes(), x.modes()));
}

double LQSolution::value_truncated(const HVec& x, std::size_t d) const {
  if (d > modes()) throw ShapeError("LQSolution: truncation exceeds solved modes");
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = i < x.modes() ? x[i] : 0.0;
    s += (m[i] * xi + q[i]) * xi + r[i];
  }
  return s;
}

HVec LQSolution::control(const HVec& x) const {
  const std::size_t n = std::min(modes(), x.modes());
  HVec u(modes());
  for (std::size_t i = 0; i < modes(); ++i) {
    const double xi = i < n ? x[i] : 0.0;
    u[i] = -m[i] / lambda * xi - q[i] / (2.0 * lambda);
  }
  return u;
}

CriticJet LQSolution::jet(const HVec& x, std::size_t d) const {
  if (d > modes()) throw ShapeError("LQSolution::jet: truncation exceeds solved modes");
  CriticJet jet;
  jet.value = value_truncated(x, d);
  jet.grad.assign(d, 0.0);
  jet.hess = SymMat(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double xi = i < x.modes() ? x[i] : 0.0;
    jet.grad[i] = 2.0 * m[i] * xi + q[i];
    jet.hess.at(i, i) = 2.0 * m[i];
  }
  return jet;
}

namespace {

void check_params(double gamma, double lambda, const char* who) {
  if (!(gamma > 0.0)) throw DomainError(std::string(who) + ": gamma must be positive");
  if (!(lambda > 0.0)) throw DomainError(std::string(who) + ": lambda must be positive");
}

double sigma_at(const std::vector<double>& sigma_sq, std::size_t i) {
  return i < sigma_sq.size() ? sigma_sq[i] : 0.0;
}

}  // namespace

LQSolution lq_solve(double gamma, double lambda, const HVec& xbar,
                    const std::vector<double>& sigma_sq, std::size_t n_modes) {
  check_params(gamma, lambda, "lq_solve");
  LQSolution sol;
  sol.gamma = gamma;
  sol.lambda = lambda;
  sol.sigma_sq.assign(n_modes, 0.0);
  sol.xbar = HVec(n_modes);
  sol.m.resize(n_modes);
  sol.q.resize(n_modes);
  sol.r.resize(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double lam_n = basis_eigenvalue(i + 1);
    const double b = lambda * (2.0 * lam_n + gamma);
    const double mn = 2.0 * lambda / (b + std::sqrt(b * b + 4.0 * lambda));
    const double xb = i < xbar.modes() ? xbar[i] : 0.0;
    const double qn = -2.0 * xb / (lam_n + gamma + mn / lambda);
    const double ss = sigma_at(sigma_sq, i);
    sol.m[i] = mn;
    sol.q[i] = qn;
    sol.r[i] = (mn * ss + xb * xb - qn * qn / (4.0 * lambda)) / gamma;
    sol.sigma_sq[i] = ss;
    sol.xbar[i] = xb;
  }
  return sol;
}

LQSolution kolmogorov_solve(double gamma, double lambda, const HVec& xbar, const HVec& u,
                            const std::vector<double>& sigma_sq, std::size_t n_modes) {
  check_params(gamma, lambda, "kolmogorov_solve");
  LQSolution sol;
  sol.gamma = gamma;
  sol.lambda = lambda;
  sol.sigma_sq.assign(n_modes, 0.0);
  sol.xbar = HVec(n_modes);
  sol.m.resize(n_modes);
  sol.q.resize(n_modes);
  sol.r.resize(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double lam_n = basis_eigenvalue(i + 1);
    const double mn = 1.0 / (gamma + 2.0 * lam_n);
    const double xb = i < xbar.modes() ? xbar[i] : 0.0;
    const double un = i < u.modes() ? u[i] : 0.0;
    const double qn = (2.0 * mn * un - 2.0 * xb) / (gamma + lam_n);
    const double ss = sigma_at(sigma_sq, i);
    sol.m[i] = mn;
    sol.q[i] = qn;
    sol.r[i] = (qn * un + xb * xb + lambda * un * un + mn * ss) / gamma;
    sol.sigma_sq[i] = ss;
    sol.xbar[i] = xb;
  }
  return sol;
}

double kolmogorov_value(const HVec& x0, const HVec& u, double gamma, double lambda,
                        const HVec& xbar, const std::vector<double>& sigma_sq,
                        std::size_t n_modes) {
  check_params(gamma, lambda, "kolmogorov_value");
  double total = 0.0;
  for (std::size_t i = 0; i < n_modes; ++i) {
    const double lam_n = basis_eigenvalue(i + 1);
    const double fn = i < x0.modes() ? x0[i] : 0.0;
    const double un = i < u.modes() ? u[i] : 0.0;
    const double xb = i < xbar.modes() ? xbar[i] : 0.0;
    const double ss = sigma_at(sigma_sq, i);
    const double a = fn - un / lam_n;   // transient amplitude
    const double b = un / lam_n - xb;   // long-run offset
    total += a * a / (gamma + 2.0 * lam_n) + 2.0 * a * b / (gamma + lam_n) +
             (b * b + lambda * un * un) / gamma + ss / (gamma * (gamma + 2.0 * lam_n));
  }
  return total;
}

std::vector<double> grid_from_hvec(const HVec& x, std::size_t grid_points) {
  std::vector<double> values(grid_points, 0.0);
  const double h = kTwoPi / static_cast<double>(grid_points - 1);
  for (std::size_t j = 1; j + 1 < grid_points; ++j) {
    values[j] = eval_series(x, h * static_cast<double>(j));
  }
  return values;
}

namespace {

// One path of the FD dynamics; returns the discounted accumulated cost.
double fd_path(const std::vector<double>& x0, const std::vector<std::vector<double>>& noise_grid,
               const FdParams& prm, std::uint64_t path_index, double& terminal_rate) {
  const std::size_t m = x0.size();
  const double h = kTwoPi / static_cast<double>(m - 1);
  const double inv_h2 = 1.0 / (h * h);
  const double inv_2h = 0.5 / h;
  const std::size_t n_cols = noise_grid.size();
  const double sqrt_dt = std::sqrt(prm.dt);

  std::vector<double> x = x0;
  x.front() = 0.0;
  x.back() = 0.0;
  std::vector<double> xn(m, 0.0);
  std::vector<double> zeta(n_cols);

  // Thomas factorization for the semi-implicit diffusion option
  // (I - dt A_h) x_new = explicit part.
  std::vector<double> diag, sub;
  if (prm.semi_implicit_diffusion) {
    diag.assign(m, 1.0 + 2.0 * prm.dt * inv_h2);
    sub.assign(m, -prm.dt * inv_h2);
  }

  const bool controlled = !prm.control_grid.empty();
  if (controlled && prm.control_grid.size() != m) {
    throw ShapeError("fd_burgers_value: control grid size mismatch");
  }
  double control_cost = 0.0;
  if (controlled) {
    for (std::size_t j = 0; j < m; ++j) {
      const double w = (j == 0 || j + 1 == m) ? 0.5 : 1.0;
      control_cost += w * prm.control_grid[j] * prm.control_grid[j];
    }
    control_cost *= h * prm.lambda;
  }

  double cost = 0.0;
  double disc = 1.0;
  const double disc_step = std::exp(-prm.gamma * prm.dt);
  terminal_rate = 0.0;

  for (std::size_t step = 0; step < prm.steps; ++step) {
    // Running cost rate: trapezoid of the squared spatial derivative.
    double rate = control_cost;
    {
      double f0 = (x[1] - x[0]) / h;
      rate += 0.5 * h * f0 * f0;
      double interior = 0.0;
      for (std::size_t j = 1; j + 1 < m; ++j) {
        const double fx = (x[j + 1] - x[j - 1]) * inv_2h;
        interior += fx * fx;
      }
      rate += h * interior;
      const double fm = (x[m - 1] - x[m - 2]) / h;
      rate += 0.5 * h * fm * fm;
    }
    cost += disc * rate * prm.dt;
    terminal_rate = rate;

    if (n_cols > 0) {
      const std::uint64_t base = (path_index * prm.steps + step) * n_cols;
      normal_fill(prm.seed, streams::kFdPaths, base, n_cols, zeta.data());
    }

    if (!prm.semi_implicit_diffusion) {
      for (std::size_t j = 1; j + 1 < m; ++j) {
        double drift = (x[j + 1] - 2.0 * x[j] + x[j - 1]) * inv_h2;
        if (prm.with_burgers) drift += x[j] * (x[j + 1] - x[j - 1]) * inv_2h;
        if (controlled) drift += prm.control_grid[j];
        double w = 0.0;
        for (std::size_t c = 0; c < n_cols; ++c) w += noise_grid[c][j] * zeta[c];
        xn[j] = x[j] + prm.dt * drift + sqrt_dt * w;
      }
    } else {
      // Explicit advection + noise, implicit diffusion.
      for (std::size_t j = 1; j + 1 < m; ++j) {
        double drift = prm.with_burgers ? x[j] * (x[j + 1] - x[j - 1]) * inv_2h : 0.0;
        if (controlled) drift += prm.control_grid[j];
        double w = 0.0;
        for (std::size_t c = 0; c < n_cols; ++c) w += noise_grid[c][j] * zeta[c];
        xn[j] = x[j] + prm.dt * drift + sqrt_dt * w;
      }
      // Tridiagonal solve on the interior.
      std::vector<double> cp(m, 0.0), dp(m, 0.0);
      cp[1] = sub[1] / diag[1];
      dp[1] = xn[1] / diag[1];
      for (std::size_t j = 2; j + 1 < m; ++j) {
        const double den = diag[j] - sub[j] * cp[j - 1];
        cp[j] = sub[j] / den;
        dp[j] = (xn[j] - sub[j] * dp[j - 1]) / den;
      }
      xn[m - 2] = dp[m - 2];
      for (std::size_t j = m - 3; j >= 1; --j) xn[j] = dp[j] - cp[j] * xn[j + 1];
    }
    xn.front() = 0.0;
    xn.back() = 0.0;
    x.swap(xn);
    disc *= disc_step;

    double sup = 0.0;
    for (double v : x) sup = std::max(sup, std::fabs(v));
    if (!(sup < 1e6)) {
      throw DivergedError("fd_burgers_value: path " + std::to_string(path_index) +
                          " diverged at step " + std::to_string(step));
    }
  }
  return cost;
}

}  // namespace

FdResult fd_burgers_value(const std::vector<double>& x0_grid, const NoiseModel& noise,
                          const FdParams& prm) {
  if (x0_grid.size() < 5) throw ConfigError("fd_burgers_value: grid too small");
  if (prm.mc_count < 1) throw ConfigError("fd_burgers_value: mc_count must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  const std::size_t m = x0_grid.size();
  const double h = kTwoPi / static_cast<double>(m - 1);

  FdResult res;
  res.cfl_warning = !prm.semi_implicit_diffusion && prm.dt * 2.0 / (h * h) >= 1.0;

  // Noise columns sampled on the grid.
  std::vector<std::vector<double>> noise_grid;
  for (const HVec& col : noise.columns) {
    std::vector<double> g(m, 0.0);
    for (std::size_t j = 1; j + 1 < m; ++j) g[j] = eval_series(col, h * static_cast<double>(j));
    noise_grid.push_back(std::move(g));
  }
  const std::size_t paths = noise_grid.empty() ? 1 : prm.mc_count;

  double sum = 0.0, sum_sq = 0.0, terminal_rate = 0.0;
  for (std::size_t k = 0; k < paths; ++k) {
    const double c = fd_path(x0_grid, noise_grid, prm, k, terminal_rate);
    sum += c;
    sum_sq += c * c;
  }
  res.estimate = sum / static_cast<double>(paths);
  res.paths = paths;
  if (paths > 1) {
    const double var =
        (sum_sq - sum * sum / static_cast<double>(paths)) / static_cast<double>(paths - 1);
    res.std_error = std::sqrt(std::max(var, 0.0) / static_cast<double>(paths));
  }
  const double horizon = prm.dt * static_cast<double>(prm.steps);
  res.tail_bound = std::exp(-prm.gamma * horizon) * terminal_rate / prm.gamma;
  res.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace dhg
