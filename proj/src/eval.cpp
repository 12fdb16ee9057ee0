#include "dhg/eval.hpp"

#include <algorithm>
#include <cmath>

#include "dhg/rng.hpp"

namespace dhg {

namespace {

MetricReport metrics_from_errors(const std::vector<double>& err, const std::vector<double>& ref,
                                 std::size_t k, std::uint64_t seed) {
  MetricReport rep;
  rep.k = k;
  rep.seed = seed;
  double sum_abs = 0.0, sum_sq = 0.0, sum_rel = 0.0, sum_ref_sq = 0.0;
  bool rel_ok = true;
  for (std::size_t j = 0; j < k; ++j) {
    sum_abs += err[j];
    sum_sq += err[j] * err[j];
    if (ref[j] == 0.0) {
      rel_ok = false;
    } else {
      sum_rel += err[j] / ref[j];
    }
    sum_ref_sq += ref[j] * ref[j];
  }
  const double kk = static_cast<double>(k);
  rep.me = sum_abs / kk;
  rep.rmse = std::sqrt(sum_sq / kk);
  rep.re1_defined = rel_ok;
  rep.re1 = rel_ok ? sum_rel / kk : 0.0;
  rep.re2_defined = sum_ref_sq > 0.0;
  rep.re2 = rep.re2_defined ? std::sqrt(sum_sq / sum_ref_sq) : 0.0;
  return rep;
}

}  // namespace

MetricReport metrics(const ScalarFn& predict, const ScalarFn& reference,
                     const GaussianMeasure& mu, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw DomainError("metrics: K must be >= 1");
  std::vector<double> err(k), ref(k);
  for (std::size_t j = 0; j < k; ++j) {
    const HVec x = sample_one(mu, seed, streams::kMetrics, j);
    const double v = reference(x);
    err[j] = std::fabs(predict(x) - v);
    ref[j] = std::fabs(v);
  }
  return metrics_from_errors(err, ref, k, seed);
}

MetricReport metrics(const FieldFn& predict, const FieldFn& reference,
                     const GaussianMeasure& mu, std::size_t k, std::uint64_t seed) {
  if (k < 1) throw DomainError("metrics: K must be >= 1");
  std::vector<double> err(k), ref(k);
  for (std::size_t j = 0; j < k; ++j) {
    const HVec x = sample_one(mu, seed, streams::kMetrics, j);
    const HVec v = reference(x);
    err[j] = norm(sub(predict(x), v));
    ref[j] = norm(v);
  }
  return metrics_from_errors(err, ref, k, seed);
}

double residual_l2_norm(const CriticNet& net, const ActorNet* actor, const ProblemSpec& spec,
                        const GaussianMeasure& mu, std::size_t k, std::uint64_t seed) {
  ResidualEvaluator eval(net, actor, spec);
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const HVec x = sample_one(mu, seed, streams::kMetrics, j);
    const double r = eval(x);
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(k));
}

BoundedInverseReport bounded_inverse_report(const CriticNet& net, const ProblemSpec& spec,
                                            const LQSolution& oracle, const GaussianMeasure& mu,
                                            std::size_t k, std::uint64_t seed, double omega) {
  if (!(omega > 0.0)) throw DomainError("bounded_inverse_report: omega must be positive");
  BoundedInverseReport rep;

  // Applicability: Kolmogorov kind and mu equal to the stationary law of the
  // uncontrolled linear dynamics, v_n = sigma_n^2 / (2 lambda_n).
  rep.certified = spec.kind == ProblemKind::kHeatKolmogorov;
  if (rep.certified) {
    const std::vector<double> sig = spec.noise.mode_variances(spec.n_modes);
    for (std::size_t i = 0; i < spec.n_modes && rep.certified; ++i) {
      const double target = sig[i] / (2.0 * basis_eigenvalue(i + 1));
      const double actual = i < mu.modes() ? mu.variances[i] : 0.0;
      if (std::fabs(actual - target) > 1e-12 * std::max(1.0, target)) rep.certified = false;
    }
    if (mu.mean.modes() > 0 && norm(mu.mean) != 0.0) rep.certified = false;
  }

  // Squared-error and squared-residual folds with second moments for the
  // delta-method standard errors.
  ResidualEvaluator eval(net, nullptr, spec);
  double se_sum = 0.0, se_sq = 0.0, rr_sum = 0.0, rr_sq = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const HVec x = sample_one(mu, seed, streams::kMetrics, j);
    const double e = critic_eval(net, x) - oracle.value(x);
    const double e2 = e * e;
    se_sum += e2;
    se_sq += e2 * e2;
    const double r = eval(x);
    const double r2 = r * r;
    rr_sum += r2;
    rr_sq += r2 * r2;
  }
  const double kk = static_cast<double>(k);
  const double mse = se_sum / kk;
  const double mrr = rr_sum / kk;
  rep.rmse_vs_oracle = std::sqrt(mse);
  rep.residual_norm = std::sqrt(mrr);
  rep.certified_bound = rep.residual_norm / omega;

  const double var_mse = std::max(se_sq / kk - mse * mse, 0.0) / kk;
  const double var_mrr = std::max(rr_sq / kk - mrr * mrr, 0.0) / kk;
  const double se_rmse = rep.rmse_vs_oracle > 0.0
                             ? 0.5 * std::sqrt(var_mse) / rep.rmse_vs_oracle
                             : std::sqrt(std::sqrt(var_mse));
  const double se_resn = rep.residual_norm > 0.0
                             ? 0.5 * std::sqrt(var_mrr) / rep.residual_norm
                             : std::sqrt(std::sqrt(var_mrr));
  rep.mc_slack = rep.certified_bound > 0.0
                     ? 3.0 * (se_rmse + se_resn / omega) / rep.certified_bound
                     : 0.0;
  rep.pass = rep.rmse_vs_oracle <= rep.certified_bound * (1.0 + rep.mc_slack);
  return rep;
}

double block_diag_operator_norm(const SymMat& block, const std::vector<double>& tail) {
  double tail_sup = 0.0;
  for (double t : tail) tail_sup = std::max(tail_sup, std::fabs(t));

  const std::size_t n = block.n;
  if (n == 0) return tail_sup;
  // Power iteration with a fixed deterministic start.
  std::vector<double> v(n), w(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(n));
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = &block.a[i * n];
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * v[j];
      w[i] = acc;
    }
    double mag = 0.0;
    for (double x : w) mag += x * x;
    mag = std::sqrt(mag);
    if (mag == 0.0) return tail_sup;
    const double prev = lambda;
    lambda = mag;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / mag;
    if (it > 0 && std::fabs(lambda - prev) <= 1e-6 * std::max(1.0, lambda)) break;
  }
  return std::max(lambda, tail_sup);
}

DerivativeErrors derivative_error_norms(const JetFn& jet_fn, std::size_t d,
                                        const LQSolution& oracle, const GaussianMeasure& mu,
                                        const GaussianMeasure& mu2, std::size_t k,
                                        std::uint64_t seed) {
  if (k < 1) throw DomainError("derivative_error_norms: K must be >= 1");
  DerivativeErrors out;
  const std::size_t n_modes = std::min({oracle.modes(), mu.modes(), mu2.modes()});
  if (n_modes < d) throw ShapeError("derivative_error_norms: oracle truncation below d");

  double v4 = 0.0, g4 = 0.0, h4 = 0.0, op4 = 0.0;
  std::vector<double> tail(n_modes - d);
  for (std::size_t j = 0; j < k; ++j) {
    const HVec x = sample_one(mu, seed, streams::kMetrics, 2 * j);
    const HVec h = sample_one(mu2, seed, streams::kMetrics, 2 * j + 1);
    const CriticJet jet = jet_fn(x);

    // Value error.
    const double ve = jet.value - oracle.value(x);
    v4 += ve * ve * ve * ve;

    // Gradient error: network grad on d modes minus 2 M_n x_n + Q_n on all.
    double ge2 = 0.0;
    for (std::size_t i = 0; i < n_modes; ++i) {
      const double og = 2.0 * oracle.m[i] * x[i] + oracle.q[i];
      const double diff = (i < d ? jet.grad[i] : 0.0) - og;
      ge2 += diff * diff;
    }
    g4 += ge2 * ge2;

    // Hessian difference applied to h: dense block on the first d modes,
    // diagonal -2 M_n tail above.
    double he2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double* row = &jet.hess.a[i * d];
      double acc = 0.0;
      for (std::size_t l = 0; l < d; ++l) acc += row[l] * h[l];
      acc -= 2.0 * oracle.m[i] * h[i];
      he2 += acc * acc;
    }
    for (std::size_t i = d; i < n_modes; ++i) {
      const double acc = -2.0 * oracle.m[i] * h[i];
      he2 += acc * acc;
    }
    h4 += he2 * he2;

    // Operator norm of the same difference.
    SymMat block = jet.hess;
    for (std::size_t i = 0; i < d; ++i) block.at(i, i) -= 2.0 * oracle.m[i];
    for (std::size_t i = d; i < n_modes; ++i) tail[i - d] = -2.0 * oracle.m[i];
    const double opn = block_diag_operator_norm(block, tail);
    op4 += opn * opn * opn * opn;
  }
  const double kk = static_cast<double>(k);
  out.value_l4 = std::pow(v4 / kk, 0.25);
  out.grad_l4 = std::pow(g4 / kk, 0.25);
  out.hess_mu_mu = std::pow(h4 / kk, 0.25);
  out.hess_op = std::pow(op4 / kk, 0.25);
  return out;
}

DerivativeErrors derivative_error_norms(const CriticNet& net, const LQSolution& oracle,
                                        const GaussianMeasure& mu, const GaussianMeasure& mu2,
                                        std::size_t k, std::uint64_t seed) {
  return derivative_error_norms([&net](const HVec& x) { return critic_jet(net, x); }, net.d,
                                oracle, mu, mu2, k, seed);
}

}  // namespace dhg
