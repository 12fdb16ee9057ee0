#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dhg/hgno.hpp"
#include "dhg/measures.hpp"
#include "dhg/oracle.hpp"
#include "dhg/residual.hpp"

namespace dhg {

// The four accuracy evaluations over K mu-samples:
//   ME   = (1/K) sum |Q - V|
//   RMSE = sqrt((1/K) sum |Q - V|^2)
//   RE1  = (1/K) sum |Q - V| / |V|
//   RE2  = sqrt(sum |Q - V|^2 / sum |V|^2)
// |.| is the absolute value for scalar targets and the H-norm for controls.
struct MetricReport {
  double me = 0.0;
  double rmse = 0.0;
  double re1 = 0.0;
  double re2 = 0.0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::string probe_desc;
  bool re1_defined = true;  // false when some |V(x_j)| = 0
  bool re2_defined = true;  // false when all |V(x_j)| = 0
};

using ScalarFn = std::function<double(const HVec&)>;
using FieldFn = std::function<HVec(const HVec&)>;

MetricReport metrics(const ScalarFn& predict, const ScalarFn& reference,
                     const GaussianMeasure& mu, std::size_t k, std::uint64_t seed);
MetricReport metrics(const FieldFn& predict, const FieldFn& reference,
                     const GaussianMeasure& mu, std::size_t k, std::uint64_t seed);

// sqrt((1/K) sum residual(x_j)^2).
double residual_l2_norm(const CriticNet& net, const ActorNet* actor, const ProblemSpec& spec,
                        const GaussianMeasure& mu, std::size_t k, std::uint64_t seed);

// Residual-norm-to-solution-error certificate: for the dissipative
// Kolmogorov problem sampled at its stationary measure,
//   |v - w|_{L2(mu)} <= |Fw|_{L2(mu)} / omega,  omega = gamma.
struct BoundedInverseReport {
  double rmse_vs_oracle = 0.0;
  double residual_norm = 0.0;
  double certified_bound = 0.0;
  double mc_slack = 0.0;  // 3 x combined standard errors / certified bound
  bool pass = false;
  bool certified = true;  // false when mu is not the stationary measure
};

BoundedInverseReport bounded_inverse_report(const CriticNet& net, const ProblemSpec& spec,
                                            const LQSolution& oracle, const GaussianMeasure& mu,
                                            std::size_t k, std::uint64_t seed, double omega);

// L4 errors of the value, gradient and Hessian against the closed form.
// The Hessian difference is the dense d-block minus diag(2 M_n), extended
// by the diagonal tail -2 M_n for n > d.
struct DerivativeErrors {
  double value_l4 = 0.0;
  double grad_l4 = 0.0;
  double hess_mu_mu = 0.0;  // (4; mu, mu') norm
  double hess_op = 0.0;     // (4; Op) norm via power iteration on the d-block
};

using JetFn = std::function<CriticJet(const HVec&)>;

DerivativeErrors derivative_error_norms(const JetFn& jet_fn, std::size_t d,
                                        const LQSolution& oracle, const GaussianMeasure& mu,
                                        const GaussianMeasure& mu2, std::size_t k,
                                        std::uint64_t seed);
DerivativeErrors derivative_error_norms(const CriticNet& net, const LQSolution& oracle,
                                        const GaussianMeasure& mu, const GaussianMeasure& mu2,
                                        std::size_t k, std::uint64_t seed);

// Operator norm of (dense d-block) + diag(tail) by 50 power iterations at
// tolerance 1e-6 on the block, then max against the tail sup.
double block_diag_operator_norm(const SymMat& block, const std::vector<double>& tail);

}  // namespace dhg
