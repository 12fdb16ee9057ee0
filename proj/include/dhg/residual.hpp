#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dhg/hgno.hpp"
#include "dhg/measures.hpp"
#include "dhg/noise.hpp"
#include "dhg/spectral.hpp"

namespace dhg {

enum class ProblemKind { kHeatKolmogorov, kHeatHjb, kBurgersKolmogorov };

// One concrete residual definition. The pairing <A* Dv, x> runs over the
// first d modes only (Dv lives in span{e_1..e_d} and A is diagonal); the
// running cost, Burgers convolution and target distance use all N sampled
// coordinates.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::kHeatKolmogorov;
  double gamma = 1.0;
  double lambda = 1.0;
  HVec xbar;           // length N
  NoiseModel noise;
  HVec fixed_control;  // Kolmogorov kinds; empty means u = 0
  std::size_t d = 0;
  std::size_t n_modes = 0;
  std::string preset;  // e.g. "heat-tcc"; empty for ad-hoc specs
  SymMat trace_quad;   // cached (1/2) sum_i (P_d s_i)(P_d s_i)^T

  bool burgers() const { return kind == ProblemKind::kBurgersKolmogorov; }
};

ProblemSpec make_problem(ProblemKind kind, double gamma, double lambda, const HVec& xbar,
                         NoiseModel noise, const HVec& fixed_control, std::size_t d,
                         std::size_t n_modes);

// Named presets from the experiments: heat-tcc, heat-1d, heat-det,
// burgers-1d, burgers-det. `hjb` switches the heat presets to the control
// problem (ignored by the Burgers ones, which stay Kolmogorov).
ProblemSpec problem_preset(const std::string& name, std::size_t d, std::size_t n_modes,
                           bool hjb = false);
// The reference/training measure each preset uses.
GaussianMeasure preset_measure(const std::string& name, std::size_t n_modes);

// (1/2) sum_i <hess P_d s_i, P_d s_i>.
double trace_term(const CriticJet& jet, const NoiseModel& noise);

// -gamma v + <A*Dv, x> + <Dv, u> + |x - xbar|^2 + lambda |u|^2 + trace.
double residual_heat_kolmogorov(const CriticJet& jet, const HVec& x, const ProblemSpec& spec);
// Same drift/cost structure with the actor value in place of the fixed u.
double residual_heat_hjb(const CriticJet& jet, const HVec& u_val, const HVec& x,
                         const ProblemSpec& spec);
// Control eliminated at the quadratic minimizer: the <Dv,u> + lambda|u|^2
// infimum collapses to -|Dv|^2 / (4 lambda).
double residual_heat_hjb_closed(const CriticJet& jet, const HVec& x, const ProblemSpec& spec);
// -gamma v + <Dv, Ax + B(x) + u> + |(-A)^{1/2} x|^2 + lambda|u|^2 + trace.
double residual_burgers_kolmogorov(const CriticJet& jet, const HVec& x, const ProblemSpec& spec);
// Burgers with the control infimum in closed form (validation mode).
double residual_burgers_hjb_closed(const CriticJet& jet, const HVec& x, const ProblemSpec& spec);

// Spec-dispatched residual of a jet at x; uses the actor value when the
// kind requires one.
double residual_at(const CriticJet& jet, const HVec& x, const ProblemSpec& spec,
                   const ActorNet* actor);

// Fast batch path: evaluates the net directly (no Hessian materialization;
// the trace term goes through the cached quadratic form).
std::vector<double> residual_batch(const CriticNet& net, const ActorNet* actor,
                                   const ProblemSpec& spec, const std::vector<HVec>& samples);

// Internal single-sample evaluator shared with the training loop.
class ResidualEvaluator {
 public:
  ResidualEvaluator(const CriticNet& net, const ActorNet* actor, const ProblemSpec& spec);

  // Residual at x. When `pairing` is non-null it receives d(residual)/d(Dv)
  // as a length-d coefficient vector (for gradient assembly), and `u_out`
  // the actor value when one exists.
  double operator()(const HVec& x, std::vector<double>* pairing = nullptr,
                    HVec* u_out = nullptr) const;
  // Residual plus the hidden-layer tape (for gradient assembly).
  double with_tape(const HVec& x, std::optional<CriticJetParamGrad>& tape,
                   std::vector<double>& pairing, HVec* u_out = nullptr) const;

  const HessPairing* hess_pairing() const { return has_trace_ ? &hp_ : nullptr; }

 private:
  double finish(const CriticJetParamGrad& tape, const HVec& x, std::vector<double>& pairing,
                HVec* u_out) const;

  const CriticNet& net_;
  const ActorNet* actor_;
  const ProblemSpec& spec_;
  HessPairing hp_;
  bool has_trace_ = false;
};

}  // namespace dhg
