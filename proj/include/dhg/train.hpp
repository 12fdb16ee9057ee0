#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dhg/hgno.hpp"
#include "dhg/measures.hpp"
#include "dhg/residual.hpp"

namespace dhg {

enum class GradientKind { kDhgm, kQhpde };

GradientKind gradient_kind_from_string(const std::string& s);
std::string to_string(GradientKind k);

// Rate c / (offset + t^e); the experiments fix offset = 20.
struct LrSchedule {
  double c = 0.05;
  double exponent = 0.5;
  double offset = 20.0;
};
double lr(std::size_t t, const LrSchedule& schedule);

// Bias-corrected adaptive moment estimation. `grad` is a descent direction:
// the scaled update is ADDED to the parameters.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void optimizer_step(AdamState& state, std::vector<double>& params, const ParamVector& grad,
                    double rate);

// Training gradients. All three return the descent direction to be added
// after optimizer scaling; the negative signs written into the batch
// averages live here and nowhere else.
//
//   DHGM:   G = -(1/M) sum_m F(x_m) * dtheta F(x_m)
//   QHPDE:  G = -(1/M) sum_m F(x_m) * dtheta(-v(x_m))
//   actor:  G = -(1/M) sum_m dphi F^cv(x_m)
//             = -(1/M) sum_m dphi <P_p Dv(x_m) + 2 lambda u(x_m), u(x_m)>
ParamVector grad_dhgm(const CriticNet& net, const ActorNet* actor, const ProblemSpec& spec,
                      const std::vector<HVec>& batch);
ParamVector grad_qhpde(const CriticNet& net, const ActorNet* actor, const ProblemSpec& spec,
                       const std::vector<HVec>& batch);
ParamVector grad_actor(const CriticNet& critic, const ActorNet& actor, const ProblemSpec& spec,
                       const std::vector<HVec>& batch);

struct TrainConfig {
  GradientKind gradient = GradientKind::kQhpde;
  std::size_t iterations = 0;
  std::size_t batch = 256;
  ProblemSpec problem;
  GaussianMeasure mu;
  std::size_t width = 64;
  std::size_t p = 0;  // actor decoder dim; 0 means p = d
  LrSchedule alpha{0.05, 0.5, 20.0};
  LrSchedule beta{0.05, 0.75, 20.0};
  std::uint64_t seed = 1;
  std::size_t eval_every = 1000;
  std::size_t eval_batch = 1000;
  std::size_t checkpoint_every = 0;  // 0 = none
  std::string out_dir;               // empty = keep everything in memory
  std::vector<std::pair<std::string, HVec>> probes;

  // Resume state; leave empty for a fresh run.
  std::size_t start_iteration = 0;
  std::optional<CriticNet> init_critic;
  std::optional<ActorNet> init_actor;
  std::optional<AdamState> init_critic_opt;
  std::optional<AdamState> init_actor_opt;
};

struct TrainLogRow {
  std::size_t iteration = 0;
  double wallclock_s = 0.0;
  double lr_value = 0.0;
  double residual_l2 = 0.0;
  double grad_norm = 0.0;
  double actor_rmse = -1.0;  // < 0 when not tracked
  std::vector<double> probe_values;
};

struct TrainResult {
  CriticNet critic;
  std::optional<ActorNet> actor;
  AdamState critic_opt;
  std::optional<AdamState> actor_opt;
  std::vector<TrainLogRow> log;
};

// Algorithm: sample -> gradient -> update, T iterations, fixed control.
TrainResult train_critic(const TrainConfig& config);
// Alternating critic/actor phases with fresh samples per phase.
TrainResult train_actor_critic(const TrainConfig& config);

// Optimizer-state sidecar (.opt) serialization.
std::vector<std::uint8_t> serialize(const AdamState& state);
AdamState deserialize_adam(const std::vector<std::uint8_t>& bytes);

}  // namespace dhg
