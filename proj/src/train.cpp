#include "dhg/train.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dhg/oracle.hpp"
#include "dhg/rng.hpp"

namespace dhg {

GradientKind gradient_kind_from_string(const std::string& s) {
  if (s == "dhgm") return GradientKind::kDhgm;
  if (s == "qhpde") return GradientKind::kQhpde;
  throw ConfigError("gradient: expected 'dhgm' or 'qhpde', got '" + s + "'");
}

std::string to_string(GradientKind k) {
  return k == GradientKind::kDhgm ? "dhgm" : "qhpde";
}

double lr(std::size_t t, const LrSchedule& schedule) {
  return schedule.c / (schedule.offset + std::pow(static_cast<double>(t), schedule.exponent));
}

void optimizer_step(AdamState& state, std::vector<double>& params, const ParamVector& grad,
                    double rate) {
  if (state.m.size() != params.size() || grad.size() != params.size()) {
    throw ShapeError("optimizer_step: accumulator/parameter shape mismatch");
  }
  for (double g : grad.v) {
    if (!std::isfinite(g)) {
      throw DivergedError("optimizer_step: non-finite gradient at step " +
                          std::to_string(state.step + 1));
    }
  }
  state.step += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double mh = state.m[i] / c1;
    const double vh = state.v[i] / c2;
    params[i] += rate * mh / (std::sqrt(vh) + state.eps);
  }
}

namespace {

void check_residual_magnitude(double r) {
  if (!(std::fabs(r) <= 1e9)) {
    throw DivergedError("training: |residual| exceeded 1e9");
  }
}

// Adam moves parameters as a flat vector; nets expose them per layer.
struct CriticParamsView {
  explicit CriticParamsView(CriticNet& net) : net_(net), flat_(net.params().v) {}
  std::vector<double>& flat() { return flat_; }
  void push() {
    ParamVector p;
    p.v = flat_;
    net_.set_params(p);
  }
  CriticNet& net_;
  std::vector<double> flat_;
};

struct ActorParamsView {
  explicit ActorParamsView(ActorNet& net) : net_(net), flat_(net.params().v) {}
  std::vector<double>& flat() { return flat_; }
  void push() {
    ParamVector p;
    p.v = flat_;
    net_.set_params(p);
  }
  ActorNet& net_;
  std::vector<double> flat_;
};

}  // namespace

ParamVector grad_dhgm(const CriticNet& net, const ActorNet* actor, const ProblemSpec& spec,
                      const std::vector<HVec>& batch) {
  if (batch.empty()) throw ConfigError("grad_dhgm: batch must be nonempty");
  ResidualEvaluator eval(net, actor, spec);
  ParamVector g(net.param_count());
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  std::optional<CriticJetParamGrad> tape;
  std::vector<double> pairing;
  for (const HVec& x : batch) {
    const double r = eval.with_tape(x, tape, pairing);
    check_residual_magnitude(r);
    // dtheta F = -gamma dv + d<pairing, grad> + d(trace); weight -r/M.
    tape->accumulate(-spec.gamma, pairing, eval.hess_pairing(), -r * inv_m, g);
  }
  return g;
}

ParamVector grad_qhpde(const CriticNet& net, const ActorNet* actor, const ProblemSpec& spec,
                       const std::vector<HVec>& batch) {
  if (batch.empty()) throw ConfigError("grad_qhpde: batch must be nonempty");
  ResidualEvaluator eval(net, actor, spec);
  ParamVector g(net.param_count());
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  std::optional<CriticJetParamGrad> tape;
  std::vector<double> pairing;
  for (const HVec& x : batch) {
    const double r = eval.with_tape(x, tape, pairing);
    check_residual_magnitude(r);
    // -r * dtheta(-v) = +r * dtheta v.
    tape->accumulate(1.0, {}, nullptr, r * inv_m, g);
  }
  return g;
}

ParamVector grad_actor(const CriticNet& critic, const ActorNet& actor, const ProblemSpec& spec,
                       const std::vector<HVec>& batch) {
  if (spec.kind != ProblemKind::kHeatHjb) {
    throw ConfigError("grad_actor: spec kind must be heat HJB");
  }
  if (batch.empty()) throw ConfigError("grad_actor: batch must be nonempty");
  ParamVector g(actor.param_count());
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (const HVec& x : batch) {
    const std::vector<double> dv = critic_grad_coeffs(critic, x);
    const HVec u = actor_eval(actor, x);
    HVec w(actor.p);
    const std::size_t m = std::min(actor.p, dv.size());
    for (std::size_t j = 0; j < actor.p; ++j) {
      w[j] = (j < m ? dv[j] : 0.0) + 2.0 * spec.lambda * u[j];
    }
    actor_accumulate_pairing(actor, x, w, -inv_m, g);
  }
  return g;
}

namespace {

class ArtifactWriter {
 public:
  ArtifactWriter(const TrainConfig& config, bool has_actor)
      : out_dir_(config.out_dir), has_actor_(has_actor) {
    if (out_dir_.empty()) return;
    std::filesystem::create_directories(out_dir_);
    log_.open(out_dir_ + "/log.csv",
              config.start_iteration == 0 ? std::ios::trunc : std::ios::app);
    if (config.start_iteration == 0) {
      log_ << "iteration,wallclock_s,lr,residual_l2_estimate,grad_norm";
      if (has_actor_) log_ << ",actor_rmse";
      for (const auto& probe : config.probes) log_ << ",value_" << probe.first;
      log_ << "\n";
    }
  }

  void row(const TrainLogRow& r) {
    if (!log_.is_open()) return;
    log_.precision(12);
    log_ << r.iteration << ',' << r.wallclock_s << ',' << r.lr_value << ',' << r.residual_l2
         << ',' << r.grad_norm;
    if (has_actor_) log_ << ',' << r.actor_rmse;
    for (double v : r.probe_values) log_ << ',' << v;
    log_ << "\n";
    log_.flush();
  }

  void checkpoint(const std::string& stem, const std::vector<std::uint8_t>& bytes) {
    if (out_dir_.empty()) return;
    std::ofstream f(out_dir_ + "/" + stem, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  }

 private:
  std::string out_dir_;
  bool has_actor_ = false;
  std::ofstream log_;
};

std::string checkpoint_stem(std::size_t iteration) {
  std::ostringstream os;
  os << "ckpt_" << iteration;
  return os.str();
}

// Shared loop. `with_actor` selects Algorithm 2's two-phase iteration.
TrainResult run_training(const TrainConfig& config, bool with_actor) {
  const ProblemSpec& spec = config.problem;
  if (config.mu.modes() != spec.n_modes) {
    throw ConfigError("train: measure truncation != problem N");
  }
  if (with_actor && spec.kind != ProblemKind::kHeatHjb) {
    throw ConfigError("train: actor-critic needs the heat HJB problem kind");
  }

  TrainResult result;
  result.critic = config.init_critic.has_value()
                      ? *config.init_critic
                      : critic_init(spec.d, config.width, config.seed);
  if (result.critic.d != spec.d) throw ConfigError("train: checkpoint d != problem d");
  const std::size_t p = config.p == 0 ? spec.d : config.p;
  if (with_actor) {
    result.actor = config.init_actor.has_value()
                       ? *config.init_actor
                       : actor_init(spec.d, p, config.width, config.seed);
  }
  result.critic_opt = config.init_critic_opt.has_value()
                          ? *config.init_critic_opt
                          : AdamState(result.critic.param_count());
  if (with_actor) {
    result.actor_opt = config.init_actor_opt.has_value()
                           ? *config.init_actor_opt
                           : AdamState(result.actor->param_count());
  }

  // Held-out evaluation batch, fixed across the run.
  const std::vector<HVec> holdout =
      sample(config.mu, config.eval_batch, config.seed, streams::kHoldout, 0);

  // Oracle control for the actor progress column (heat problems only).
  std::optional<LQSolution> control_oracle;
  if (with_actor) {
    control_oracle = lq_solve(spec.gamma, spec.lambda, spec.xbar,
                              spec.noise.mode_variances(spec.n_modes), spec.n_modes);
  }

  ArtifactWriter artifacts(config, with_actor);
  const auto t0 = std::chrono::steady_clock::now();

  CriticParamsView critic_params(result.critic);
  std::optional<ActorParamsView> actor_params;
  if (with_actor) actor_params.emplace(*result.actor);

  double last_grad_norm = 0.0;
  const std::size_t batch_size = config.batch;

  auto log_state = [&](std::size_t iteration) {
    TrainLogRow row;
    row.iteration = iteration;
    row.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.lr_value = lr(iteration, config.alpha);
    const ActorNet* actor_ptr = with_actor ? &*result.actor : nullptr;
    const std::vector<double> res = residual_batch(result.critic, actor_ptr, spec, holdout);
    double acc = 0.0;
    for (double r : res) acc += r * r;
    row.residual_l2 = std::sqrt(acc / static_cast<double>(res.size()));
    row.grad_norm = last_grad_norm;
    if (with_actor) {
      double err = 0.0;
      for (const HVec& x : holdout) {
        const HVec u = actor_eval(*result.actor, x);
        const HVec ustar = control_oracle->control(x);
        err += inner(sub(u, ustar), sub(u, ustar));
      }
      row.actor_rmse = std::sqrt(err / static_cast<double>(holdout.size()));
    }
    for (const auto& probe : config.probes) {
      row.probe_values.push_back(critic_eval(result.critic, probe.second));
    }
    result.log.push_back(row);
    artifacts.row(row);
  };

  for (std::size_t t = config.start_iteration; t < config.iterations; ++t) {
    // Critic phase.
    {
      const std::vector<HVec> batch =
          sample(config.mu, batch_size, config.seed, streams::kCriticBatch,
                 static_cast<std::uint64_t>(t) * batch_size);
      const ActorNet* actor_ptr = with_actor ? &*result.actor : nullptr;
      try {
        ParamVector g = (config.gradient == GradientKind::kDhgm)
                            ? grad_dhgm(result.critic, actor_ptr, spec, batch)
                            : grad_qhpde(result.critic, actor_ptr, spec, batch);
        last_grad_norm = l2_norm(g);
        optimizer_step(result.critic_opt, critic_params.flat(), g, lr(t, config.alpha));
      } catch (const DivergedError& e) {
        throw DivergedError(std::string(e.what()) + " (critic iteration " + std::to_string(t) +
                            ")");
      }
      critic_params.push();
    }
    // Actor phase.
    if (with_actor) {
      const std::vector<HVec> batch =
          sample(config.mu, batch_size, config.seed, streams::kActorBatch,
                 static_cast<std::uint64_t>(t) * batch_size);
      try {
        ParamVector g = grad_actor(result.critic, *result.actor, spec, batch);
        optimizer_step(*result.actor_opt, actor_params->flat(), g, lr(t, config.beta));
      } catch (const DivergedError& e) {
        throw DivergedError(std::string(e.what()) + " (actor iteration " + std::to_string(t) +
                            ")");
      }
      actor_params->push();
    }

    const std::size_t done = t + 1;
    if (config.eval_every > 0 &&
        (done % config.eval_every == 0 || done == config.iterations)) {
      log_state(done);
    }
    if (config.checkpoint_every > 0 && done % config.checkpoint_every == 0 &&
        done != config.iterations) {
      artifacts.checkpoint(checkpoint_stem(done) + ".hgno", serialize(result.critic));
      artifacts.checkpoint(checkpoint_stem(done) + ".opt", serialize(result.critic_opt));
      if (with_actor) {
        artifacts.checkpoint(checkpoint_stem(done) + "_actor.hgno", serialize(*result.actor));
        artifacts.checkpoint(checkpoint_stem(done) + "_actor.opt", serialize(*result.actor_opt));
      }
    }
  }
  if (config.iterations == config.start_iteration && config.eval_every > 0 &&
      result.log.empty()) {
    log_state(config.iterations);
  }

  artifacts.checkpoint("final.hgno", serialize(result.critic));
  artifacts.checkpoint("final.opt", serialize(result.critic_opt));
  if (with_actor) {
    artifacts.checkpoint("final_actor.hgno", serialize(*result.actor));
    artifacts.checkpoint("final_actor.opt", serialize(*result.actor_opt));
  }
  return result;
}

}  // namespace

TrainResult train_critic(const TrainConfig& config) { return run_training(config, false); }

TrainResult train_actor_critic(const TrainConfig& config) { return run_training(config, true); }

std::vector<std::uint8_t> serialize(const AdamState& state) {
  std::vector<std::uint8_t> out;
  out.push_back('H');
  out.push_back('G');
  out.push_back('O');
  out.push_back('P');
  auto put_u64 = [&out](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  };
  auto put_f64 = [&out, &put_u64](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, 8);
    put_u64(bits);
  };
  put_u64(state.step);
  put_u64(state.m.size());
  put_f64(state.beta1);
  put_f64(state.beta2);
  put_f64(state.eps);
  for (double x : state.m) put_f64(x);
  for (double x : state.v) put_f64(x);
  return out;
}

AdamState deserialize_adam(const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 0;
  auto get_u64 = [&bytes, &pos]() {
    if (pos + 8 > bytes.size()) throw FormatError("optimizer state: truncated stream");
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * b);
    return v;
  };
  auto get_f64 = [&get_u64]() {
    const std::uint64_t bits = get_u64();
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
  };
  if (bytes.size() < 4 || bytes[0] != 'H' || bytes[1] != 'G' || bytes[2] != 'O' ||
      bytes[3] != 'P') {
    throw FormatError("optimizer state: bad magic");
  }
  pos = 4;
  AdamState state;
  state.step = get_u64();
  const std::uint64_t n = get_u64();
  state.beta1 = get_f64();
  state.beta2 = get_f64();
  state.eps = get_f64();
  state.m.resize(n);
  state.v.resize(n);
  for (double& x : state.m) x = get_f64();
  for (double& x : state.v) x = get_f64();
  if (pos != bytes.size()) throw FormatError("optimizer state: trailing bytes");
  return state;
}

}  // namespace dhg
