#include "dhg/residual.hpp"

#include <algorithm>
#include <cmath>

namespace dhg {

ProblemSpec make_problem(ProblemKind kind, double gamma, double lambda, const HVec& xbar,
                         NoiseModel noise, const HVec& fixed_control, std::size_t d,
                         std::size_t n_modes) {
  if (!(gamma > 0.0)) throw DomainError("make_problem: gamma must be positive");
  if (!(lambda > 0.0)) throw DomainError("make_problem: lambda must be positive");
  if (d < 1 || d > n_modes) throw ConfigError("make_problem: need 1 <= d <= N");
  ProblemSpec spec;
  spec.kind = kind;
  spec.gamma = gamma;
  spec.lambda = lambda;
  spec.xbar = xbar;
  spec.xbar.coeffs.resize(n_modes, 0.0);
  spec.noise = std::move(noise);
  spec.fixed_control = fixed_control;
  if (spec.fixed_control.modes() > 0) spec.fixed_control.coeffs.resize(n_modes, 0.0);
  spec.d = d;
  spec.n_modes = n_modes;
  spec.trace_quad = spec.noise.trace_quad_form(d);
  return spec;
}

ProblemSpec problem_preset(const std::string& name, std::size_t d, std::size_t n_modes,
                           bool hjb) {
  NoiseModel noise;
  ProblemKind kind;
  if (name == "heat-tcc") {
    noise = NoiseModel::trace_class(n_modes);
    kind = hjb ? ProblemKind::kHeatHjb : ProblemKind::kHeatKolmogorov;
  } else if (name == "heat-1d") {
    noise = NoiseModel::rank_one(n_modes);
    kind = hjb ? ProblemKind::kHeatHjb : ProblemKind::kHeatKolmogorov;
  } else if (name == "heat-det") {
    noise = NoiseModel::none();
    kind = hjb ? ProblemKind::kHeatHjb : ProblemKind::kHeatKolmogorov;
  } else if (name == "burgers-1d") {
    noise = NoiseModel::rank_one(n_modes);
    kind = ProblemKind::kBurgersKolmogorov;
  } else if (name == "burgers-det") {
    noise = NoiseModel::none();
    kind = ProblemKind::kBurgersKolmogorov;
  } else {
    throw ConfigError("problem_preset: unknown preset '" + name + "'");
  }
  ProblemSpec spec =
      make_problem(kind, 1.0, 1.0, HVec(n_modes), std::move(noise), HVec(), d, n_modes);
  spec.preset = name;
  return spec;
}

GaussianMeasure preset_measure(const std::string& name, std::size_t n_modes) {
  if (name == "heat-tcc" || name == "heat-det") return stationary_tcc(n_modes);
  if (name == "heat-1d") return stationary_wn(n_modes);
  if (name == "burgers-1d" || name == "burgers-det") return burgers_training_measure(n_modes);
  throw ConfigError("preset_measure: unknown preset '" + name + "'");
}

double trace_term(const CriticJet& jet, const NoiseModel& noise) {
  if (noise.empty()) return 0.0;
  const std::size_t d = jet.grad.size();
  double total = 0.0;
  for (const HVec& col : noise.columns) {
    const std::size_t m = std::min(d, col.modes());
    double quad = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = &jet.hess.a[i * jet.hess.n];
      double hs = 0.0;
      for (std::size_t j = 0; j < m; ++j) hs += row[j] * col[j];
      quad += col[i] * hs;
    }
    total += quad;
  }
  return 0.5 * total;
}

namespace {

void check_sample(const CriticJet& jet, const HVec& x) {
  if (x.modes() < jet.grad.size()) {
    throw ShapeError("residual: sample has fewer modes than the critic encoder");
  }
}

double drift_pairing_heat(const CriticJet& jet, const HVec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < jet.grad.size(); ++i) {
    s -= basis_eigenvalue(i + 1) * jet.grad[i] * x[i];
  }
  return s;
}

double state_cost(const HVec& x, const ProblemSpec& spec) {
  double s = 0.0;
  for (std::size_t i = 0; i < spec.n_modes; ++i) {
    const double xi = i < x.modes() ? x[i] : 0.0;
    const double diff = xi - spec.xbar[i];
    s += diff * diff;
  }
  return s;
}

double control_terms(const CriticJet& jet, const HVec& u, double lambda) {
  double s = 0.0;
  const std::size_t m = std::min(jet.grad.size(), u.modes());
  for (std::size_t i = 0; i < m; ++i) s += jet.grad[i] * u[i];
  for (std::size_t i = 0; i < u.modes(); ++i) s += lambda * u[i] * u[i];
  return s;
}

double grad_sq(const CriticJet& jet) {
  double s = 0.0;
  for (double g : jet.grad) s += g * g;
  return s;
}

}  // namespace

double residual_heat_kolmogorov(const CriticJet& jet, const HVec& x, const ProblemSpec& spec) {
  check_sample(jet, x);
  double res = -spec.gamma * jet.value + drift_pairing_heat(jet, x) + state_cost(x, spec) +
               trace_term(jet, spec.noise);
  if (spec.fixed_control.modes() > 0) res += control_terms(jet, spec.fixed_control, spec.lambda);
  return res;
}

double residual_heat_hjb(const CriticJet& jet, const HVec& u_val, const HVec& x,
                         const ProblemSpec& spec) {
  check_sample(jet, x);
  return -spec.gamma * jet.value + drift_pairing_heat(jet, x) +
         control_terms(jet, u_val, spec.lambda) + state_cost(x, spec) +
         trace_term(jet, spec.noise);
}

double residual_heat_hjb_closed(const CriticJet& jet, const HVec& x, const ProblemSpec& spec) {
  check_sample(jet, x);
  return -spec.gamma * jet.value + drift_pairing_heat(jet, x) -
         grad_sq(jet) / (4.0 * spec.lambda) + state_cost(x, spec) +
         trace_term(jet, spec.noise);
}

double residual_burgers_kolmogorov(const CriticJet& jet, const HVec& x,
                                   const ProblemSpec& spec) {
  check_sample(jet, x);
  const HVec bx = burgers_B(x);
  double s = 0.0;
  for (std::size_t i = 0; i < jet.grad.size(); ++i) s += jet.grad[i] * bx[i];
  double res = -spec.gamma * jet.value + drift_pairing_heat(jet, x) + s + dirichlet_energy(x) +
               trace_term(jet, spec.noise);
  if (spec.fixed_control.modes() > 0) res += control_terms(jet, spec.fixed_control, spec.lambda);
  return res;
}

double residual_burgers_hjb_closed(const CriticJet& jet, const HVec& x,
                                   const ProblemSpec& spec) {
  check_sample(jet, x);
  const HVec bx = burgers_B(x);
  double s = 0.0;
  for (std::size_t i = 0; i < jet.grad.size(); ++i) s += jet.grad[i] * bx[i];
  return -spec.gamma * jet.value + drift_pairing_heat(jet, x) + s -
         grad_sq(jet) / (4.0 * spec.lambda) + dirichlet_energy(x) +
         trace_term(jet, spec.noise);
}

double residual_at(const CriticJet& jet, const HVec& x, const ProblemSpec& spec,
                   const ActorNet* actor) {
  switch (spec.kind) {
    case ProblemKind::kHeatKolmogorov:
      return residual_heat_kolmogorov(jet, x, spec);
    case ProblemKind::kHeatHjb:
      if (actor != nullptr) return residual_heat_hjb(jet, actor_eval(*actor, x), x, spec);
      return residual_heat_hjb_closed(jet, x, spec);
    case ProblemKind::kBurgersKolmogorov:
      return residual_burgers_kolmogorov(jet, x, spec);
  }
  throw ConfigError("residual_at: unknown problem kind");
}

ResidualEvaluator::ResidualEvaluator(const CriticNet& net, const ActorNet* actor,
                                     const ProblemSpec& spec)
    : net_(net), actor_(actor), spec_(spec) {
  if (net.d != spec.d) throw ShapeError("ResidualEvaluator: net encoder dim != spec.d");
  if (!spec.noise.empty()) {
    hp_ = make_hess_pairing(net, spec.trace_quad);
    has_trace_ = true;
  }
  if (actor_ != nullptr && spec.kind != ProblemKind::kHeatHjb) {
    throw ConfigError("ResidualEvaluator: an actor requires the heat HJB kind");
  }
}

double ResidualEvaluator::operator()(const HVec& x, std::vector<double>* pairing,
                                     HVec* u_out) const {
  CriticJetParamGrad tape(net_, x);
  std::vector<double> p;
  const double r = finish(tape, x, p, u_out);
  if (pairing != nullptr) *pairing = std::move(p);
  return r;
}

double ResidualEvaluator::with_tape(const HVec& x, std::optional<CriticJetParamGrad>& tape,
                                    std::vector<double>& pairing, HVec* u_out) const {
  tape.emplace(net_, x);
  return finish(*tape, x, pairing, u_out);
}

double ResidualEvaluator::finish(const CriticJetParamGrad& tape, const HVec& x,
                                 std::vector<double>& pairing, HVec* u_out) const {
  const std::size_t d = net_.d;
  if (x.modes() < spec_.n_modes) {
    throw ShapeError("ResidualEvaluator: sample truncated below the spec's N");
  }

  // Dv coefficients: grad = W1^T (w2 . m1).
  std::vector<double> grad(d, 0.0);
  for (std::size_t k = 0; k < net_.width; ++k) {
    const double c = net_.w2[k] * tape.act1()[k];
    if (c == 0.0) continue;
    const double* row = &net_.w1[k * d];
    for (std::size_t i = 0; i < d; ++i) grad[i] += c * row[i];
  }

  // Drift over the first d modes and the state cost.
  pairing.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) pairing[i] = -basis_eigenvalue(i + 1) * x[i];
  double cost;
  if (spec_.burgers()) {
    const HVec bx = burgers_B(x);
    for (std::size_t i = 0; i < d; ++i) pairing[i] += bx[i];
    cost = dirichlet_energy(x);
  } else {
    cost = state_cost(x, spec_);
  }
  double drift_dot = 0.0;
  for (std::size_t i = 0; i < d; ++i) drift_dot += grad[i] * pairing[i];

  // Control contribution. `pairing` ends up as d(residual)/d(grad).
  double control_part = 0.0;
  if (spec_.kind == ProblemKind::kHeatHjb && actor_ == nullptr) {
    // Closed-form infimum: value part -|g|^2/(4 lambda), derivative part
    // -g/(2 lambda).
    double g2 = 0.0;
    for (double g : grad) g2 += g * g;
    control_part = -g2 / (4.0 * spec_.lambda);
    for (std::size_t i = 0; i < d; ++i) pairing[i] -= grad[i] / (2.0 * spec_.lambda);
  } else {
    const HVec* u = nullptr;
    HVec actor_u;
    if (spec_.kind == ProblemKind::kHeatHjb) {
      actor_u = actor_eval(*actor_, x);
      u = &actor_u;
    } else if (spec_.fixed_control.modes() > 0) {
      u = &spec_.fixed_control;
    }
    if (u != nullptr) {
      const std::size_t m = std::min(d, u->modes());
      for (std::size_t i = 0; i < m; ++i) {
        control_part += grad[i] * (*u)[i];
        pairing[i] += (*u)[i];
      }
      double usq = 0.0;
      for (std::size_t i = 0; i < u->modes(); ++i) usq += (*u)[i] * (*u)[i];
      control_part += spec_.lambda * usq;
      if (u_out != nullptr) *u_out = *u;
    }
  }

  double trace = 0.0;
  if (has_trace_) {
    for (std::size_t k = 0; k < net_.width; ++k) {
      trace += net_.w2[k] * tape.act2()[k] * hp_.q[k];
    }
  }

  return -spec_.gamma * tape.value() + drift_dot + control_part + cost + trace;
}

std::vector<double> residual_batch(const CriticNet& net, const ActorNet* actor,
                                   const ProblemSpec& spec, const std::vector<HVec>& samples) {
  ResidualEvaluator eval(net, actor, spec);
  std::vector<double> out;
  out.reserve(samples.size());
  for (const HVec& x : samples) out.push_back(eval(x));
  return out;
}

}  // namespace dhg
