#pragma once

#include <cstdint>
#include <vector>

#include "dhg/noise.hpp"
#include "dhg/spectral.hpp"

namespace dhg {

// One-hidden-layer operator networks over the first d sine coefficients.
// The critic maps H -> R, the actor maps H -> span{e_1..e_p}. tanh is the
// only activation; its first three derivatives are available in closed form,
// which keeps every input jet and parameter gradient analytic.

struct ActDerivs {
  double m0, m1, m2, m3;
};
ActDerivs tanh_derivs(double z);

// Flat parameter buffer congruent to a net. Layout: W1 row-major
// (width x d), b1 (width), W2 row-major (p x width), b2 (p). Critics have
// p = 1 so W2 degenerates to the output weight vector.
struct ParamVector {
  std::vector<double> v;

  ParamVector() = default;
  explicit ParamVector(std::size_t n) : v(n, 0.0) {}
  std::size_t size() const { return v.size(); }
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
};

double max_abs(const ParamVector& g);
double l2_norm(const ParamVector& g);

// Scalar-output net  v(x) = w2 . tanh(W1 E_d(x) + b1) + b2.
struct CriticNet {
  std::size_t d = 0;
  std::size_t width = 0;
  std::vector<double> w1;  // width x d, row-major
  std::vector<double> b1;  // width
  std::vector<double> w2;  // width
  double b2 = 0.0;

  CriticNet() = default;
  CriticNet(std::size_t d_in, std::size_t hidden);

  std::size_t param_count() const { return width * d + width + width + 1; }
  ParamVector params() const;
  void set_params(const ParamVector& p);
};

// W1, w2 entries ~ Normal(0, 1/sqrt(fan-in)); biases zero.
CriticNet critic_init(std::size_t d, std::size_t width, std::uint64_t seed);

// Value, gradient coefficients on e_1..e_d, and the d x d Hessian block.
// Directions above d vanish identically and are represented by absence.
struct CriticJet {
  double value = 0.0;
  std::vector<double> grad;
  SymMat hess;
};

double critic_eval(const CriticNet& net, const HVec& x);
CriticJet critic_jet(const CriticNet& net, const HVec& x);
// Coefficients of Dv on e_1..e_d without forming the Hessian.
std::vector<double> critic_grad_coeffs(const CriticNet& net, const HVec& x);

ParamVector critic_param_grad_value(const CriticNet& net, const HVec& x);

// Parameter derivatives of the jet at (net, x), exposed as the actions
//   p  |-> d<p, grad>/dtheta        (p a coefficient vector of length d)
//   S  |-> d<S, hess>_F/dtheta      (S symmetric d x d)
// plus the plain value gradient. The hidden-layer tape is shared.
class CriticJetParamGrad {
 public:
  CriticJetParamGrad(const CriticNet& net, const HVec& x);

  ParamVector value_grad() const;
  ParamVector grad_pairing(const std::vector<double>& p) const;
  ParamVector hess_pairing(const SymMat& s) const;

  // out += weight * dtheta[ cv * v + <p, grad> + hess_part ], where the
  // Hessian pairing has been precomputed via HessPairing. Used by the
  // training loop; p may be empty for no gradient pairing.
  void accumulate(double cv, const std::vector<double>& p, const struct HessPairing* hp,
                  double weight, ParamVector& out) const;

  const std::vector<double>& hidden_pre() const { return z_; }
  const std::vector<double>& act0() const { return m0_; }
  const std::vector<double>& act1() const { return m1_; }
  const std::vector<double>& act2() const { return m2_; }
  double value() const { return value_; }

 private:
  const CriticNet& net_;
  std::vector<double> x_;  // first d coefficients of the input
  std::vector<double> z_, m0_, m1_, m2_, m3_;
  double value_ = 0.0;
};

// Sample-independent pieces of the <S, hess> pairing for fixed (net, S):
// q_k = (W1 S W1^T)_kk and G2 = 2 W1 S. Rebuilt whenever W1 changes.
struct HessPairing {
  std::vector<double> q;   // width
  std::vector<double> g2;  // width x d, row-major
};
HessPairing make_hess_pairing(const CriticNet& net, const SymMat& s);

// Vector-output net  u(x) = sum_j [W2 tanh(W1 E_d(x) + b1) + b2]_j e_j.
struct ActorNet {
  std::size_t d = 0;
  std::size_t p = 0;
  std::size_t width = 0;
  std::vector<double> w1;  // width x d
  std::vector<double> b1;  // width
  std::vector<double> w2;  // p x width
  std::vector<double> b2;  // p

  ActorNet() = default;
  ActorNet(std::size_t d_in, std::size_t p_out, std::size_t hidden);

  std::size_t param_count() const { return width * d + width + p * width + p; }
  ParamVector params() const;
  void set_params(const ParamVector& p_in);
};

ActorNet actor_init(std::size_t d, std::size_t p, std::size_t width, std::uint64_t seed);

HVec actor_eval(const ActorNet& net, const HVec& x);

// dphi <w, u(x)> for a coefficient vector w (only the first p entries act).
ParamVector actor_param_grad(const ActorNet& net, const HVec& x, const HVec& w);
void actor_accumulate_pairing(const ActorNet& net, const HVec& x, const HVec& w, double weight,
                              ParamVector& out);

// Checkpoint serialization (.hgno). Little-endian header
//   magic "HGNO", u32 version, u8 kind (1 critic / 2 actor),
//   u8 activation id (1 = tanh), u16 reserved, u32 d, u32 width, u32 p,
// followed by the f64 parameter payload in ParamVector order.
std::vector<std::uint8_t> serialize(const CriticNet& net);
std::vector<std::uint8_t> serialize(const ActorNet& net);
CriticNet deserialize_critic(const std::vector<std::uint8_t>& bytes);
ActorNet deserialize_actor(const std::vector<std::uint8_t>& bytes);

}  // namespace dhg
