#include <doctest.h>

#include <cmath>
#include <functional>

#include "dhg/hgno.hpp"
#include "dhg/measures.hpp"

using namespace dhg;

namespace {

// Central finite differences of a scalar in parameter space.
template <typename Net>
ParamVector fd_param_grad(const Net& net, const std::function<double(const Net&)>& f,
                          double h = 1e-5) {
  ParamVector base = net.params();
  ParamVector g(base.size());
  Net work = net;
  for (std::size_t i = 0; i < base.size(); ++i) {
    ParamVector p = base;
    p[i] = base[i] + h;
    work.set_params(p);
    const double up = f(work);
    p[i] = base[i] - h;
    work.set_params(p);
    const double down = f(work);
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double rel_err(const ParamVector& a, const ParamVector& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

CriticNet tiny_critic() {
  CriticNet net(1, 1);
  net.w1 = {1.0};
  net.b1 = {0.0};
  net.w2 = {1.0};
  net.b2 = 0.0;
  return net;
}

HVec random_point(std::size_t n_modes, std::uint64_t index) {
  const GaussianMeasure mu = stationary_wn(n_modes);
  return sample_one(mu, 123, streams::kSample, index);
}

}  // namespace

TEST_CASE("tanh derivative closed forms") {
  for (double z : {-1.3, -0.2, 0.0, 0.7, 2.1}) {
    const ActDerivs a = tanh_derivs(z);
    const double h = 1e-5;
    CHECK(a.m1 == doctest::Approx((std::tanh(z + h) - std::tanh(z - h)) / (2 * h)).epsilon(1e-8));
    CHECK(a.m2 ==
          doctest::Approx((tanh_derivs(z + h).m1 - tanh_derivs(z - h).m1) / (2 * h)).epsilon(1e-7));
    CHECK(a.m3 ==
          doctest::Approx((tanh_derivs(z + h).m2 - tanh_derivs(z - h).m2) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("critic_eval basics") {
  CriticNet zero(3, 4);
  CHECK(critic_eval(zero, HVec(5)) == 0.0);
  CHECK(critic_eval(zero, random_point(5, 0)) == 0.0);

  CriticNet unit(3, 1);
  unit.w2 = {1.0};
  CHECK(critic_eval(unit, random_point(5, 1)) == 0.0);  // tanh(0) = 0

  const CriticNet t = tiny_critic();
  CHECK(critic_eval(t, HVec(std::vector<double>{0.5})) == doctest::Approx(std::tanh(0.5)));

  CHECK_THROWS_AS(critic_eval(t, HVec(0)), ShapeError);
}

TEST_CASE("encoder locality: value depends only on the first d coefficients") {
  const CriticNet net = critic_init(4, 8, 5);
  HVec x = random_point(10, 2);
  HVec y = x;
  y[7] += 3.0;
  y[9] -= 1.0;
  CHECK(critic_eval(net, x) == critic_eval(net, y));
}

TEST_CASE("critic_jet closed forms and symmetry") {
  CriticNet zero(2, 3);
  const CriticJet zj = critic_jet(zero, HVec(4));
  CHECK(zj.value == 0.0);
  for (double g : zj.grad) CHECK(g == 0.0);
  for (double h : zj.hess.a) CHECK(h == 0.0);

  const CriticNet t = tiny_critic();
  const CriticJet tj = critic_jet(t, HVec(1));
  CHECK(tj.value == 0.0);
  CHECK(tj.grad[0] == doctest::Approx(1.0));  // tanh'(0) = 1
  CHECK(tj.hess.at(0, 0) == doctest::Approx(0.0));

  const CriticNet net = critic_init(5, 9, 17);
  const HVec x = random_point(8, 3);
  const CriticJet jet = critic_jet(net, x);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) CHECK(jet.hess.at(i, j) == jet.hess.at(j, i));
  }
}

TEST_CASE("jet consistency against input-space finite differences") {
  const CriticNet net = critic_init(4, 8, 21);
  const HVec x = random_point(6, 4);
  const CriticJet jet = critic_jet(net, x);
  const double h = 1e-5;
  for (std::size_t i = 0; i < 4; ++i) {
    HVec up = x, down = x;
    up[i] += h;
    down[i] -= h;
    const double fd = (critic_eval(net, up) - critic_eval(net, down)) / (2 * h);
    CHECK(std::fabs(jet.grad[i] - fd) < 1e-6 * std::max(1.0, std::fabs(fd)));
    const CriticJet jup = critic_jet(net, up);
    const CriticJet jdown = critic_jet(net, down);
    for (std::size_t j = 0; j < 4; ++j) {
      const double fd2 = (jup.grad[j] - jdown.grad[j]) / (2 * h);
      CHECK(std::fabs(jet.hess.at(i, j) - fd2) < 1e-6 * std::max(1.0, std::fabs(fd2)));
    }
  }
}

TEST_CASE("critic_param_grad_value") {
  const CriticNet net = critic_init(3, 6, 33);
  const HVec x = random_point(5, 5);
  const ParamVector g = critic_param_grad_value(net, x);

  // Output bias derivative is 1; w2_k derivative is tanh(z_k).
  CHECK(g[g.size() - 1] == doctest::Approx(1.0));
  const CriticJetParamGrad tape(net, x);
  const std::size_t w2_offset = net.width * net.d + net.width;
  for (std::size_t k = 0; k < net.width; ++k) {
    CHECK(g[w2_offset + k] == doctest::Approx(tape.act0()[k]));
  }

  const ParamVector fd = fd_param_grad<CriticNet>(
      net, [&x](const CriticNet& n) { return critic_eval(n, x); });
  CHECK(rel_err(g, fd) < 1e-6);
}

TEST_CASE("jet parameter gradients: pairing actions match finite differences") {
  const CriticNet net = critic_init(2, 3, 44);
  const HVec x = random_point(4, 6);
  const CriticJetParamGrad tape(net, x);

  // Zero pairings give zero vectors.
  const ParamVector zp = tape.grad_pairing(std::vector<double>(2, 0.0));
  CHECK(l2_norm(zp) == 0.0);
  const ParamVector zs = tape.hess_pairing(SymMat(2));
  CHECK(l2_norm(zs) == 0.0);

  // <p, grad> against finite differences.
  const std::vector<double> p = {0.7, -1.3};
  const ParamVector gp = tape.grad_pairing(p);
  const ParamVector gp_fd = fd_param_grad<CriticNet>(net, [&](const CriticNet& n) {
    const CriticJet jet = critic_jet(n, x);
    return p[0] * jet.grad[0] + p[1] * jet.grad[1];
  });
  CHECK(rel_err(gp, gp_fd) < 1e-5);

  // Trace-weighted Hessian pairing against finite differences.
  SymMat s(2);
  s.at(0, 0) = 0.8;
  s.at(1, 1) = 0.3;
  s.at(0, 1) = s.at(1, 0) = -0.2;
  const ParamVector gs = tape.hess_pairing(s);
  const ParamVector gs_fd = fd_param_grad<CriticNet>(net, [&](const CriticNet& n) {
    const CriticJet jet = critic_jet(n, x);
    double acc = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) acc += s.at(i, j) * jet.hess.at(i, j);
    }
    return acc;
  });
  CHECK(rel_err(gs, gs_fd) < 1e-5);

  // Combined accumulate equals the sum of the parts.
  ParamVector combined(net.param_count());
  const HessPairing hp = make_hess_pairing(net, s);
  tape.accumulate(-2.5, p, &hp, 1.0, combined);
  const ParamVector value_g = tape.value_grad();
  for (std::size_t i = 0; i < combined.size(); ++i) {
    CHECK(combined[i] ==
          doctest::Approx(-2.5 * value_g[i] + gp[i] + gs[i]).epsilon(1e-10));
  }
}

TEST_CASE("parameter gradients across random toy nets") {
  for (std::uint64_t trial = 0; trial < 8; ++trial) {
    const std::size_t d = 2 + trial % 7;   // up to 8
    const std::size_t w = 3 + trial % 14;  // up to 16
    const CriticNet net = critic_init(d, w, 100 + trial);
    const HVec x = random_point(d + 2, 50 + trial);
    const ParamVector g = critic_param_grad_value(net, x);
    const ParamVector fd = fd_param_grad<CriticNet>(
        net, [&x](const CriticNet& n) { return critic_eval(n, x); });
    CHECK(rel_err(g, fd) < 1e-5);
  }
}

TEST_CASE("actor evaluation") {
  ActorNet zero(3, 2, 4);
  CHECK(norm(actor_eval(zero, HVec(5))) == 0.0);

  // p = 1 reduces to the critic shape.
  ActorNet a1(1, 1, 1);
  a1.w1 = {1.0};
  a1.w2 = {1.0};
  const HVec u = actor_eval(a1, HVec(std::vector<double>{0.5}));
  CHECK(u.modes() == 1);
  CHECK(u[0] == doctest::Approx(std::tanh(0.5)));

  // Output norm bound from the bounded activation.
  const ActorNet net = actor_init(4, 3, 8, 77);
  double w2_norm = 0.0, b2_norm = 0.0;
  for (double v : net.w2) w2_norm += v * v;
  for (double v : net.b2) b2_norm += v * v;
  const double bound = std::sqrt(w2_norm) + std::sqrt(b2_norm);
  for (std::uint64_t i = 0; i < 20; ++i) {
    CHECK(norm(actor_eval(net, random_point(6, 60 + i))) <= bound + 1e-12);
  }
}

TEST_CASE("actor parameter gradient") {
  const ActorNet net = actor_init(3, 2, 5, 88);
  const HVec x = random_point(5, 70);

  CHECK(l2_norm(actor_param_grad(net, x, HVec(2))) == 0.0);

  HVec w(std::vector<double>{0.4, -1.1});
  const ParamVector g = actor_param_grad(net, x, w);
  // Output-bias block sits at the tail: d<w,u>/db2_j = w_j.
  const std::size_t b2_offset = net.width * net.d + net.width + net.p * net.width;
  CHECK(g[b2_offset + 0] == doctest::Approx(0.4));
  CHECK(g[b2_offset + 1] == doctest::Approx(-1.1));

  const ParamVector fd = fd_param_grad<ActorNet>(net, [&](const ActorNet& n) {
    return inner(w, actor_eval(n, x));
  });
  CHECK(rel_err(g, fd) < 1e-6);
}

TEST_CASE("checkpoint round trips") {
  const CriticNet critic = critic_init(25, 600, 3);
  const auto bytes = serialize(critic);
  // Header is 20 bytes; payload must match the declared sizes.
  CHECK(bytes.size() == 20 + 8 * critic.param_count());
  const CriticNet back = deserialize_critic(bytes);
  CHECK(back.d == critic.d);
  CHECK(back.width == critic.width);
  const ParamVector pa = critic.params(), pb = back.params();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i] == pb[i]);

  const ActorNet actor = actor_init(4, 3, 6, 4);
  const ActorNet actor_back = deserialize_actor(serialize(actor));
  const ParamVector aa = actor.params(), ab = actor_back.params();
  for (std::size_t i = 0; i < aa.size(); ++i) CHECK(aa[i] == ab[i]);

  auto truncated = serialize(critic);
  truncated.resize(truncated.size() - 3);
  CHECK_THROWS_AS(deserialize_critic(truncated), FormatError);
  auto garbage = truncated;
  garbage[0] = 'X';
  CHECK_THROWS_AS(deserialize_critic(garbage), FormatError);
  CHECK_THROWS_AS(deserialize_actor(serialize(critic)), FormatError);
}
