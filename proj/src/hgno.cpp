#include "dhg/hgno.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "dhg/rng.hpp"

namespace dhg {

ActDerivs tanh_derivs(double z) {
  const double m = std::tanh(z);
  const double s = 1.0 - m * m;  // sech^2
  // m'' = -2 m s,  m''' = s (6 m^2 - 2).
  return ActDerivs{m, s, -2.0 * m * s, s * (6.0 * m * m - 2.0)};
}

double max_abs(const ParamVector& g) {
  double m = 0.0;
  for (double x : g.v) m = std::max(m, std::fabs(x));
  return m;
}

double l2_norm(const ParamVector& g) {
  double s = 0.0;
  for (double x : g.v) s += x * x;
  return std::sqrt(s);
}

CriticNet::CriticNet(std::size_t d_in, std::size_t hidden)
    : d(d_in), width(hidden), w1(hidden * d_in, 0.0), b1(hidden, 0.0), w2(hidden, 0.0) {}

ParamVector CriticNet::params() const {
  ParamVector p(param_count());
  std::size_t k = 0;
  for (double x : w1) p[k++] = x;
  for (double x : b1) p[k++] = x;
  for (double x : w2) p[k++] = x;
  p[k] = b2;
  return p;
}

void CriticNet::set_params(const ParamVector& p) {
  if (p.size() != param_count()) throw ShapeError("CriticNet::set_params: size mismatch");
  std::size_t k = 0;
  for (double& x : w1) x = p[k++];
  for (double& x : b1) x = p[k++];
  for (double& x : w2) x = p[k++];
  b2 = p[k];
}

CriticNet critic_init(std::size_t d, std::size_t width, std::uint64_t seed) {
  CriticNet net(d, width);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(d));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(width));
  std::uint64_t idx = 0;
  for (double& w : net.w1) w = s1 * normal_at(seed, streams::kNetInit, idx++);
  for (double& w : net.w2) w = s2 * normal_at(seed, streams::kNetInit, idx++);
  return net;
}

namespace {

// z = W1 x_{1..d} + b1 for the first d coefficients of x.
void compute_hidden_pre(const std::vector<double>& w1, const std::vector<double>& b1, std::size_t width,
                std::size_t d, const HVec& x, std::vector<double>& z) {
  if (x.modes() < d) {
    throw ShapeError("hgno: input has " + std::to_string(x.modes()) +
                     " modes, encoder needs " + std::to_string(d));
  }
  z.assign(b1.begin(), b1.end());
  for (std::size_t k = 0; k < width; ++k) {
    const double* row = &w1[k * d];
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) acc += row[i] * x[i];
    z[k] += acc;
  }
}

}  // namespace

double critic_eval(const CriticNet& net, const HVec& x) {
  std::vector<double> z;
  compute_hidden_pre(net.w1, net.b1, net.width, net.d, x, z);
  double out = net.b2;
  for (std::size_t k = 0; k < net.width; ++k) out += net.w2[k] * std::tanh(z[k]);
  return out;
}

CriticJet critic_jet(const CriticNet& net, const HVec& x) {
  CriticJet jet;
  std::vector<double> z;
  compute_hidden_pre(net.w1, net.b1, net.width, net.d, x, z);
  jet.grad.assign(net.d, 0.0);
  jet.hess = SymMat(net.d);
  jet.value = net.b2;
  for (std::size_t k = 0; k < net.width; ++k) {
    const ActDerivs a = tanh_derivs(z[k]);
    const double c1 = net.w2[k] * a.m1;
    const double c2 = net.w2[k] * a.m2;
    jet.value += net.w2[k] * a.m0;
    const double* row = &net.w1[k * net.d];
    for (std::size_t i = 0; i < net.d; ++i) {
      jet.grad[i] += c1 * row[i];
      const double ri = c2 * row[i];
      double* hrow = &jet.hess.a[i * net.d];
      for (std::size_t j = 0; j <= i; ++j) hrow[j] += ri * row[j];
    }
  }
  // Mirror the lower triangle; symmetric by construction.
  for (std::size_t i = 0; i < net.d; ++i) {
    for (std::size_t j = i + 1; j < net.d; ++j) jet.hess.at(i, j) = jet.hess.at(j, i);
  }
  return jet;
}

std::vector<double> critic_grad_coeffs(const CriticNet& net, const HVec& x) {
  std::vector<double> z;
  compute_hidden_pre(net.w1, net.b1, net.width, net.d, x, z);
  std::vector<double> grad(net.d, 0.0);
  for (std::size_t k = 0; k < net.width; ++k) {
    const double m = std::tanh(z[k]);
    const double c = net.w2[k] * (1.0 - m * m);
    const double* row = &net.w1[k * net.d];
    for (std::size_t i = 0; i < net.d; ++i) grad[i] += c * row[i];
  }
  return grad;
}

ParamVector critic_param_grad_value(const CriticNet& net, const HVec& x) {
  return CriticJetParamGrad(net, x).value_grad();
}

CriticJetParamGrad::CriticJetParamGrad(const CriticNet& net, const HVec& x) : net_(net) {
  compute_hidden_pre(net.w1, net.b1, net.width, net.d, x, z_);
  x_.assign(x.coeffs.begin(), x.coeffs.begin() + static_cast<std::ptrdiff_t>(net.d));
  m0_.resize(net.width);
  m1_.resize(net.width);
  m2_.resize(net.width);
  m3_.resize(net.width);
  value_ = net.b2;
  for (std::size_t k = 0; k < net.width; ++k) {
    const ActDerivs a = tanh_derivs(z_[k]);
    m0_[k] = a.m0;
    m1_[k] = a.m1;
    m2_[k] = a.m2;
    m3_[k] = a.m3;
    value_ += net.w2[k] * a.m0;
  }
}

ParamVector CriticJetParamGrad::value_grad() const {
  ParamVector g(net_.param_count());
  accumulate(1.0, {}, nullptr, 1.0, g);
  return g;
}

ParamVector CriticJetParamGrad::grad_pairing(const std::vector<double>& p) const {
  ParamVector g(net_.param_count());
  accumulate(0.0, p, nullptr, 1.0, g);
  return g;
}

ParamVector CriticJetParamGrad::hess_pairing(const SymMat& s) const {
  const HessPairing hp = make_hess_pairing(net_, s);
  ParamVector g(net_.param_count());
  accumulate(0.0, {}, &hp, 1.0, g);
  return g;
}

void CriticJetParamGrad::accumulate(double cv, const std::vector<double>& p,
                                    const HessPairing* hp, double weight,
                                    ParamVector& out) const {
  const std::size_t d = net_.d;
  const std::size_t width = net_.width;
  if (!p.empty() && p.size() != d) {
    throw ShapeError("CriticJetParamGrad: pairing vector length != d");
  }
  double* gw1 = out.v.data();
  double* gb1 = gw1 + width * d;
  double* gw2 = gb1 + width;
  double* gb2 = gw2 + width;

  // a_k = (W1 p)_k, shared by the b1 / W1 / w2 pieces of <p, grad>.
  std::vector<double> a;
  if (!p.empty()) {
    a.resize(width);
    for (std::size_t k = 0; k < width; ++k) {
      const double* row = &net_.w1[k * d];
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) acc += row[i] * p[i];
      a[k] = acc;
    }
  }

  if (cv != 0.0) *gb2 += weight * cv;
  for (std::size_t k = 0; k < width; ++k) {
    // d/dw2_k and the scalar multiplying x_i in d/dW1_{ki}.
    double dw2 = cv * m0_[k];
    double cx = net_.w2[k] * cv * m1_[k];
    if (!p.empty()) {
      dw2 += m1_[k] * a[k];
      cx += net_.w2[k] * m2_[k] * a[k];
    }
    if (hp != nullptr) {
      dw2 += m2_[k] * hp->q[k];
      cx += net_.w2[k] * m3_[k] * hp->q[k];
    }
    gw2[k] += weight * dw2;
    gb1[k] += weight * cx;
    double* grow = &gw1[k * d];
    const double wcx = weight * cx;
    if (!p.empty() || hp != nullptr) {
      const double wp = weight * net_.w2[k] * m1_[k];
      const double wq = (hp != nullptr) ? weight * net_.w2[k] * m2_[k] : 0.0;
      const double* g2row = (hp != nullptr) ? &hp->g2[k * d] : nullptr;
      for (std::size_t i = 0; i < d; ++i) {
        double g = wcx * x_[i];
        if (!p.empty()) g += wp * p[i];
        if (g2row != nullptr) g += wq * g2row[i];
        grow[i] += g;
      }
    } else {
      for (std::size_t i = 0; i < d; ++i) grow[i] += wcx * x_[i];
    }
  }
}

HessPairing make_hess_pairing(const CriticNet& net, const SymMat& s) {
  if (s.n != net.d) throw ShapeError("make_hess_pairing: matrix size != d");
  HessPairing hp;
  hp.q.assign(net.width, 0.0);
  hp.g2.assign(net.width * net.d, 0.0);
  for (std::size_t k = 0; k < net.width; ++k) {
    const double* row = &net.w1[k * net.d];
    double* g2row = &hp.g2[k * net.d];
    double q = 0.0;
    for (std::size_t i = 0; i < net.d; ++i) {
      double si = 0.0;
      const double* srow = &s.a[i * s.n];
      for (std::size_t j = 0; j < net.d; ++j) si += srow[j] * row[j];
      g2row[i] = 2.0 * si;
      q += row[i] * si;
    }
    hp.q[k] = q;
  }
  return hp;
}

ActorNet::ActorNet(std::size_t d_in, std::size_t p_out, std::size_t hidden)
    : d(d_in),
      p(p_out),
      width(hidden),
      w1(hidden * d_in, 0.0),
      b1(hidden, 0.0),
      w2(p_out * hidden, 0.0),
      b2(p_out, 0.0) {}

ParamVector ActorNet::params() const {
  ParamVector out(param_count());
  std::size_t k = 0;
  for (double x : w1) out[k++] = x;
  for (double x : b1) out[k++] = x;
  for (double x : w2) out[k++] = x;
  for (double x : b2) out[k++] = x;
  return out;
}

void ActorNet::set_params(const ParamVector& p_in) {
  if (p_in.size() != param_count()) throw ShapeError("ActorNet::set_params: size mismatch");
  std::size_t k = 0;
  for (double& x : w1) x = p_in[k++];
  for (double& x : b1) x = p_in[k++];
  for (double& x : w2) x = p_in[k++];
  for (double& x : b2) x = p_in[k++];
}

ActorNet actor_init(std::size_t d, std::size_t p, std::size_t width, std::uint64_t seed) {
  ActorNet net(d, p, width);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(d));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(width));
  // Offset the index range so actor weights never alias critic init draws
  // under a shared seed.
  std::uint64_t idx = std::uint64_t{1} << 40;
  for (double& w : net.w1) w = s1 * normal_at(seed, streams::kNetInit, idx++);
  for (double& w : net.w2) w = s2 * normal_at(seed, streams::kNetInit, idx++);
  return net;
}

HVec actor_eval(const ActorNet& net, const HVec& x) {
  std::vector<double> z;
  compute_hidden_pre(net.w1, net.b1, net.width, net.d, x, z);
  for (double& v : z) v = std::tanh(v);
  HVec u(net.p);
  for (std::size_t j = 0; j < net.p; ++j) {
    const double* row = &net.w2[j * net.width];
    double acc = net.b2[j];
    for (std::size_t k = 0; k < net.width; ++k) acc += row[k] * z[k];
    u[j] = acc;
  }
  return u;
}

ParamVector actor_param_grad(const ActorNet& net, const HVec& x, const HVec& w) {
  ParamVector g(net.param_count());
  actor_accumulate_pairing(net, x, w, 1.0, g);
  return g;
}

void actor_accumulate_pairing(const ActorNet& net, const HVec& x, const HVec& w, double weight,
                              ParamVector& out) {
  const std::size_t d = net.d;
  const std::size_t width = net.width;
  std::vector<double> z;
  compute_hidden_pre(net.w1, net.b1, width, d, x, z);

  double* gw1 = out.v.data();
  double* gb1 = gw1 + width * d;
  double* gw2 = gb1 + width;
  double* gb2 = gw2 + net.p * width;

  // c_k = sum_j w_j W2_{jk}; only the first p entries of w act.
  std::vector<double> c(width, 0.0);
  const std::size_t jm = std::min(net.p, w.modes());
  for (std::size_t j = 0; j < jm; ++j) {
    const double wj = w[j];
    if (wj == 0.0) continue;
    gb2[j] += weight * wj;
    const double* row = &net.w2[j * width];
    for (std::size_t k = 0; k < width; ++k) c[k] += wj * row[k];
  }
  for (std::size_t k = 0; k < width; ++k) {
    const double m = std::tanh(z[k]);
    const double m1 = 1.0 - m * m;
    for (std::size_t j = 0; j < jm; ++j) gw2[j * width + k] += weight * w[j] * m;
    const double ck = c[k] * m1;
    gb1[k] += weight * ck;
    double* grow = &gw1[k * d];
    const double wck = weight * ck;
    for (std::size_t i = 0; i < d; ++i) grow[i] += wck * x[i];
  }
}

namespace {

constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::uint8_t kKindCritic = 1;
constexpr std::uint8_t kKindActor = 2;
constexpr std::uint8_t kActTanh = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

void put_f64(std::vector<std::uint8_t>& out, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
}

struct Reader {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;

  std::uint8_t u8() {
    if (pos + 1 > bytes.size()) throw FormatError("checkpoint: truncated stream");
    return bytes[pos++];
  }
  std::uint32_t u32() {
    if (pos + 4 > bytes.size()) throw FormatError("checkpoint: truncated stream");
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes[pos++]) << (8 * b);
    return v;
  }
  double f64() {
    if (pos + 8 > bytes.size()) throw FormatError("checkpoint: truncated stream");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[pos++]) << (8 * b);
    double x;
    std::memcpy(&x, &bits, 8);
    return x;
  }
};

std::vector<std::uint8_t> serialize_header(std::uint8_t kind, std::uint32_t d,
                                           std::uint32_t width, std::uint32_t p) {
  std::vector<std::uint8_t> out;
  out.push_back('H');
  out.push_back('G');
  out.push_back('N');
  out.push_back('O');
  put_u32(out, kCheckpointVersion);
  out.push_back(kind);
  out.push_back(kActTanh);
  out.push_back(0);
  out.push_back(0);
  put_u32(out, d);
  put_u32(out, width);
  put_u32(out, p);
  return out;
}

std::uint8_t read_header(Reader& r, std::uint32_t& d, std::uint32_t& width, std::uint32_t& p) {
  if (r.bytes.size() < 4 || r.bytes[0] != 'H' || r.bytes[1] != 'G' || r.bytes[2] != 'N' ||
      r.bytes[3] != 'O') {
    throw FormatError("checkpoint: bad magic");
  }
  r.pos = 4;
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint8_t kind = r.u8();
  const std::uint8_t act = r.u8();
  r.u8();
  r.u8();
  if (act != kActTanh) throw FormatError("checkpoint: unknown activation id");
  d = r.u32();
  width = r.u32();
  p = r.u32();
  return kind;
}

}  // namespace

std::vector<std::uint8_t> serialize(const CriticNet& net) {
  auto out = serialize_header(kKindCritic, static_cast<std::uint32_t>(net.d),
                              static_cast<std::uint32_t>(net.width), 1);
  const ParamVector p = net.params();
  out.reserve(out.size() + 8 * p.size());
  for (double x : p.v) put_f64(out, x);
  return out;
}

std::vector<std::uint8_t> serialize(const ActorNet& net) {
  auto out = serialize_header(kKindActor, static_cast<std::uint32_t>(net.d),
                              static_cast<std::uint32_t>(net.width),
                              static_cast<std::uint32_t>(net.p));
  const ParamVector p = net.params();
  out.reserve(out.size() + 8 * p.size());
  for (double x : p.v) put_f64(out, x);
  return out;
}

CriticNet deserialize_critic(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  std::uint32_t d, width, p;
  if (read_header(r, d, width, p) != kKindCritic || p != 1) {
    throw FormatError("checkpoint: not a critic net");
  }
  CriticNet net(d, width);
  ParamVector pv(net.param_count());
  for (double& x : pv.v) x = r.f64();
  if (r.pos != bytes.size()) throw FormatError("checkpoint: trailing bytes");
  net.set_params(pv);
  return net;
}

ActorNet deserialize_actor(const std::vector<std::uint8_t>& bytes) {
  Reader r{bytes};
  std::uint32_t d, width, p;
  if (read_header(r, d, width, p) != kKindActor) {
    throw FormatError("checkpoint: not an actor net");
  }
  ActorNet net(d, p, width);
  ParamVector pv(net.param_count());
  for (double& x : pv.v) x = r.f64();
  if (r.pos != bytes.size()) throw FormatError("checkpoint: trailing bytes");
  net.set_params(pv);
  return net;
}

}  // namespace dhg
