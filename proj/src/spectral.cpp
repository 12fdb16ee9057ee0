#include "dhg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace dhg {

double basis_eigenvalue(std::size_t n) {
  if (n < 1 || n > kMaxModes) {
    throw DomainError("basis_eigenvalue: mode index " + std::to_string(n) + " out of range");
  }
  const double dn = static_cast<double>(n);
  return dn * dn / 4.0;
}

double eval_basis(std::size_t n, double xi) {
  if (n < 1 || n > kMaxModes) {
    throw DomainError("eval_basis: mode index " + std::to_string(n) + " out of range");
  }
  if (xi < 0.0 || xi > kTwoPi) {
    throw DomainError("eval_basis: xi = " + std::to_string(xi) + " outside [0, 2pi]");
  }
  return std::sin(0.5 * static_cast<double>(n) * xi) / kSqrtPi;
}

HVec unit_mode(std::size_t n, std::size_t n_modes) {
  if (n < 1 || n > n_modes) {
    throw DomainError("unit_mode: mode " + std::to_string(n) + " exceeds truncation");
  }
  HVec x(n_modes);
  x[n - 1] = 1.0;
  return x;
}

double inner(const HVec& x, const HVec& y) {
  const std::size_t m = std::min(x.modes(), y.modes());
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += x[i] * y[i];
  return s;
}

double norm(const HVec& x) { return std::sqrt(inner(x, x)); }

HVec add(const HVec& x, const HVec& y) {
  HVec out(std::max(x.modes(), y.modes()));
  for (std::size_t i = 0; i < x.modes(); ++i) out[i] += x[i];
  for (std::size_t i = 0; i < y.modes(); ++i) out[i] += y[i];
  return out;
}

HVec sub(const HVec& x, const HVec& y) {
  HVec out(std::max(x.modes(), y.modes()));
  for (std::size_t i = 0; i < x.modes(); ++i) out[i] += x[i];
  for (std::size_t i = 0; i < y.modes(); ++i) out[i] -= y[i];
  return out;
}

HVec scale(const HVec& x, double a) {
  HVec out = x;
  for (double& c : out.coeffs) c *= a;
  return out;
}

void axpy(double a, const HVec& x, HVec& y) {
  const std::size_t m = std::min(x.modes(), y.modes());
  for (std::size_t i = 0; i < m; ++i) y[i] += a * x[i];
}

HVec apply_A(const HVec& x) {
  HVec out(x.modes());
  for (std::size_t i = 0; i < x.modes(); ++i) {
    const double dn = static_cast<double>(i + 1);
    out[i] = -(dn * dn / 4.0) * x[i];
  }
  return out;
}

double dirichlet_energy(const HVec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.modes(); ++i) {
    const double dn = static_cast<double>(i + 1);
    s += (dn * dn / 4.0) * x[i] * x[i];
  }
  return s;
}

HVec project_Pd(const HVec& x, std::size_t d) {
  if (d < 1 || d > x.modes()) {
    throw ConfigError("project_Pd: d = " + std::to_string(d) + " outside 1.." +
                      std::to_string(x.modes()));
  }
  HVec out = x;
  std::fill(out.coeffs.begin() + static_cast<std::ptrdiff_t>(d), out.coeffs.end(), 0.0);
  return out;
}

HVec burgers_B(const HVec& x) {
  const std::size_t n_modes = x.modes();
  HVec out(n_modes);
  const double c8 = 1.0 / (8.0 * kSqrtPi);
  const double c4 = 1.0 / (4.0 * kSqrtPi);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    double s1 = 0.0;
    for (std::size_t m = 1; m < n; ++m) s1 += x[m - 1] * x[n - m - 1];
    double s2 = 0.0;
    for (std::size_t m = 1; m + n <= n_modes; ++m) s2 += x[m - 1] * x[n + m - 1];
    out[n - 1] = static_cast<double>(n) * (c8 * s1 - c4 * s2);
  }
  return out;
}

double eval_series(const HVec& x, double xi) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.modes(); ++i) {
    s += x[i] * std::sin(0.5 * static_cast<double>(i + 1) * xi);
  }
  return s / kSqrtPi;
}

double eval_series_derivative(const HVec& x, double xi) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.modes(); ++i) {
    const double dn = static_cast<double>(i + 1);
    s += x[i] * 0.5 * dn * std::cos(0.5 * dn * xi);
  }
  return s / kSqrtPi;
}

namespace {

// Composite Simpson over values on a grid of 2*panels+1 points.
double simpson(const std::vector<double>& values, double h) {
  const std::size_t m = values.size();
  double s = values.front() + values.back();
  for (std::size_t j = 1; j + 1 < m; ++j) s += values[j] * ((j % 2 == 1) ? 4.0 : 2.0);
  return s * h / 3.0;
}

HVec project_values(const std::vector<double>& values, std::size_t n_modes) {
  const std::size_t m = values.size();
  const double h = kTwoPi / static_cast<double>(m - 1);
  HVec out(n_modes);
  std::vector<double> integrand(m);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    for (std::size_t j = 0; j < m; ++j) {
      const double xi = h * static_cast<double>(j);
      integrand[j] = values[j] * std::sin(0.5 * static_cast<double>(n) * xi) / kSqrtPi;
    }
    out[n - 1] = simpson(integrand, h);
  }
  return out;
}

}  // namespace

HVec project_function(const std::function<double(double)>& f, std::size_t n_modes,
                      std::size_t panels) {
  if (n_modes < 1 || n_modes > kMaxModes) {
    throw ConfigError("project_function: mode count " + std::to_string(n_modes) + " out of range");
  }
  if (panels == 0) panels = 4 * std::max<std::size_t>(n_modes, 64);
  const std::size_t m = 2 * panels + 1;
  const double h = kTwoPi / static_cast<double>(m - 1);
  std::vector<double> values(m);
  for (std::size_t j = 0; j < m; ++j) values[j] = f(h * static_cast<double>(j));
  return project_values(values, n_modes);
}

HVec project_grid(const std::vector<double>& values, std::size_t n_modes) {
  if (values.size() < 5 || values.size() % 2 == 0) {
    throw ConfigError("project_grid: need an odd grid of at least 5 points");
  }
  if (n_modes < 1 || n_modes > kMaxModes) {
    throw ConfigError("project_grid: mode count " + std::to_string(n_modes) + " out of range");
  }
  return project_values(values, n_modes);
}

std::vector<std::uint8_t> hvec_to_bytes(const HVec& x) {
  std::vector<std::uint8_t> out(4 + 8 * x.modes());
  const std::uint32_t count = static_cast<std::uint32_t>(x.modes());
  for (int b = 0; b < 4; ++b) out[static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(count >> (8 * b));
  for (std::size_t i = 0; i < x.modes(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &x.coeffs[i], 8);
    for (int b = 0; b < 8; ++b) {
      out[4 + 8 * i + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(bits >> (8 * b));
    }
  }
  return out;
}

HVec hvec_from_bytes(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw FormatError("hvec_from_bytes: truncated header");
  std::uint32_t count = 0;
  for (int b = 0; b < 4; ++b) count |= static_cast<std::uint32_t>(bytes[static_cast<std::size_t>(b)]) << (8 * b);
  if (bytes.size() != 4 + 8 * static_cast<std::size_t>(count)) {
    throw FormatError("hvec_from_bytes: payload length does not match declared count");
  }
  HVec x(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
      bits |= static_cast<std::uint64_t>(bytes[4 + 8 * i + static_cast<std::size_t>(b)]) << (8 * b);
    }
    std::memcpy(&x.coeffs[i], &bits, 8);
  }
  return x;
}

std::string hvec_to_sparse_csv(const HVec& x) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (std::size_t i = 0; i < x.modes(); ++i) {
    if (x[i] == 0.0) continue;
    if (!first) os << ';';
    os << (i + 1) << ',' << x[i];
    first = false;
  }
  return os.str();
}

HVec hvec_from_sparse_csv(const std::string& text, std::size_t n_modes) {
  HVec x(n_modes);
  if (text.empty()) return x;
  std::istringstream is(text);
  std::string entry;
  while (std::getline(is, entry, ';')) {
    const auto comma = entry.find(',');
    if (comma == std::string::npos) {
      throw FormatError("hvec_from_sparse_csv: entry '" + entry + "' missing comma");
    }
    std::size_t n = 0;
    double c = 0.0;
    try {
      n = static_cast<std::size_t>(std::stoull(entry.substr(0, comma)));
      c = std::stod(entry.substr(comma + 1));
    } catch (const std::exception&) {
      throw FormatError("hvec_from_sparse_csv: cannot parse entry '" + entry + "'");
    }
    if (n < 1 || n > n_modes) {
      throw FormatError("hvec_from_sparse_csv: mode " + std::to_string(n) +
                        " outside truncation " + std::to_string(n_modes));
    }
    x[n - 1] = c;
  }
  return x;
}

}  // namespace dhg
