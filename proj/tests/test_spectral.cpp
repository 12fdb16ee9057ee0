#include <doctest.h>

#include <cmath>

#include "dhg/rng.hpp"
#include "dhg/spectral.hpp"

using namespace dhg;

namespace {

// Pseudospectral check of the convolution: evaluate x x' on a uniform
// sine-exact grid and project back. The rectangle rule at xi_j = 2pi j/J is
// exact for pure sine series with mode index < J (discrete sine
// orthogonality), and x x' is such a series with modes up to 2N.
HVec burgers_pseudospectral(const HVec& x, std::size_t grid_points) {
  const std::size_t n_modes = x.modes();
  std::vector<double> product(grid_points);
  for (std::size_t j = 0; j < grid_points; ++j) {
    const double xi = kTwoPi * static_cast<double>(j) / static_cast<double>(grid_points);
    product[j] = eval_series(x, xi) * eval_series_derivative(x, xi);
  }
  HVec out(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < grid_points; ++j) {
      const double xi = kTwoPi * static_cast<double>(j) / static_cast<double>(grid_points);
      acc += product[j] * std::sin(0.5 * static_cast<double>(n) * xi) / kSqrtPi;
    }
    out[n - 1] = acc * kTwoPi / static_cast<double>(grid_points);
  }
  return out;
}

HVec random_decaying(std::size_t n_modes, std::uint64_t seed, std::uint64_t index) {
  HVec x(n_modes);
  for (std::size_t n = 1; n <= n_modes; ++n) {
    const double sd = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
    x[n - 1] = sd * normal_at(seed, 99, index * n_modes + n - 1);
  }
  return x;
}

}  // namespace

TEST_CASE("basis evaluation") {
  CHECK(eval_basis(2, 3.14159265358979323846) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eval_basis(1, 3.14159265358979323846) == doctest::Approx(1.0 / kSqrtPi).epsilon(1e-12));
  CHECK(eval_basis(4, 3.14159265358979323846 / 2.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(basis_eigenvalue(2) == 1.0);
  CHECK(basis_eigenvalue(4) == 4.0);
  CHECK_THROWS_AS(eval_basis(0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_basis(1, -0.5), DomainError);
  CHECK_THROWS_AS(eval_basis(1, 7.0), DomainError);
}

TEST_CASE("quadrature orthonormality of the basis") {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::size_t m = n; m <= 6; ++m) {
      const HVec proj = project_function([n](double xi) { return eval_basis(n, xi); }, 8);
      const double expected = n == m ? 1.0 : 0.0;
      CHECK(proj[m - 1] == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("project_function examples") {
  const HVec zero = project_function([](double) { return 0.0; }, 8);
  CHECK(norm(zero) == 0.0);

  // sin(xi) is basis mode 2 with coefficient sqrt(pi).
  const HVec s = project_function([](double xi) { return std::sin(xi); }, 8);
  CHECK(s[1] == doctest::Approx(kSqrtPi).epsilon(1e-10));
  for (std::size_t i = 0; i < 8; ++i) {
    if (i != 1) CHECK(std::fabs(s[i]) < 1e-9);
  }

  // The constant 1/sqrt(2pi): coefficients 2 sqrt2/(n pi) on odd modes.
  const HVec c = project_function([](double) { return 1.0 / std::sqrt(kTwoPi); }, 9);
  for (std::size_t n = 1; n <= 9; ++n) {
    const double expected =
        (n % 2 == 1) ? 2.0 * std::sqrt(2.0) / (static_cast<double>(n) * M_PI) : 0.0;
    CHECK(c[n - 1] == doctest::Approx(expected).epsilon(1e-6));
  }

  CHECK_THROWS_AS(project_function([](double) { return 0.0; }, kMaxModes + 1), ConfigError);
}

TEST_CASE("inner product and norm") {
  HVec x(std::vector<double>{3.0, 4.0});
  CHECK(norm(x) == doctest::Approx(5.0));
  CHECK(inner(HVec(4), x) == 0.0);
  CHECK(inner(unit_mode(1, 4), unit_mode(1, 4)) == 1.0);
  // Mixed truncations zero-pad the shorter side.
  HVec y(std::vector<double>{1.0, 1.0, 1.0});
  CHECK(inner(x, y) == doctest::Approx(7.0));
}

TEST_CASE("apply_A and dirichlet energy") {
  CHECK(norm(apply_A(HVec(5))) == 0.0);
  const HVec a2 = apply_A(unit_mode(2, 5));
  CHECK(a2[1] == doctest::Approx(-1.0));
  const HVec a4 = apply_A(unit_mode(4, 5));
  CHECK(a4[3] == doctest::Approx(-4.0));

  CHECK(dirichlet_energy(HVec(5)) == 0.0);
  CHECK(dirichlet_energy(unit_mode(2, 5)) == doctest::Approx(1.0));
  CHECK(dirichlet_energy(add(unit_mode(1, 5), unit_mode(2, 5))) == doctest::Approx(1.25));
}

TEST_CASE("diagonal operator identities") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    const HVec x = random_decaying(16, 3, 2 * t);
    const HVec y = random_decaying(16, 3, 2 * t + 1);
    CHECK(inner(apply_A(x), y) == doctest::Approx(inner(x, apply_A(y))).epsilon(1e-12));
    CHECK(dirichlet_energy(x) == doctest::Approx(-inner(apply_A(x), x)).epsilon(1e-12));
    CHECK(std::fabs(inner(x, y)) <= norm(x) * norm(y) * (1.0 + 1e-12));
  }
}

TEST_CASE("projection operator") {
  const HVec x = random_decaying(10, 4, 0);
  CHECK(norm(sub(project_Pd(x, 10), x)) == 0.0);
  CHECK(norm(project_Pd(unit_mode(5, 10), 3)) == 0.0);
  const HVec mix = add(unit_mode(2, 10), unit_mode(7, 10));
  CHECK(norm(sub(project_Pd(mix, 4), unit_mode(2, 10))) == 0.0);
  // Idempotent and non-expansive.
  const HVec p = project_Pd(x, 6);
  CHECK(norm(sub(project_Pd(p, 6), p)) == 0.0);
  CHECK(norm(p) <= norm(x));
  CHECK_THROWS_AS(project_Pd(x, 0), ConfigError);
  CHECK_THROWS_AS(project_Pd(x, 11), ConfigError);
}

TEST_CASE("burgers coefficients: hand-derived examples") {
  // B(e_1) = e_2 / (4 sqrt pi).
  const HVec b1 = burgers_B(unit_mode(1, 8));
  CHECK(b1[1] == doctest::Approx(1.0 / (4.0 * kSqrtPi)).epsilon(1e-15));
  for (std::size_t i = 0; i < 8; ++i) {
    if (i != 1) CHECK(b1[i] == 0.0);
  }
  // B(e_2) = e_4 / (2 sqrt pi).
  const HVec b2 = burgers_B(unit_mode(2, 8));
  CHECK(b2[3] == doctest::Approx(1.0 / (2.0 * kSqrtPi)).epsilon(1e-15));
  for (std::size_t i = 0; i < 8; ++i) {
    if (i != 3) CHECK(b2[i] == 0.0);
  }
  CHECK(norm(burgers_B(HVec(8))) == 0.0);
}

TEST_CASE("burgers matches the pseudospectral oracle") {
  const std::size_t n_modes = 64;
  for (std::uint64_t t = 0; t < 25; ++t) {
    const HVec x = random_decaying(n_modes, 7, t);
    const HVec fast = burgers_B(x);
    const HVec slow = burgers_pseudospectral(x, 8 * n_modes);
    CHECK(norm(sub(fast, slow)) / std::max(norm(fast), 1e-300) < 1e-8);
  }
}

TEST_CASE("binary serialization round trip") {
  const HVec x = random_decaying(12, 5, 1);
  const HVec back = hvec_from_bytes(hvec_to_bytes(x));
  REQUIRE(back.modes() == x.modes());
  for (std::size_t i = 0; i < x.modes(); ++i) CHECK(back[i] == x[i]);

  auto bytes = hvec_to_bytes(x);
  bytes.pop_back();
  CHECK_THROWS_AS(hvec_from_bytes(bytes), FormatError);
}

TEST_CASE("sparse CSV round trip") {
  HVec x(6);
  x[0] = 0.5;
  x[4] = -2.25;
  const std::string text = hvec_to_sparse_csv(x);
  CHECK(text == "1,0.5;5,-2.25");
  const HVec back = hvec_from_sparse_csv(text, 6);
  CHECK(norm(sub(back, x)) == 0.0);
  CHECK_THROWS_AS(hvec_from_sparse_csv("7,1", 6), FormatError);
  CHECK_THROWS_AS(hvec_from_sparse_csv("nonsense", 6), FormatError);
}
