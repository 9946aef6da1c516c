#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bhq/meanfield/meanfield.hpp"

using namespace bhq;

namespace {

// Oracle: sqrt(1 - 4 z^2) as a power series in z^2 obtained by solving
// s(x)^2 = 1 - 4x term by term, and cos from the exponential series.
std::vector<Rational> sqrt_series(int terms) {
  std::vector<Rational> target(terms, 0), s(terms, 0);
  target[0] = 1;
  if (terms > 1) target[1] = -4;
  s[0] = 1;
  for (int n = 1; n < terms; ++n) {
    Rational acc = target[n];
    for (int k = 1; k < n; ++k) acc -= s[k] * s[n - k];
    s[n] = acc / 2;
  }
  return s;
}

std::vector<Rational> cos_series(int terms) {
  std::vector<Rational> c(terms, 0);
  Rational fact = 1;
  for (int n = 0; n < 2 * terms; ++n) {
    if (n > 0) fact *= n;
    if (n % 2 == 0) c[n / 2] = Rational((n / 2) % 2 == 0 ? 1 : -1) / fact;
  }
  return c;
}

// Taylor coefficients of f around 0 from a Chebyshev interpolant on
// [-rx, rx] x [-ry, ry]. Returns coefficients of x^p y^q for p, q <= 6.
std::vector<std::vector<double>> taylor_by_interpolation(double (*f)(double, double), double rx, double ry) {
  const int n = 48;
  const int keep = 24;
  std::vector<double> nodes(n);
  for (int j = 0; j < n; ++j) nodes[j] = std::cos(std::numbers::pi * (j + 0.5) / n);
  // Chebyshev coefficients via the discrete cosine transform in each variable.
  std::vector<std::vector<long double>> values(n, std::vector<long double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) values[i][j] = f(rx * nodes[i], ry * nodes[j]);
  std::vector<std::vector<long double>> cheb(keep, std::vector<long double>(keep, 0.0L));
  for (int a = 0; a < keep; ++a) {
    for (int b = 0; b < keep; ++b) {
      long double acc = 0.0L;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc += values[i][j] * std::cos(std::numbers::pi * a * (i + 0.5L) / n) *
                 std::cos(std::numbers::pi * b * (j + 0.5L) / n);
      acc *= (a == 0 ? 1.0L : 2.0L) / n * (b == 0 ? 1.0L : 2.0L) / n;
      cheb[a][b] = acc;
    }
  }
  // Monomial coefficients of T_k.
  std::vector<std::vector<long double>> t(keep, std::vector<long double>(keep, 0.0L));
  t[0][0] = 1.0L;
  t[1][1] = 1.0L;
  for (int k = 2; k < keep; ++k)
    for (int p = 0; p < keep; ++p) t[k][p] = (p > 0 ? 2.0L * t[k - 1][p - 1] : 0.0L) - t[k - 2][p];
  std::vector<std::vector<double>> out(7, std::vector<double>(7, 0.0));
  for (int p = 0; p <= 6; ++p) {
    for (int q = 0; q <= 6; ++q) {
      long double acc = 0.0L;
      for (int a = p; a < keep; ++a)
        for (int b = q; b < keep; ++b) acc += cheb[a][b] * t[a][p] * t[b][q];
      out[p][q] = static_cast<double>(acc / std::pow(static_cast<long double>(rx), p) /
                                      std::pow(static_cast<long double>(ry), q));
    }
  }
  return out;
}

double h_at_25(double z, double phi) { return josephson_energy(z, phi, 2.5); }

}  // namespace

TEST_CASE("coupling conventions") {
  for (int n : {10, 300, 100000}) {
    for (double alpha : {-1.0, 0.0, 2.5}) {
      CHECK(alpha_from_u(u_from_alpha(alpha, n), n) == doctest::Approx(alpha).epsilon(1e-15));
      CHECK(interaction_from_u(u_from_alpha(alpha, n), n) == doctest::Approx(interaction_from_alpha(alpha, n)));
    }
  }
  CHECK(u_from_alpha(2.5, 100000) == doctest::Approx(-5.0).epsilon(1e-4));
  CHECK(interaction_from_u(-20.0, 300) == doctest::Approx(-20.0 / 300.0));
}

TEST_CASE("josephson energy") {
  CHECK(josephson_energy(0.0, 0.0, 3.7) == 0.0);
  CHECK(josephson_energy(0.0, std::numbers::pi, 0.0) == doctest::Approx(2.0));
  const double expected = 1.0 - std::sqrt(0.96) * std::cos(0.2) - 0.05;
  CHECK(josephson_energy(0.1, 0.2, 2.5) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(std::abs(josephson_energy(0.1, 0.2, 2.5) - (-0.0102652)) < 1e-7);
  CHECK_THROWS_AS(josephson_energy(0.51, 0.0, 0.0), DomainError);
}

TEST_CASE("dimer frequencies") {
  const auto stable = dimer_frequencies(0.0);
  REQUIRE(stable.modes.size() == 1);
  CHECK(stable.modes[0].type == ModeType::Stable);
  CHECK(stable.modes[0].value == doctest::Approx(2.0).epsilon(1e-15));

  const auto unstable = dimer_frequencies(2.5);
  CHECK(unstable.modes[0].type == ModeType::Unstable);
  CHECK(std::abs(unstable.modes[0].value - 2.0 * std::sqrt(1.5)) < 1e-15);
  CHECK(std::abs(unstable.modes[0].value - 2.449490) < 1e-6);

  const auto critical = dimer_frequencies(1.0);
  CHECK(critical.modes[0].type == ModeType::Marginal);
  CHECK_FALSE(critical.warnings.empty());
}

TEST_CASE("taylor_v") {
  const auto v = taylor_v(2.5, 8);
  CHECK_THROWS_AS(taylor_v(2.5, 2), DomainError);

  // No constant, linear or quadratic terms: (0,0) is a fixed point.
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; p + q <= 2; ++q) CHECK(v.coefficient(p, q) == 0);
  // Parity: every odd power vanishes, cubic terms included.
  for (const auto& [powers, c] : v.terms) {
    CHECK(powers.first % 2 == 0);
    CHECK(powers.second % 2 == 0);
    CHECK(powers.first + powers.second <= 8);
  }
  for (int p = 0; p <= 3; ++p) CHECK(v.coefficient(p, 3 - p) == 0);

  CHECK(v.coefficient(4, 0) == 2);
  CHECK(v.coefficient(2, 2) == -1);
  CHECK(v.coefficient(0, 4) == Rational(-1, 24));

  // Series-arithmetic oracle, exact rational equality.
  const auto s = sqrt_series(5);
  const auto c = cos_series(5);
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; a + b <= 4; ++b) {
      const Rational expected = (a + b < 2) ? Rational(0) : Rational(-s[a] * c[b]);
      CHECK(v.coefficient(2 * a, 2 * b) == expected);
    }
  }
  // alpha only enters the quadratic part.
  CHECK(taylor_v(-3.0, 8).terms == v.terms);

  // Numerical derivatives of josephson_energy (Chebyshev interpolation).
  const auto numeric = taylor_by_interpolation(&h_at_25, 0.2, 1.0);
  for (int p = 0; p <= 6; ++p) {
    for (int q = 0; p + q <= 6; ++q) {
      if (p + q <= 2) continue;
      CHECK(std::abs(numeric[p][q] - static_cast<double>(v.coefficient(p, q))) < 1e-7);
    }
  }
  const auto [qz, qphi] = quadratic_part(2.5);
  CHECK(std::abs(numeric[2][0] - qz) < 1e-7);
  CHECK(std::abs(numeric[0][2] - qphi) < 1e-7);

  // Truncated series approximates v near the origin.
  const double z = 0.03;
  const double phi = 0.05;
  const double exact = josephson_energy(z, phi, 2.5) - qz * z * z - qphi * phi * phi;
  CHECK(std::abs(v.evaluate(z, phi) - exact) < 1e-11);
}

TEST_CASE("gross-pitaevskii stability") {
  SUBCASE("trimer critical point") {
    const auto s = gp_stability(-4.5, 3);
    REQUIRE(s.modes.size() == 2);
    for (const auto& m : s.modes) {
      CHECK(m.type == ModeType::Marginal);
      CHECK(std::abs(m.omega_squared) < 1e-9);
      CHECK(m.degeneracy == 2);
    }
    CHECK(s.has_marginal());
  }
  SUBCASE("trimer unstable") {
    const auto s = gp_stability(-20.0, 3);
    REQUIRE(s.modes.size() == 2);
    CHECK(s.modes[0].mode_k == 1);
    CHECK(s.modes[1].mode_k == 2);
    for (const auto& m : s.modes) {
      CHECK(m.type == ModeType::Unstable);
      CHECK(std::abs(m.value - std::sqrt(31.0)) < 1e-12);
      CHECK(m.degeneracy == 2);
    }
    CHECK(s.unstable_rates().size() == 2);
    CHECK_FALSE(s.warnings.empty());
    // Four eigenvalues of the linearization: +-sqrt(31) twice.
    REQUIRE(s.linearization_eigenvalues.size() == 4);
    std::complex<double> total = 0.0;
    for (auto e : s.linearization_eigenvalues) {
      total += e;
      CHECK(std::abs(std::abs(e.real()) - std::sqrt(31.0)) < 1e-12);
      CHECK(std::abs(e.imag()) < 1e-12);
    }
    CHECK(std::abs(total) < 1e-12);
  }
  SUBCASE("stable ring modes pair as +-i omega") {
    const auto s = gp_stability(1.0, 5);
    REQUIRE(s.modes.size() == 4);
    std::complex<double> total = 0.0;
    for (auto e : s.linearization_eigenvalues) {
      total += e;
      CHECK(std::abs(e.real()) < 1e-12);
    }
    CHECK(std::abs(total) < 1e-12);
    for (const auto& m : s.modes) {
      CHECK(m.type == ModeType::Stable);
      CHECK(m.value == doctest::Approx(std::sqrt(gp_omega_squared(1.0, 5, m.mode_k))).epsilon(1e-12));
    }
    CHECK(s.warnings.empty());
  }
  SUBCASE("dimer consistency") {
    for (double alpha : {-0.5, 0.0, 0.7, 2.5, 4.0}) {
      const auto gp = gp_stability(-2.0 * alpha, 2);
      const auto di = dimer_frequencies(alpha);
      REQUIRE(gp.modes.size() == 1);
      CHECK(gp.modes[0].type == di.modes[0].type);
      CHECK(std::abs(gp.modes[0].value - di.modes[0].value) < 1e-12);
    }
  }
  SUBCASE("critical coupling by bisection") {
    CHECK(std::abs(gp_critical_coupling(3) - (-4.5)) < 1e-9);
    CHECK(std::abs(gp_critical_coupling(2) - (-2.0)) < 1e-9);
    CHECK_THROWS_AS(gp_critical_coupling(3, 0.0, 1.0), DomainError);
  }
  SUBCASE("csv") {
    std::ostringstream out;
    gp_stability(-20.0, 3).write_csv(out);
    CHECK(out.str().rfind("mode_k, type, value, degeneracy\n", 0) == 0);
    CHECK(out.str().find("unstable") != std::string::npos);
  }
  CHECK_THROWS_AS(gp_stability(0.0, 1), DomainError);
}

TEST_CASE("ehrenfest time") {
  CHECK(ehrenfest_time(100000, 2.0 * std::sqrt(1.5)) == doctest::Approx(2.3501).epsilon(1e-4));
  CHECK(ehrenfest_time(300, std::sqrt(31.0)) == doctest::Approx(0.5124).epsilon(1e-3));
  CHECK(ehrenfest_time(300, std::sqrt(31.0)) == doctest::Approx(std::log(301.0) / (2.0 * std::sqrt(31.0))));
  // N + 1 -> e^2 (N + 1) adds exactly 1 / lambda.
  const double lambda = 1.7;
  const int n = 1000;
  const int scaled = static_cast<int>(std::lround(std::exp(2.0) * (n + 1))) - 1;
  const double shift = ehrenfest_time(scaled, lambda) - ehrenfest_time(n, lambda);
  CHECK(shift == doctest::Approx(1.0 / lambda + std::log((scaled + 1.0) / (std::exp(2.0) * (n + 1))) / (2 * lambda)));
  CHECK_THROWS_AS(ehrenfest_time(100, 0.0), StabilityError);
  CHECK_THROWS_AS(ehrenfest_time(100, -1.0), DomainError);
  CHECK_THROWS_AS(ehrenfest_time(1, 1.0), DomainError);
}
