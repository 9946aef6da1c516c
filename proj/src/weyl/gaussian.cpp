#include "bhq/weyl/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace bhq {
namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return std::round(b);
}

void check_angle(double phi) {
  if (!(phi > 0.0 && phi < std::numbers::pi / 2)) {
    throw DomainError("quadrature angle must lie in (0, pi/2), got " + std::to_string(phi));
  }
}

}  // namespace

double quadrature_angle(double omega, double lambda) {
  if (!(omega > 0.0)) throw StabilityError("quadrature_angle: prequench frequency must be > 0");
  if (!(lambda > 0.0)) throw StabilityError("quadrature_angle: postquench rate must be > 0");
  return std::atan2(omega, lambda);
}

QuadratureCovariance thermal_covariance(double beta, double delta, double phi) {
  check_angle(phi);
  if (!(beta > 0.0)) throw DomainError("thermal_covariance: beta must be > 0 (or infinity)");
  if (!(delta > 0.0)) throw DomainError("thermal_covariance: level spacing must be > 0");
  const double coth = std::isinf(beta) ? 1.0 : 1.0 / std::tanh(0.5 * beta * delta);
  const double s = std::sin(2.0 * phi);
  QuadratureCovariance c;
  c.plus2 = coth / (2.0 * s);
  c.minus2 = c.plus2;
  c.cross = coth * std::cos(2.0 * phi) / (2.0 * s);
  return c;
}

double pairing_count(int n) {
  if (n < 0) throw DomainError("pairing_count: negative argument");
  if (n % 2 == 1) return 0.0;
  double p = 1.0;
  for (int k = 2; k <= n; k += 2) p *= (k - 1);
  return p;
}

double gaussian_moment(int mu, int nu, const QuadratureCovariance& cov) {
  if (mu < 0 || nu < 0) throw DomainError("gaussian_moment: negative power");
  // Choose j cross pairs between the x's and y's, pair the rest among themselves.
  double sum = 0.0;
  double jfact = 1.0;
  for (int j = 0; j <= std::min(mu, nu); ++j) {
    if (j > 0) jfact *= j;
    if ((mu - j) % 2 != 0 || (nu - j) % 2 != 0) continue;
    sum += binomial(mu, j) * binomial(nu, j) * jfact * std::pow(cov.cross, j) * pairing_count(mu - j) *
           std::pow(cov.minus2, (mu - j) / 2) * pairing_count(nu - j) * std::pow(cov.plus2, (nu - j) / 2);
  }
  return sum;
}

ExpPoly wick_expectation(const WeylPolynomial& poly, const std::vector<QuadratureCovariance>& cov) {
  if (cov.size() != poly.modes()) throw DomainError("wick_expectation: one covariance per mode is required");
  ExpPoly out(poly.rates());
  for (const auto& [m, c] : poly.terms()) {
    double value = 1.0;
    for (std::size_t i = 0; i < cov.size() && value != 0.0; ++i) value *= gaussian_moment(m[2 * i], m[2 * i + 1], cov[i]);
    if (value != 0.0) out += c * Complex(value);
  }
  return out;
}

Complex bplus_matrix_element(int k, int l, int n, double phi) {
  if (k < 0 || l < 0 || n < 0) throw DomainError("bplus_matrix_element: indices must be >= 0");
  check_angle(phi);
  if (n < std::abs(k - l) || (n - std::abs(k - l)) % 2 != 0) return 0.0;
  const Complex down = std::polar(1.0, -phi);
  const Complex up = std::polar(1.0, phi);
  // Walk over ladder steps starting from |l>.
  std::vector<Complex> v(static_cast<std::size_t>(l + n + 2), 0.0), w(v.size(), 0.0);
  v[l] = 1.0;
  for (int step = 0; step < n; ++step) {
    std::fill(w.begin(), w.end(), Complex(0.0));
    const int lo = std::max(0, l - step), hi = l + step;
    for (int j = lo; j <= hi; ++j) {
      if (v[j] == Complex(0.0)) continue;
      if (j > 0) w[j - 1] += down * std::sqrt(double(j)) * v[j];
      w[j + 1] += up * std::sqrt(double(j + 1)) * v[j];
    }
    v.swap(w);
  }
  return v[k] / std::pow(2.0 * std::sin(2.0 * phi), 0.5 * n);
}

}  // namespace bhq
