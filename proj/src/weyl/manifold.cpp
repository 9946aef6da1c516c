#include "bhq/weyl/manifold.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "bhq/common.hpp"

namespace bhq {
namespace {

using Series = std::vector<double>;

Series multiply(const Series& a, const Series& b) {
  const std::size_t n = a.size();
  Series out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; i + j < n; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// sum_n c_n u^n for u with zero constant term.
Series compose(const Series& u, const Series& c) {
  const std::size_t n = u.size();
  Series out(n, 0.0), power(n, 0.0);
  power[0] = 1.0;
  for (std::size_t k = 0; k < c.size() && k < n; ++k) {
    if (k > 0) power = multiply(power, u);
    for (std::size_t i = 0; i < n; ++i) out[i] += c[k] * power[i];
  }
  return out;
}

// Taylor coefficients of (1 + u)^e.
Series binomial_series(double e, std::size_t n) {
  Series c(n, 0.0);
  c[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) c[k] = c[k - 1] * (e - double(k - 1)) / double(k);
  return c;
}

Series trig_series(bool sine, std::size_t n) {
  Series c(n, 0.0);
  double term = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) term /= double(k);
    const bool odd = k % 2 == 1;
    if (odd == sine) c[k] = (((sine ? (k - 1) : k) / 2) % 2 == 0 ? 1.0 : -1.0) * term;
  }
  return c;
}

}  // namespace

ManifoldSeries dimer_unstable_manifold(double alpha, int order) {
  if (!(alpha > 1.0)) throw StabilityError("dimer_unstable_manifold: the fixed point is stable for alpha <= 1");
  if (order < 1) throw DomainError("dimer_unstable_manifold: order must be >= 1");
  const std::size_t n = static_cast<std::size_t>(order) + 1;
  const double lambda = 2.0 * std::sqrt(alpha - 1.0);
  ManifoldSeries m{alpha, lambda, Series(n, 0.0), Series(n, 0.0)};
  m.z[1] = std::sqrt(1.0 / (2.0 * lambda));
  m.phi[1] = std::sqrt(lambda / 2.0);

  const Series root = binomial_series(0.5, n);
  const Series inverse_root = binomial_series(-0.5, n);
  const Series sine = trig_series(true, n);
  const Series cosine = trig_series(false, n);
  Eigen::Matrix2d jacobian;
  jacobian << 0.0, 1.0, lambda * lambda, 0.0;

  for (std::size_t k = 2; k < n; ++k) {
    // Vector field with Gamma known through order k-1; its k-th coefficient
    // is the nonlinear forcing at this order.
    Series u = multiply(m.z, m.z);
    for (double& x : u) x *= -4.0;
    const Series z_dot = multiply(compose(u, root), compose(m.phi, sine));
    Series phi_dot = multiply(multiply(m.z, compose(u, inverse_root)), compose(m.phi, cosine));
    for (std::size_t i = 0; i < n; ++i) phi_dot[i] = -4.0 * phi_dot[i] + 4.0 * alpha * m.z[i];
    const Eigen::Matrix2d system = double(k) * lambda * Eigen::Matrix2d::Identity() - jacobian;
    const Eigen::Vector2d coeff = system.partialPivLu().solve(Eigen::Vector2d(z_dot[k], phi_dot[k]));
    m.z[k] = coeff(0);
    m.phi[k] = coeff(1);
  }
  return m;
}

std::vector<double> manifold_scaling(const ManifoldSeries& manifold, const PhaseSpacePolynomial& observable) {
  const std::size_t n = manifold.z.size();
  Series out(n, 0.0);
  for (const auto& [powers, c] : observable) {
    const auto [a, b] = powers;
    if (a < 0 || b < 0) throw DomainError("manifold_scaling: negative power");
    Series term(n, 0.0);
    term[0] = c;
    for (int i = 0; i < a; ++i) term = multiply(term, manifold.z);
    for (int i = 0; i < b; ++i) term = multiply(term, manifold.phi);
    for (std::size_t i = 0; i < n; ++i) out[i] += term[i];
  }
  return out;
}

}  // namespace bhq
