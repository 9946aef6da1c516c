#pragma once

// Oracles shared by the unit and acceptance tests: random symbols and a
// truncated-oscillator realisation of symmetric-ordered products.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bhq/weyl/weyl_polynomial.hpp"

namespace bhq::testing {

inline WeylPolynomial random_polynomial(std::mt19937& rng, const std::vector<double>& rates, int max_degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> deg(0, max_degree);
  WeylPolynomial p(rates);
  for (int term = 0; term < 6; ++term) {
    Monomial m(2 * rates.size(), 0);
    int left = deg(rng);
    for (std::size_t i = 0; i < m.size() && left > 0; ++i) {
      std::uniform_int_distribution<int> take(0, left);
      m[i] = take(rng);
      left -= m[i];
    }
    std::vector<int> q(rates.size());
    for (auto& v : q) v = std::uniform_int_distribution<int>(-2, 2)(rng);
    ExpPoly c(rates);
    c.add({std::uniform_int_distribution<int>(0, 2)(rng), q, std::uniform_int_distribution<int>(0, 3)(rng)},
          Complex(u(rng), u(rng)));
    p.add(m, c);
  }
  return p;
}

inline double max_difference(const WeylPolynomial& a, const WeylPolynomial& b) {
  const auto d = a - b;
  double m = 0.0;
  for (const auto& [mono, c] : d.terms()) m = std::max(m, c.max_abs());
  return m;
}

inline double max_abs(const WeylPolynomial& a) {
  double m = 0.0;
  for (const auto& [mono, c] : a.terms()) m = std::max(m, c.max_abs());
  return m;
}

// Truncated oscillator realisation of the quadratures.
struct Oscillator {
  Eigen::MatrixXcd x, y;
};

inline Oscillator oscillator(int dim, double phi) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(double(k));
  const Eigen::MatrixXcd ad = a.adjoint();
  const double norm = std::sqrt(2.0 * std::sin(2.0 * phi));
  return {(std::polar(1.0, phi) * a + std::polar(1.0, -phi) * ad) / norm,
          (std::polar(1.0, -phi) * a + std::polar(1.0, phi) * ad) / norm};
}

// Symmetric-ordered operator {x^mu y^nu}_s: the average of all distinct words.
inline Eigen::MatrixXcd symmetric_word(const Oscillator& o, int mu, int nu) {
  const int dim = static_cast<int>(o.x.rows());
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
  int count = 0;
  const int n = mu + nu;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != mu) continue;
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(dim, dim);
    for (int i = 0; i < n; ++i) w = w * ((mask >> i) & 1u ? o.x : o.y);
    sum += w;
    ++count;
  }
  return sum / double(count);
}

inline Eigen::MatrixXcd operator_of(const Oscillator& o, const WeylPolynomial& p) {
  const int dim = static_cast<int>(o.x.rows());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [m, c] : p.terms()) out += c.evaluate(0.0, 1.0) * symmetric_word(o, m[0], m[1]);
  return out;
}

}  // namespace bhq::testing
