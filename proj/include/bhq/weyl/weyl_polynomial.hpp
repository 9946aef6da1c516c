#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bhq/weyl/exp_poly.hpp"

namespace bhq {

/// Powers (mu_1, nu_1, mu_2, nu_2, ...) of the quadratures (x_i, y_i) =
/// (b_-^{(i)}, b_+^{(i)}) of each mode.
using Monomial = std::vector<int>;

/// Weyl symbol of a symmetric-ordered polynomial in the quadratures with
/// ExpPoly coefficients. Each pair satisfies [x_i, y_i] = i and different
/// modes commute.
class WeylPolynomial {
 public:
  WeylPolynomial() = default;
  /// Empty polynomial over modes with the given instability rates.
  explicit WeylPolynomial(std::vector<double> rates);

  static WeylPolynomial constant(const std::vector<double>& rates, Complex c, int s = 0);
  /// c x_mode^mu y_mode^nu (0-based mode) with hbar^{s/2}.
  static WeylPolynomial monomial(const std::vector<double>& rates, int mode, int mu, int nu, Complex c, int s = 0);

  const std::vector<double>& rates() const { return rates_; }
  std::size_t modes() const { return rates_.size(); }
  const std::map<Monomial, ExpPoly>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(const Monomial& m, const ExpPoly& c);
  ExpPoly coefficient(const Monomial& m) const;

  /// Highest total degree in the quadratures.
  int degree() const;
  /// Smallest hbar half-power over all terms (0 for an empty polynomial).
  int min_half_order() const;
  int max_half_order() const;

  /// Degree up to which the polynomial is a complete expansion (for v from
  /// a truncated Taylor series); unlimited by default.
  int complete_degree = std::numeric_limits<int>::max();

  WeylPolynomial& operator+=(const WeylPolynomial& other);
  WeylPolynomial& operator-=(const WeylPolynomial& other);
  WeylPolynomial& operator*=(Complex c);
  friend WeylPolynomial operator+(WeylPolynomial a, const WeylPolynomial& b) { return a += b; }
  friend WeylPolynomial operator-(WeylPolynomial a, const WeylPolynomial& b) { return a -= b; }
  friend WeylPolynomial operator*(WeylPolynomial a, Complex c) { return a *= c; }
  friend WeylPolynomial operator*(Complex c, WeylPolynomial a) { return a *= c; }

  /// Pointwise (commutative) product of symbols.
  WeylPolynomial pointwise(const WeylPolynomial& other) const;

  /// Free evolution under the quadratic Hamiltonian: x^mu y^nu picks up
  /// exp((nu - mu) lambda t) per mode.
  WeylPolynomial freely_evolved() const;

  WeylPolynomial truncated(int max_half_order) const;
  /// Applies `f` to every coefficient.
  template <typename F>
  WeylPolynomial map_coefficients(F&& f) const {
    WeylPolynomial out(rates_);
    out.complete_degree = complete_degree;
    for (const auto& [m, c] : terms_) out.add(m, f(m, c));
    return out;
  }

  /// Numeric symbol coefficients at time t.
  std::map<Monomial, Complex> at(double t, double hbar) const;
  /// Symbol value at phase-space point (x_i, y_i) and time t.
  Complex evaluate(const std::vector<Complex>& x, const std::vector<Complex>& y, double t, double hbar) const;

  /// True when every coefficient is real (a Hermitian operator at real time).
  bool is_real(double tol = 1e-12) const;

  std::string to_string() const;

 private:
  std::vector<double> rates_;
  std::map<Monomial, ExpPoly> terms_;
};

/// Symbol of the operator product f g (Moyal product, deformation 1).
WeylPolynomial star_product(const WeylPolynomial& f, const WeylPolynomial& g);

/// f * g - g * f.
WeylPolynomial commutator(const WeylPolynomial& f, const WeylPolynomial& g);

/// {f, g} = sum_i (d_x f d_y g - d_y f d_x g) for [x, y] = i; the commutator
/// equals i {f, g} plus higher odd Moyal orders.
WeylPolynomial poisson_bracket(const WeylPolynomial& f, const WeylPolynomial& g);

/// Single-mode symbol of a polynomial in (z, phi): z^a phi^b -> hbar^{(a+b)/2}
/// (x + y)^a (y - x)^b (2 lambda)^{-a/2} (lambda/2)^{b/2}.
WeylPolynomial from_phase_space(const std::map<std::pair<int, int>, double>& coefficients, double lambda);

}  // namespace bhq
