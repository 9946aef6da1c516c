#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "bhq/common.hpp"

namespace bhq {

/// Key of one term c t^p exp((q . lambda) t) hbar^{s/2}.
struct ExpKey {
  int p = 0;
  std::vector<int> q;
  int s = 0;

  auto operator<=>(const ExpKey&) const = default;
  bool operator==(const ExpKey&) const = default;
};

/// Finite sum of terms c t^p exp((q . lambda) t) hbar^{s/2}, one integer
/// rate multiple q_i per unstable mode i with rate lambda_i.
class ExpPoly {
 public:
  ExpPoly() = default;
  explicit ExpPoly(std::vector<double> rates);

  /// c * hbar^{s/2} with no time dependence.
  static ExpPoly constant(const std::vector<double>& rates, Complex c, int s = 0);
  /// c * t^p exp((q . lambda) t) hbar^{s/2}.
  static ExpPoly term(const std::vector<double>& rates, Complex c, int p, std::vector<int> q, int s);

  const std::vector<double>& rates() const { return rates_; }
  const std::map<ExpKey, Complex>& terms() const { return terms_; }
  std::size_t modes() const { return rates_.size(); }
  bool empty() const { return terms_.empty(); }

  void add(const ExpKey& key, Complex c);
  Complex coefficient(const ExpKey& key) const;

  ExpPoly& operator+=(const ExpPoly& other);
  ExpPoly& operator-=(const ExpPoly& other);
  ExpPoly& operator*=(Complex c);
  friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) { return a += b; }
  friend ExpPoly operator-(ExpPoly a, const ExpPoly& b) { return a -= b; }
  friend ExpPoly operator*(ExpPoly a, Complex c) { return a *= c; }
  friend ExpPoly operator*(Complex c, ExpPoly a) { return a *= c; }
  friend ExpPoly operator*(const ExpPoly& a, const ExpPoly& b);

  /// Multiplies every term by exp((shift . lambda) t).
  ExpPoly shifted(const std::vector<int>& shift) const;
  /// Multiplies every term by hbar^{ds/2}.
  ExpPoly hbar_shifted(int ds) const;
  /// Drops terms with s > max_s.
  ExpPoly truncated(int max_s) const;
  /// Keeps only terms with the given s.
  ExpPoly at_order(int s) const;

  /// Closed-form integral from 0 to t.
  ExpPoly integrate() const;
  ExpPoly derivative() const;

  Complex evaluate(double t, double hbar) const;
  /// Largest coefficient magnitude.
  double max_abs() const;
  /// True when every coefficient has |Im c| <= tol * max_abs().
  bool is_real(double tol = 1e-12) const;

  /// Removes coefficients below 1e-15 of the largest magnitude at the same s.
  void canonicalize();

  std::string to_string() const;

 private:
  double exponent(const std::vector<int>& q) const;
  void adopt_rates(const ExpPoly& other);

  std::vector<double> rates_;
  std::map<ExpKey, Complex> terms_;
};

}  // namespace bhq
