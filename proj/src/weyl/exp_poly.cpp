#include "bhq/weyl/exp_poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bhq {

ExpPoly::ExpPoly(std::vector<double> rates) : rates_(std::move(rates)) {}

ExpPoly ExpPoly::constant(const std::vector<double>& rates, Complex c, int s) {
  return term(rates, c, 0, std::vector<int>(rates.size(), 0), s);
}

ExpPoly ExpPoly::term(const std::vector<double>& rates, Complex c, int p, std::vector<int> q, int s) {
  if (q.size() != rates.size()) throw DomainError("ExpPoly::term: rate vector and q differ in length");
  if (p < 0 || s < 0) throw DomainError("ExpPoly::term: negative power");
  ExpPoly e(rates);
  e.add({p, std::move(q), s}, c);
  return e;
}

void ExpPoly::add(const ExpKey& key, Complex c) {
  if (c == Complex(0.0)) return;
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }
}

Complex ExpPoly::coefficient(const ExpKey& key) const {
  const auto it = terms_.find(key);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

void ExpPoly::adopt_rates(const ExpPoly& other) {
  if (rates_.empty()) {
    rates_ = other.rates_;
  } else if (!other.rates_.empty() && other.rates_ != rates_) {
    throw DomainError("ExpPoly: operands carry different rate vectors");
  }
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& other) {
  adopt_rates(other);
  for (const auto& [k, c] : other.terms_) add(k, c);
  canonicalize();
  return *this;
}

ExpPoly& ExpPoly::operator-=(const ExpPoly& other) {
  adopt_rates(other);
  for (const auto& [k, c] : other.terms_) add(k, -c);
  canonicalize();
  return *this;
}

ExpPoly& ExpPoly::operator*=(Complex c) {
  if (c == Complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [k, v] : terms_) v *= c;
  return *this;
}

ExpPoly operator*(const ExpPoly& a, const ExpPoly& b) {
  ExpPoly out(a.rates_.empty() ? b.rates_ : a.rates_);
  out.adopt_rates(b);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      ExpKey k{ka.p + kb.p, ka.q, ka.s + kb.s};
      for (std::size_t i = 0; i < k.q.size(); ++i) k.q[i] += kb.q[i];
      out.add(k, ca * cb);
    }
  }
  out.canonicalize();
  return out;
}

ExpPoly ExpPoly::shifted(const std::vector<int>& shift) const {
  if (shift.size() != rates_.size()) throw DomainError("ExpPoly::shifted: shift has the wrong length");
  ExpPoly out(rates_);
  for (const auto& [k, c] : terms_) {
    ExpKey key = k;
    for (std::size_t i = 0; i < shift.size(); ++i) key.q[i] += shift[i];
    out.terms_.emplace(std::move(key), c);
  }
  return out;
}

ExpPoly ExpPoly::hbar_shifted(int ds) const {
  ExpPoly out(rates_);
  for (const auto& [k, c] : terms_) {
    ExpKey key = k;
    key.s += ds;
    if (key.s < 0) throw DomainError("ExpPoly::hbar_shifted: negative hbar power");
    out.terms_.emplace(std::move(key), c);
  }
  return out;
}

ExpPoly ExpPoly::truncated(int max_s) const {
  ExpPoly out(rates_);
  for (const auto& [k, c] : terms_) {
    if (k.s <= max_s) out.terms_.emplace(k, c);
  }
  return out;
}

ExpPoly ExpPoly::at_order(int s) const {
  ExpPoly out(rates_);
  for (const auto& [k, c] : terms_) {
    if (k.s == s) out.terms_.emplace(k, c);
  }
  return out;
}

double ExpPoly::exponent(const std::vector<int>& q) const {
  double kappa = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    kappa += q[i] * rates_[i];
    scale += std::abs(q[i] * rates_[i]);
  }
  // Combinations that cancel between degenerate modes count as zero rate.
  return std::abs(kappa) <= 1e-12 * scale ? 0.0 : kappa;
}

ExpPoly ExpPoly::integrate() const {
  ExpPoly out(rates_);
  const std::vector<int> zero(rates_.size(), 0);
  for (const auto& [k, c] : terms_) {
    const double kappa = exponent(k.q);
    if (kappa == 0.0) {
      out.add({k.p + 1, k.q, k.s}, c / double(k.p + 1));
      continue;
    }
    // int_0^t s^p e^{ks} ds = e^{kt} sum_j (-1)^j p!/(p-j)! t^{p-j} / k^{j+1} - (-1)^p p! / k^{p+1}
    double falling = 1.0;
    for (int j = 0; j <= k.p; ++j) {
      if (j > 0) falling *= (k.p - j + 1);
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      out.add({k.p - j, k.q, k.s}, c * (sign * falling / std::pow(kappa, j + 1)));
    }
    const double sign = (k.p % 2 == 0) ? 1.0 : -1.0;
    out.add({0, zero, k.s}, -c * (sign * falling / std::pow(kappa, k.p + 1)));
  }
  out.canonicalize();
  return out;
}

ExpPoly ExpPoly::derivative() const {
  ExpPoly out(rates_);
  for (const auto& [k, c] : terms_) {
    const double kappa = exponent(k.q);
    if (k.p > 0) out.add({k.p - 1, k.q, k.s}, c * double(k.p));
    if (kappa != 0.0) out.add(k, c * kappa);
  }
  out.canonicalize();
  return out;
}

Complex ExpPoly::evaluate(double t, double hbar) const {
  Complex sum = 0.0;
  for (const auto& [k, c] : terms_) {
    sum += c * std::pow(t, k.p) * std::exp(exponent(k.q) * t) * std::pow(hbar, 0.5 * k.s);
  }
  return sum;
}

double ExpPoly::max_abs() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

bool ExpPoly::is_real(double tol) const {
  const double scale = max_abs();
  return std::all_of(terms_.begin(), terms_.end(),
                     [&](const auto& kv) { return std::abs(kv.second.imag()) <= tol * scale; });
}

void ExpPoly::canonicalize() {
  // Relative to the largest coefficient at the same hbar order, since orders
  // differ in scale by powers of hbar that are bound only at evaluation.
  std::map<int, double> scale;
  for (const auto& [k, c] : terms_) scale[k.s] = std::max(scale[k.s], std::abs(c));
  std::erase_if(terms_, [&](const auto& kv) { return std::abs(kv.second) <= 1e-15 * scale[kv.first.s]; });
}

std::string ExpPoly::to_string() const {
  std::ostringstream out;
  out.precision(6);
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << '(' << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    if (k.p > 0) out << " t^" << k.p;
    out << " e^{(";
    for (std::size_t i = 0; i < k.q.size(); ++i) out << (i ? "," : "") << k.q[i];
    out << ")lt}";
    if (k.s > 0) out << " h^" << k.s << "/2";
  }
  return first ? "0" : out.str();
}

}  // namespace bhq
