#include "bhq/weyl/weyl_polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bhq {
namespace {

double falling(int n, int k) {
  double f = 1.0;
  for (int j = 0; j < k; ++j) f *= (n - j);
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return std::round(b);
}

struct ModeTerm {
  Complex c;
  int mu;
  int nu;
  int order;
};

// x^a y^b * x^c y^d for one canonical pair:
// sum_n (i/2)^n / n! sum_k C(n,k) (-1)^k (d_x^{n-k} d_y^k f)(d_x^k d_y^{n-k} g).
std::vector<ModeTerm> pair_product(int a, int b, int c, int d, int max_order) {
  std::vector<ModeTerm> out;
  const int nmax = std::min({a + b, c + d, max_order});
  Complex prefactor = 1.0;
  double nfact = 1.0;
  for (int n = 0; n <= nmax; ++n) {
    if (n > 0) {
      prefactor *= Complex(0.0, 0.5);
      nfact *= n;
    }
    for (int k = 0; k <= n; ++k) {
      const int fx = n - k, fy = k, gx = k, gy = n - k;
      if (fx > a || fy > b || gx > c || gy > d) continue;
      const double comb = binomial(n, k) * ((k % 2 == 0) ? 1.0 : -1.0) * falling(a, fx) * falling(b, fy) *
                          falling(c, gx) * falling(d, gy);
      out.push_back({prefactor / nfact * comb, a - fx + c - gx, b - fy + d - gy, n});
    }
  }
  return out;
}

void check_compatible(const WeylPolynomial& f, const WeylPolynomial& g) {
  if (!f.rates().empty() && !g.rates().empty() && f.rates() != g.rates()) {
    throw DomainError("WeylPolynomial: operands belong to different mode sets");
  }
}

enum class Orders { All, Odd, First };

// Moyal series factorized over modes; `keep` filters on the total order.
WeylPolynomial moyal(const WeylPolynomial& f, const WeylPolynomial& g, Orders keep) {
  check_compatible(f, g);
  const auto& rates = f.rates().empty() ? g.rates() : f.rates();
  WeylPolynomial out(rates);
  out.complete_degree = std::min(f.complete_degree, g.complete_degree);
  const std::size_t modes = rates.size();
  const int max_order = keep == Orders::First ? 1 : std::numeric_limits<int>::max();
  struct Partial {
    Complex c;
    Monomial m;
    int order;
  };
  for (const auto& [mf, cf] : f.terms()) {
    for (const auto& [mg, cg] : g.terms()) {
      std::vector<Partial> acc{{1.0, Monomial(2 * modes, 0), 0}};
      for (std::size_t i = 0; i < modes; ++i) {
        const auto terms = pair_product(mf[2 * i], mf[2 * i + 1], mg[2 * i], mg[2 * i + 1], max_order);
        std::vector<Partial> next;
        next.reserve(acc.size() * terms.size());
        for (const auto& p : acc) {
          for (const auto& t : terms) {
            if (p.order + t.order > max_order) continue;
            Monomial mm = p.m;
            mm[2 * i] = t.mu;
            mm[2 * i + 1] = t.nu;
            next.push_back({p.c * t.c, std::move(mm), p.order + t.order});
          }
        }
        acc.swap(next);
      }
      const ExpPoly product = cf * cg;
      for (const auto& p : acc) {
        if (keep == Orders::Odd && p.order % 2 == 0) continue;
        if (keep == Orders::First && p.order != 1) continue;
        out.add(p.m, product * p.c);
      }
    }
  }
  return out;
}

}  // namespace

WeylPolynomial::WeylPolynomial(std::vector<double> rates) : rates_(std::move(rates)) {}

WeylPolynomial WeylPolynomial::constant(const std::vector<double>& rates, Complex c, int s) {
  WeylPolynomial w(rates);
  w.add(Monomial(2 * rates.size(), 0), ExpPoly::constant(rates, c, s));
  return w;
}

WeylPolynomial WeylPolynomial::monomial(const std::vector<double>& rates, int mode, int mu, int nu, Complex c,
                                        int s) {
  if (mode < 0 || static_cast<std::size_t>(mode) >= rates.size()) {
    throw DomainError("WeylPolynomial::monomial: mode index out of range");
  }
  if (mu < 0 || nu < 0) throw DomainError("WeylPolynomial::monomial: negative power");
  Monomial m(2 * rates.size(), 0);
  m[2 * mode] = mu;
  m[2 * mode + 1] = nu;
  WeylPolynomial w(rates);
  w.add(m, ExpPoly::constant(rates, c, s));
  return w;
}

void WeylPolynomial::add(const Monomial& m, const ExpPoly& c) {
  if (m.size() != 2 * rates_.size()) throw DomainError("WeylPolynomial::add: monomial has the wrong length");
  if (c.empty()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.empty()) terms_.erase(it);
  }
}

ExpPoly WeylPolynomial::coefficient(const Monomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? ExpPoly(rates_) : it->second;
}

int WeylPolynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int total = 0;
    for (int k : m) total += k;
    d = std::max(d, total);
  }
  return d;
}

int WeylPolynomial::min_half_order() const {
  int s = std::numeric_limits<int>::max();
  for (const auto& [m, c] : terms_)
    for (const auto& [k, v] : c.terms()) s = std::min(s, k.s);
  return terms_.empty() ? 0 : s;
}

int WeylPolynomial::max_half_order() const {
  int s = 0;
  for (const auto& [m, c] : terms_)
    for (const auto& [k, v] : c.terms()) s = std::max(s, k.s);
  return s;
}

WeylPolynomial& WeylPolynomial::operator+=(const WeylPolynomial& other) {
  check_compatible(*this, other);
  if (rates_.empty()) rates_ = other.rates_;
  complete_degree = std::min(complete_degree, other.complete_degree);
  for (const auto& [m, c] : other.terms_) add(m, c);
  return *this;
}

WeylPolynomial& WeylPolynomial::operator-=(const WeylPolynomial& other) {
  check_compatible(*this, other);
  if (rates_.empty()) rates_ = other.rates_;
  complete_degree = std::min(complete_degree, other.complete_degree);
  for (const auto& [m, c] : other.terms_) add(m, c * Complex(-1.0));
  return *this;
}

WeylPolynomial& WeylPolynomial::operator*=(Complex c) {
  if (c == Complex(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

WeylPolynomial WeylPolynomial::pointwise(const WeylPolynomial& other) const {
  check_compatible(*this, other);
  WeylPolynomial out(rates_.empty() ? other.rates_ : rates_);
  out.complete_degree = std::min(complete_degree, other.complete_degree);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : other.terms_) {
      Monomial m = ma;
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
      out.add(m, ca * cb);
    }
  }
  return out;
}

WeylPolynomial WeylPolynomial::freely_evolved() const {
  return map_coefficients([](const Monomial& m, const ExpPoly& c) {
    std::vector<int> shift(m.size() / 2);
    for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = m[2 * i + 1] - m[2 * i];
    return c.shifted(shift);
  });
}

WeylPolynomial WeylPolynomial::truncated(int max_half_order) const {
  return map_coefficients([&](const Monomial&, const ExpPoly& c) { return c.truncated(max_half_order); });
}

std::map<Monomial, Complex> WeylPolynomial::at(double t, double hbar) const {
  std::map<Monomial, Complex> out;
  for (const auto& [m, c] : terms_) out.emplace(m, c.evaluate(t, hbar));
  return out;
}

Complex WeylPolynomial::evaluate(const std::vector<Complex>& x, const std::vector<Complex>& y, double t,
                                 double hbar) const {
  if (x.size() != modes() || y.size() != modes()) throw DomainError("WeylPolynomial::evaluate: wrong point size");
  Complex sum = 0.0;
  for (const auto& [m, c] : terms_) {
    Complex v = c.evaluate(t, hbar);
    for (std::size_t i = 0; i < modes(); ++i) v *= std::pow(x[i], m[2 * i]) * std::pow(y[i], m[2 * i + 1]);
    sum += v;
  }
  return sum;
}

bool WeylPolynomial::is_real(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const auto& kv) { return kv.second.is_real(tol); });
}

std::string WeylPolynomial::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) out << "\n";
    first = false;
    out << '[';
    for (std::size_t i = 0; i < m.size(); ++i) out << (i ? "," : "") << m[i];
    out << "] " << c.to_string();
  }
  return first ? "0" : out.str();
}

WeylPolynomial star_product(const WeylPolynomial& f, const WeylPolynomial& g) { return moyal(f, g, Orders::All); }

WeylPolynomial commutator(const WeylPolynomial& f, const WeylPolynomial& g) {
  // Even Moyal orders are symmetric under f <-> g and cancel.
  return moyal(f, g, Orders::Odd) * Complex(2.0);
}

WeylPolynomial poisson_bracket(const WeylPolynomial& f, const WeylPolynomial& g) {
  return moyal(f, g, Orders::First) * Complex(0.0, -2.0);
}

WeylPolynomial from_phase_space(const std::map<std::pair<int, int>, double>& coefficients, double lambda) {
  if (!(lambda > 0.0)) throw StabilityError("from_phase_space: lambda must be > 0");
  const std::vector<double> rates{lambda};
  WeylPolynomial out(rates);
  const double cz = std::sqrt(1.0 / (2.0 * lambda));
  const double cp = std::sqrt(lambda / 2.0);
  for (const auto& [powers, value] : coefficients) {
    const auto [a, b] = powers;
    if (a < 0 || b < 0) throw DomainError("from_phase_space: negative power");
    if (value == 0.0) continue;
    const double scale = value * std::pow(cz, a) * std::pow(cp, b);
    // (x + y)^a (y - x)^b = sum_{i,j} C(a,i) C(b,j) (-1)^{b-j} x^{i + b - j} y^{a - i + j}
    for (int i = 0; i <= a; ++i) {
      for (int j = 0; j <= b; ++j) {
        const double c = scale * binomial(a, i) * binomial(b, j) * (((b - j) % 2 == 0) ? 1.0 : -1.0);
        out.add({i + b - j, a - i + j}, ExpPoly::constant(rates, c, a + b));
      }
    }
  }
  return out;
}

}  // namespace bhq
