#include "bhq/weyl/dyson.hpp"

#include <sstream>

namespace bhq {

WeylPolynomial quantize_v(const VCoefficients& v, double lambda) {
  std::map<std::pair<int, int>, double> numeric;
  for (const auto& [powers, c] : v.terms) numeric[powers] = static_cast<double>(c);
  WeylPolynomial out = from_phase_space(numeric, lambda);
  out.complete_degree = v.order;
  return out;
}

WeylPolynomial quadratic_symbol(double lambda) {
  return WeylPolynomial::monomial({lambda}, 0, 1, 1, -lambda, 2);
}

WeylPolynomial dyson_expand(const WeylPolynomial& a, const WeylPolynomial& v, int max_half_order) {
  if (max_half_order < 0) throw DomainError("dyson_expand: max_half_order must be >= 0");
  if (!a.rates().empty() && !v.rates().empty() && a.rates() != v.rates()) {
    throw DomainError("dyson_expand: A and v are built on different quadratures");
  }
  const int base = a.min_half_order();
  // Insertions of degree d raise the order by d - 2; all degrees up to
  // max_half_order - base + 2 can contribute.
  const int needed = max_half_order - base + 2;
  if (!v.empty() && needed >= 3 && v.complete_degree < needed) {
    std::ostringstream msg;
    msg << "dyson_expand: order starvation; v is expanded to degree " << v.complete_degree
        << " but max_half_order " << max_half_order << " needs degree " << needed
        << "; call taylor_v with order >= " << needed;
    throw OrderError(msg.str());
  }

  WeylPolynomial f = a.truncated(max_half_order).freely_evolved();
  WeylPolynomial total = f;
  while (!f.empty() && !v.empty()) {
    WeylPolynomial g = commutator(v, f).map_coefficients([&](const Monomial&, const ExpPoly& c) {
      return (c * Complex(0.0, 1.0)).hbar_shifted(-2).truncated(max_half_order);
    });
    f = g.map_coefficients([](const Monomial& m, const ExpPoly& c) {
      std::vector<int> rate(m.size() / 2), back(m.size() / 2);
      for (std::size_t i = 0; i < rate.size(); ++i) {
        rate[i] = m[2 * i + 1] - m[2 * i];
        back[i] = -rate[i];
      }
      return c.shifted(back).integrate().shifted(rate);
    });
    total += f;
  }
  total.complete_degree = a.complete_degree;
  return total;
}

}  // namespace bhq
