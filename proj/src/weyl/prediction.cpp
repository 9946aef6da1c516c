#include "bhq/weyl/prediction.hpp"

#include <cmath>
#include <sstream>

namespace bhq {
namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return std::round(b);
}

WeylPolynomial dominant_symbol(const ScalingPrediction& pred, int kmax) {
  const std::vector<double> rates{pred.lambda};
  WeylPolynomial a(rates);
  for (int k = 0; k <= kmax && k < static_cast<int>(pred.C.size()); ++k) {
    if (pred.C[k] == 0.0) continue;
    a.add({0, k}, ExpPoly::term(rates, pred.C[k], 0, {k}, k));
  }
  return a;
}

// Truncated power series product.
std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < a.size() && i < n; ++i)
    for (std::size_t j = 0; j < b.size() && i + j < n; ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

double ScalingPrediction::renorm_param(double t, double hbar, double bplus2) const {
  return hbar * std::exp(2.0 * lambda * t) * bplus2;
}

ScalingPrediction dominant_scaling(const WeylPolynomial& heisenberg) {
  if (heisenberg.modes() != 1) throw DomainError("dominant_scaling: expects a single-mode symbol");
  ScalingPrediction pred;
  pred.lambda = heisenberg.rates()[0];
  pred.remainder = heisenberg;
  for (const auto& [m, c] : heisenberg.terms()) {
    if (m[0] != 0) continue;
    const int k = m[1];
    const ExpKey key{0, {k}, k};
    const Complex value = c.coefficient(key);
    if (value == Complex(0.0)) continue;
    if (static_cast<int>(pred.C.size()) <= k) pred.C.resize(k + 1, 0.0);
    pred.C[k] = value.real();
    ExpPoly growth(heisenberg.rates());
    growth.add(key, value);
    pred.remainder.add(m, growth * Complex(-1.0));
  }
  if (pred.C.empty()) pred.C.push_back(0.0);
  return pred;
}

ScalingPrediction manifold_prediction(double alpha, const PhaseSpacePolynomial& observable, int order) {
  const auto manifold = dimer_unstable_manifold(alpha, order);
  ScalingPrediction pred;
  pred.lambda = manifold.lambda;
  pred.C = manifold_scaling(manifold, observable);
  pred.remainder = WeylPolynomial({manifold.lambda});
  return pred;
}

Complex predict_ckl(ScalingPrediction& pred, int k, int l, double phi) {
  const int n = std::abs(k - l);
  if (n >= static_cast<int>(pred.C.size())) {
    std::ostringstream msg;
    msg << "predict_ckl: C_" << n << " was not computed (have C_0..C_" << pred.C.size() - 1 << ")";
    throw OrderError(msg.str());
  }
  const Complex c = pred.C[n] * bplus_matrix_element(k, l, n, phi);
  pred.ckl[{k, l}] = c;
  return c;
}

double RenormalizedSeries::in_parameter(double x) const {
  double sum = 0.0;
  double power = 1.0;
  for (double a : coefficients) {
    sum += a * power;
    power *= x;
  }
  return sum;
}

double RenormalizedSeries::at(double t, double hbar) const {
  return in_parameter(hbar * std::exp(2.0 * lambda * t) * bplus2);
}

RenormalizedSeries expectation_series(const ScalingPrediction& pred, const QuadratureCovariance& cov,
                                      WickFactor factor) {
  RenormalizedSeries series;
  series.lambda = pred.lambda;
  series.bplus2 = cov.plus2;
  const std::vector<double> rates{pred.lambda};
  for (std::size_t m = 0; 2 * m < pred.C.size(); ++m) {
    double weight = 1.0;
    if (factor == WickFactor::Pairings) {
      const auto moment = WeylPolynomial::monomial(rates, 0, 0, static_cast<int>(2 * m), 1.0);
      weight = wick_expectation(moment, {cov}).evaluate(0.0, 1.0).real() / std::pow(cov.plus2, double(m));
    } else {
      for (std::size_t j = 2; j + 1 <= 2 * m; ++j) weight *= double(j);  // (2m - 1)!
    }
    series.coefficients.push_back(weight * pred.C[2 * m]);
  }
  return series;
}

RenormalizedSeries otoc_series(ScalingPrediction& pred, const WeylPolynomial& b, const QuadratureCovariance& cov,
                               int max_m) {
  if (max_m < 0) throw DomainError("otoc_series: max_m must be >= 0");
  if (b.modes() != 1) throw DomainError("otoc_series: B must be a single-mode symbol");
  const int kmax = 2 * max_m + 1;
  if (static_cast<int>(pred.C.size()) <= kmax) {
    std::ostringstream msg;
    msg << "otoc_series: max_m = " << max_m << " needs C_1..C_" << kmax << ", have up to C_"
        << pred.C.size() - 1;
    throw OrderError(msg.str());
  }
  WeylPolynomial linear(b.rates());
  for (const auto& [m, c] : b.terms()) {
    if (m[0] + m[1] != 1) continue;
    for (const auto& [key, value] : c.terms()) {
      if (key.s != 1 || key.p != 0 || key.q[0] != 0) {
        throw DomainError("otoc_series: linear part of B must be time independent and carry hbar^{1/2}");
      }
    }
    linear.add(m, c);
  }
  if (linear.empty()) throw DomainError("otoc_series: B has no linear part");

  const WeylPolynomial comm = commutator(dominant_symbol(pred, kmax), linear);
  const WeylPolynomial square = star_product(comm, comm) * Complex(-1.0);
  const ExpPoly value = wick_expectation(square, {cov});

  RenormalizedSeries series;
  series.lambda = pred.lambda;
  series.bplus2 = cov.plus2;
  series.coefficients.assign(static_cast<std::size_t>(max_m) + 1, 0.0);
  for (const auto& [key, c] : value.terms()) {
    // Term hbar^{m+2} e^{(2m+2) lambda t}; orders past max_m are incomplete.
    const int m = key.q[0] / 2 - 1;
    if (key.p != 0 || key.s != key.q[0] + 2 || key.q[0] % 2 != 0) {
      throw Error("otoc_series: unexpected term structure " + value.to_string());
    }
    if (m < 0 || m > max_m) continue;
    series.coefficients[m] = c.real() / std::pow(cov.plus2, double(m));
  }
  pred.otoc_c = series.coefficients;
  return series;
}

ExpPoly otoc_expansion(const WeylPolynomial& heisenberg, const WeylPolynomial& b,
                       const std::vector<QuadratureCovariance>& cov, int max_half_order) {
  const WeylPolynomial comm = commutator(heisenberg, b).truncated(max_half_order);
  const WeylPolynomial square = star_product(comm, comm).truncated(max_half_order) * Complex(-1.0);
  return wick_expectation(square, cov).truncated(max_half_order);
}

CumulantSeries cumulant_prediction(ScalingPrediction& pred, int n) {
  if (n < 1) throw DomainError("cumulant_prediction: n must be >= 1");
  const int kmax = static_cast<int>(pred.C.size()) - 1;
  if (kmax < n - 1 || kmax < 1) {
    std::ostringstream msg;
    msg << "cumulant_prediction: n = " << n << " needs C_1..C_" << n - 1;
    throw OrderError(msg.str());
  }
  // Series in u = s g; powers of s up to `degree` are exact given C_0..C_kmax.
  const int degree = std::min(2 * (n - 1) + 4, n - 1 + kmax);
  const std::size_t len = static_cast<std::size_t>(degree) + 1;
  std::vector<double> x(pred.C.begin(), pred.C.begin() + std::min<std::size_t>(pred.C.size(), len));
  x.resize(len, 0.0);

  // Moments mu_r(s) = sum_j [u^j] X^r * E[g^j] s^j, and the same with |.| for scale.
  std::vector<std::vector<double>> mu(n + 1), mu_abs(n + 1);
  std::vector<double> power(len, 0.0), power_abs(len, 0.0), x_abs(len);
  for (std::size_t i = 0; i < len; ++i) x_abs[i] = std::abs(x[i]);
  power[0] = power_abs[0] = 1.0;
  for (int r = 0; r <= n; ++r) {
    if (r > 0) {
      power = multiply(power, x, len);
      power_abs = multiply(power_abs, x_abs, len);
    }
    mu[r].assign(len, 0.0);
    mu_abs[r].assign(len, 0.0);
    for (std::size_t j = 0; j < len; ++j) {
      mu[r][j] = power[j] * pairing_count(static_cast<int>(j));
      mu_abs[r][j] = power_abs[j] * pairing_count(static_cast<int>(j));
    }
  }
  // kappa_r = mu_r - sum_{m=1}^{r-1} C(r-1, m-1) kappa_m mu_{r-m}
  std::vector<std::vector<double>> kappa(n + 1), kappa_abs(n + 1);
  for (int r = 1; r <= n; ++r) {
    kappa[r] = mu[r];
    kappa_abs[r] = mu_abs[r];
    for (int m = 1; m < r; ++m) {
      const double c = binomial(r - 1, m - 1);
      const auto term = multiply(kappa[m], mu[r - m], len);
      const auto term_abs = multiply(kappa_abs[m], mu_abs[r - m], len);
      for (std::size_t j = 0; j < len; ++j) {
        kappa[r][j] -= c * term[j];
        kappa_abs[r][j] += c * term_abs[j];
      }
    }
  }

  CumulantSeries out;
  out.n = n;
  for (std::size_t j = 0; 2 * j < len; ++j) out.coefficients.push_back(kappa[n][2 * j]);
  if (n >= 2) {
    for (int j = 0; j < n - 1; ++j) {
      const double scale = kappa_abs[n][2 * j];
      if (std::abs(out.coefficients[j]) > 1e-9 * scale) {
        std::ostringstream msg;
        msg << "cumulant_prediction: kappa_" << n << " has a surviving X^" << j << " term "
            << out.coefficients[j] << " (scale " << scale << "); leading power must be X^" << n - 1;
        throw Error(msg.str());
      }
      out.coefficients[j] = 0.0;
    }
  }
  pred.d[n] = out.d();
  return out;
}

}  // namespace bhq
