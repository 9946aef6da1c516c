#include "bhq/observables/cumulants.hpp"

#include <cmath>
#include <sstream>

namespace bhq {
namespace {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
struct DoubleDouble {
  double hi = 0.0;
  double lo = 0.0;

  DoubleDouble() = default;
  DoubleDouble(double x) : hi(x) {}  // NOLINT: implicit on purpose
  DoubleDouble(double h, double l) : hi(h), lo(l) {}
  double value() const { return hi + lo; }
};

DoubleDouble two_sum(double a, double b) {
  const double s = a + b;
  const double v = s - a;
  return {s, (a - (s - v)) + (b - v)};
}

DoubleDouble quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}

DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
  DoubleDouble s = two_sum(a.hi, b.hi);
  const DoubleDouble t = two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
  const double p = a.hi * b.hi;
  const double e = std::fma(a.hi, b.hi, -p);
  return quick_two_sum(p, e + (a.hi * b.lo + a.lo * b.hi));
}

DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
  const double q1 = a.hi / b.hi;
  const DoubleDouble r = a - b * DoubleDouble(q1);
  const double q2 = r.hi / b.hi;
  const DoubleDouble r2 = r - b * DoubleDouble(q2);
  const double q3 = r2.hi / b.hi;
  return quick_two_sum(q1, q2) + DoubleDouble(q3);
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return std::round(b);
}

// kappa_n = m_n - sum_{j=1}^{n-1} C(n-1, j-1) kappa_j m_{n-j}
template <typename T>
std::vector<T> cumulant_recursion(const std::vector<T>& m) {
  const int n_max = static_cast<int>(m.size()) - 1;
  std::vector<T> kappa(m.size(), T(0.0));
  for (int n = 1; n <= n_max; ++n) {
    T k = m[n];
    for (int j = 1; j < n; ++j) k = k - T(binomial(n - 1, j - 1)) * kappa[j] * m[n - j];
    kappa[n] = k;
  }
  return kappa;
}

void check_order(int n_max) {
  if (n_max < 1 || n_max > kMaxCumulantOrder) {
    std::ostringstream msg;
    msg << "cumulants: n_max = " << n_max << " outside 1.." << kMaxCumulantOrder
        << "; higher orders are swamped by cancellation at double-precision input";
    throw DomainError(msg.str());
  }
}

}  // namespace

std::vector<double> moments_to_cumulants(const std::vector<double>& moments) {
  if (moments.empty() || moments[0] != 1.0) throw DomainError("moments_to_cumulants: m_0 must be 1");
  std::vector<DoubleDouble> m(moments.begin(), moments.end());
  const auto k = cumulant_recursion(m);
  std::vector<double> out;
  for (const auto& x : k) out.push_back(x.value());
  return out;
}

std::vector<double> cumulants_to_moments(const std::vector<double>& cumulants) {
  // m_n = sum_{j=1}^{n} C(n-1, j-1) kappa_j m_{n-j}
  const int n_max = static_cast<int>(cumulants.size()) - 1;
  std::vector<DoubleDouble> m(cumulants.size(), DoubleDouble(0.0));
  m[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    DoubleDouble s = 0.0;
    for (int j = 1; j <= n; ++j) s = s + DoubleDouble(binomial(n - 1, j - 1)) * DoubleDouble(cumulants[j]) * m[n - j];
    m[n] = s;
  }
  std::vector<double> out;
  for (const auto& x : m) out.push_back(x.value());
  return out;
}

DistributionCumulants distribution_cumulants(const std::vector<double>& values, const std::vector<double>& probabilities,
                                             int n_max, double input_precision) {
  check_order(n_max);
  if (values.size() != probabilities.size() || values.empty()) {
    throw DomainError("distribution_cumulants: values and probabilities differ in length or are empty");
  }
  DoubleDouble total = 0.0, first = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    total = total + DoubleDouble(probabilities[i]);
    first = first + DoubleDouble(probabilities[i]) * DoubleDouble(values[i]);
  }
  if (!(total.value() > 0.0)) throw DomainError("distribution_cumulants: probabilities sum to zero");
  const DoubleDouble mean = first / total;

  // Central moments and their absolute counterparts.
  std::vector<DoubleDouble> central(n_max + 1, DoubleDouble(0.0));
  std::vector<double> absolute(n_max + 1, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const DoubleDouble d = DoubleDouble(values[i]) - mean;
    const DoubleDouble p = DoubleDouble(probabilities[i]) / total;
    DoubleDouble power = 1.0;
    for (int r = 1; r <= n_max; ++r) {
      power = power * d;
      central[r] = central[r] + p * power;
      absolute[r] += p.value() * std::abs(power.value());
    }
  }
  central[0] = 1.0;
  absolute[0] = 1.0;
  std::vector<DoubleDouble> kappa = cumulant_recursion(central);
  kappa[1] = mean;

  // Error scale: the same recursion with every term counted by magnitude.
  std::vector<double> scale(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    double s = absolute[n];
    for (int j = 1; j < n; ++j) s += binomial(n - 1, j - 1) * scale[j] * absolute[n - j];
    scale[n] = s;
  }
  scale[1] = absolute[1] + std::abs(mean.value());

  DistributionCumulants out;
  out.kappa.assign(n_max + 1, 0.0);
  out.floor.assign(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    out.kappa[n] = kappa[n].value();
    out.floor[n] = input_precision * scale[n];
  }
  return out;
}

TimeSeries CumulantTable::series(int n, const SeriesMeta& meta) const {
  if (n < 1 || n > n_max) throw DomainError("CumulantTable::series: order out of range");
  SeriesMeta m = meta;
  if (m.label.empty()) m.label = "n=" + std::to_string(n);
  return TimeSeries::make_real(grid, kappa[n], m);
}

CumulantTable cumulants_numeric(const Evolver& evolver, const SparseOperator& a_diagonal,
                                const ThermalEnsemble& ensemble, const std::vector<double>& grid, int n_max,
                                double flag_factor, double input_precision) {
  check_order(n_max);
  if (!a_diagonal.is_diagonal() || !a_diagonal.hermitian()) {
    throw DomainError("cumulants_numeric: observable must be diagonal in the Fock basis");
  }
  if (ensemble.states.empty() || ensemble.states.size() != ensemble.weights.size()) {
    throw DomainError("cumulants_numeric: ensemble has no states or mismatched weights");
  }
  const std::vector<double> a = a_diagonal.diagonal_values();
  const auto n = static_cast<Eigen::Index>(evolver.dim());
  const auto k = static_cast<Eigen::Index>(ensemble.states.size());
  Eigen::MatrixXcd fock(n, k);
  for (Eigen::Index i = 0; i < k; ++i) fock.col(i) = ensemble.states[static_cast<std::size_t>(i)].vector;

  CumulantTable table;
  table.grid = grid;
  table.n_max = n_max;
  table.kappa.assign(n_max + 1, {});
  table.floor.assign(n_max + 1, {});
  table.precision_limited.assign(n_max + 1, {});

  Eigen::MatrixXcd work = evolver.load(fock);
  double t_now = 0.0;
  std::vector<double> p(static_cast<std::size_t>(n));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    if (t < 0.0 || (g > 0 && !(t > grid[g - 1]))) throw DomainError("cumulants_numeric: bad time grid");
    if (t > t_now) work = evolver.propagate(work, t - t_now);
    t_now = t;
    const Eigen::MatrixXcd psi = evolver.unload(work);
    for (Eigen::Index row = 0; row < n; ++row) {
      DoubleDouble s = 0.0;
      for (Eigen::Index i = 0; i < k; ++i) {
        s = s + DoubleDouble(ensemble.weights[static_cast<std::size_t>(i)]) * DoubleDouble(std::norm(psi(row, i)));
      }
      p[static_cast<std::size_t>(row)] = s.value();
    }
    const auto c = distribution_cumulants(a, p, n_max, input_precision);
    for (int r = 1; r <= n_max; ++r) {
      table.kappa[r].push_back(c.kappa[r]);
      table.floor[r].push_back(c.floor[r]);
      table.precision_limited[r].push_back(std::abs(c.kappa[r]) < flag_factor * c.floor[r]);
    }
  }
  return table;
}

}  // namespace bhq
