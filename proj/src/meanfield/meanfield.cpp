#include "bhq/meanfield/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>

namespace bhq {
namespace {

constexpr double kMarginal = 1e-9;

void classify(StabilitySpectrum& spectrum) {
  for (auto& mode : spectrum.modes) {
    const double w2 = mode.omega_squared;
    if (std::abs(w2) < kMarginal) {
      mode.type = ModeType::Marginal;
      mode.value = 0.0;
    } else if (w2 > 0.0) {
      mode.type = ModeType::Stable;
      mode.value = std::sqrt(w2);
    } else {
      mode.type = ModeType::Unstable;
      mode.value = std::sqrt(-w2);
    }
  }
  for (auto& mode : spectrum.modes) {
    mode.degeneracy = static_cast<int>(std::count_if(
        spectrum.modes.begin(), spectrum.modes.end(),
        [&](const StabilityMode& other) { return std::abs(other.omega_squared - mode.omega_squared) < kMarginal; }));
  }
}

Rational factorial(int n) {
  Rational f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

double alpha_from_u(double u, int particles) {
  if (particles < 1) throw DomainError("alpha_from_u: particle number must be >= 1");
  return -u * (particles + 1.0) / (2.0 * particles);
}

double u_from_alpha(double alpha, int particles) {
  if (particles < 1) throw DomainError("u_from_alpha: particle number must be >= 1");
  return -2.0 * alpha * particles / (particles + 1.0);
}

double interaction_from_alpha(double alpha, int particles) { return -2.0 * alpha / (particles + 1.0); }

double interaction_from_u(double u, int particles) { return u / particles; }

std::string to_string(ModeType type) {
  switch (type) {
    case ModeType::Stable:
      return "stable";
    case ModeType::Unstable:
      return "unstable";
    case ModeType::Marginal:
      return "marginal";
  }
  return "unknown";
}

std::vector<double> StabilitySpectrum::stable_frequencies() const {
  std::vector<double> out;
  for (const auto& m : modes) {
    if (m.type == ModeType::Stable) out.push_back(m.value);
  }
  return out;
}

std::vector<double> StabilitySpectrum::unstable_rates() const {
  std::vector<double> out;
  for (const auto& m : modes) {
    if (m.type == ModeType::Unstable) out.push_back(m.value);
  }
  return out;
}

bool StabilitySpectrum::has_marginal() const {
  return std::any_of(modes.begin(), modes.end(), [](const StabilityMode& m) { return m.type == ModeType::Marginal; });
}

void StabilitySpectrum::write_csv(std::ostream& out) const {
  const auto old = out.precision(17);
  out << "mode_k, type, value, degeneracy\n";
  for (const auto& m : modes) {
    out << m.mode_k << ", " << to_string(m.type) << ", " << m.value << ", " << m.degeneracy << '\n';
  }
  out.precision(old);
}

double josephson_energy(double z, double phi, double alpha) {
  if (!(std::abs(z) <= 0.5)) {
    std::ostringstream msg;
    msg << "josephson_energy: |z| = " << std::abs(z) << " exceeds 1/2";
    throw DomainError(msg.str());
  }
  return 1.0 - std::sqrt(1.0 - 4.0 * z * z) * std::cos(phi) - 2.0 * alpha * z * z;
}

std::pair<double, double> quadratic_part(double alpha) { return {2.0 - 2.0 * alpha, 0.5}; }

StabilitySpectrum dimer_frequencies(double alpha) {
  StabilitySpectrum s;
  s.sites = 2;
  s.fixed_point = {0.0, 0.0};
  const auto [a, b] = quadratic_part(alpha);
  // z' = dh/dphi = 2b phi, phi' = -dh/dz = -2a z, so omega^2 = 4ab.
  StabilityMode mode;
  mode.omega_squared = 4.0 * a * b;
  s.modes.push_back(mode);
  const std::complex<double> root = std::sqrt(std::complex<double>(-mode.omega_squared, 0.0));
  s.linearization_eigenvalues = {root, -root};
  classify(s);
  if (s.has_marginal()) s.warnings.push_back("alpha = 1 is the bifurcation point; the mode is marginal");
  return s;
}

Rational VCoefficients::coefficient(int z_power, int phi_power) const {
  const auto it = terms.find({z_power, phi_power});
  return it == terms.end() ? Rational(0) : it->second;
}

double VCoefficients::evaluate(double z, double phi) const {
  double sum = 0.0;
  for (const auto& [powers, c] : terms) {
    sum += static_cast<double>(c) * std::pow(z, powers.first) * std::pow(phi, powers.second);
  }
  return sum;
}

VCoefficients taylor_v(double alpha, int order) {
  if (order < 3) throw DomainError("taylor_v: order must be >= 3, got " + std::to_string(order));
  VCoefficients v;
  v.alpha = alpha;
  v.order = order;
  // sqrt(1 - 4 z^2) = sum_a binom(1/2, a) (-4)^a z^{2a};  cos(phi) = sum_b (-1)^b phi^{2b} / (2b)!
  const int half = order / 2;
  std::vector<Rational> sqrt_coef(half + 1), cos_coef(half + 1);
  Rational binom = 1;
  Rational power = 1;
  for (int a = 0; a <= half; ++a) {
    if (a > 0) {
      binom *= (Rational(1, 2) - (a - 1)) / Rational(a);
      power *= -4;
    }
    sqrt_coef[a] = binom * power;
  }
  for (int b = 0; b <= half; ++b) cos_coef[b] = Rational(b % 2 == 0 ? 1 : -1) / factorial(2 * b);

  for (int a = 0; a <= half; ++a) {
    for (int b = 0; a + b <= half; ++b) {
      if (a + b < 2) continue;  // constant and quadratic parts are excluded
      const Rational c = -sqrt_coef[a] * cos_coef[b];
      if (c != 0) v.terms[{2 * a, 2 * b}] = c;
    }
  }
  return v;
}

double gp_omega_squared(double u, int sites, int mode) {
  if (sites < 2) throw DomainError("gp_omega_squared: need L >= 2");
  if (mode < 1 || mode >= sites) throw DomainError("gp_omega_squared: mode index outside [1, L-1]");
  const double l = sites == 2 ? 2.0 : 2.0 * (1.0 - std::cos(2.0 * std::numbers::pi * mode / sites));
  return l * (l + 2.0 * u / sites);
}

StabilitySpectrum gp_stability(double u, int sites) {
  if (sites < 2) throw DomainError("gp_stability: need L >= 2, got " + std::to_string(sites));
  const int n = sites;
  Eigen::MatrixXd h_theta = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd h_number = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::pair<int, int>> bond_list;
  for (int j = 0; j + 1 < n; ++j) bond_list.emplace_back(j, j + 1);
  if (n > 2) bond_list.emplace_back(n - 1, 0);
  const double occupation = 1.0 / n;
  for (const auto& [i, j] : bond_list) {
    // -2 sqrt(n_i n_j) cos(theta_i - theta_j), second derivatives at n = 1/L, theta = 0.
    const double tt = 2.0 * occupation;
    h_theta(i, i) += tt;
    h_theta(j, j) += tt;
    h_theta(i, j) -= tt;
    h_theta(j, i) -= tt;
    const double nn = 0.5 / occupation;
    h_number(i, i) += nn;
    h_number(j, j) += nn;
    h_number(i, j) -= nn;
    h_number(j, i) -= nn;
  }
  for (int j = 0; j < n; ++j) h_number(j, j) += u;

  // Orthonormal basis of the subspace with sum_j dn_j = 0 (and the matching
  // relative phases); the global phase and the total norm drop out.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::VectorXd::Ones(n));
  const Eigen::MatrixXd full_q = qr.householderQ();
  const Eigen::MatrixXd q = full_q.rightCols(n - 1);
  const Eigen::MatrixXd a = q.transpose() * h_theta * q;
  const Eigen::MatrixXd b = q.transpose() * h_number * q;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a_eig(a);
  const Eigen::MatrixXd root = a_eig.operatorSqrt();
  const Eigen::MatrixXd c = root * b * root;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> c_eig(0.5 * (c + c.transpose()));

  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(2 * (n - 1), 2 * (n - 1));
  flow.topRightCorner(n - 1, n - 1) = a;
  flow.bottomLeftCorner(n - 1, n - 1) = -b;
  Eigen::EigenSolver<Eigen::MatrixXd> flow_eig(flow);

  StabilitySpectrum s;
  s.sites = n;
  s.fixed_point.assign(static_cast<std::size_t>(n), std::sqrt(occupation));
  for (Eigen::Index k = 0; k < flow_eig.eigenvalues().size(); ++k) {
    s.linearization_eigenvalues.push_back(flow_eig.eigenvalues()(k));
  }

  // Attach plane-wave labels by matching against the closed form.
  std::vector<std::pair<double, int>> closed;
  for (int m = 1; m < n; ++m) closed.emplace_back(gp_omega_squared(u, n, m), m);
  std::sort(closed.begin(), closed.end());
  for (int k = 0; k < n - 1; ++k) {
    const double numeric = c_eig.eigenvalues()(k);
    const double expected = closed[k].first;
    if (std::abs(numeric - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      std::ostringstream msg;
      msg << "gp_stability: numeric omega^2 " << numeric << " disagrees with the closed form " << expected;
      throw Error(msg.str());
    }
    StabilityMode mode;
    mode.mode_k = closed[k].second;
    mode.omega_squared = numeric;
    s.modes.push_back(mode);
  }
  std::sort(s.modes.begin(), s.modes.end(),
            [](const StabilityMode& x, const StabilityMode& y) { return x.mode_k < y.mode_k; });
  classify(s);

  if (!s.unstable_rates().empty()) {
    std::ostringstream msg;
    msg << "uniform state is a saddle at u = " << u
        << "; it is a valid postquench fixed point but not the prequench minimum";
    s.warnings.push_back(msg.str());
  }
  if (s.has_marginal()) s.warnings.push_back("marginal modes present: coupling sits at a bifurcation");
  return s;
}

double gp_critical_coupling(int sites, double lo, double hi, double tolerance) {
  auto softest = [sites](double u) {
    double w = std::numeric_limits<double>::infinity();
    for (int m = 1; m < sites; ++m) w = std::min(w, gp_omega_squared(u, sites, m));
    return w;
  };
  if (softest(lo) * softest(hi) > 0.0) {
    throw DomainError("gp_critical_coupling: no sign change of omega^2 on the bracket");
  }
  const auto [a, b] = boost::math::tools::bisect(
      softest, lo, hi, [tolerance](double x, double y) { return std::abs(x - y) <= tolerance; });
  return 0.5 * (a + b);
}

double ehrenfest_time(int particles, double lambda) {
  if (particles < 2) throw DomainError("ehrenfest_time: need N >= 2");
  if (!(lambda > 0.0)) {
    throw StabilityError("ehrenfest_time: lambda must be > 0 (a stable quench has no Ehrenfest time)");
  }
  return std::log(particles + 1.0) / (2.0 * lambda);
}

}  // namespace bhq
