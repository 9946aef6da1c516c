#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bhq/common.hpp"

namespace bhq {

using Rational = boost::multiprecision::cpp_rational;

/// Both coupling conventions of the model. The dimer uses
/// alpha = -U (N+1) / (2J); general L uses u = U N / J.
double alpha_from_u(double u, int particles);
double u_from_alpha(double alpha, int particles);
/// U/J for a dimer coupling alpha at particle number N.
double interaction_from_alpha(double alpha, int particles);
/// U/J for a scaled coupling u at particle number N.
double interaction_from_u(double u, int particles);

enum class ModeType { Stable, Unstable, Marginal };

std::string to_string(ModeType type);

struct StabilityMode {
  /// Plane-wave index m (quasi-momentum 2 pi m / L); 1 for the dimer.
  int mode_k = 1;
  ModeType type = ModeType::Stable;
  /// omega for stable modes, lambda for unstable ones, 0 when marginal.
  double value = 0.0;
  /// Signed squared frequency; negative means unstable.
  double omega_squared = 0.0;
  /// Number of modes sharing omega_squared (within 1e-9).
  int degeneracy = 1;
};

struct StabilitySpectrum {
  int sites = 2;
  /// (z, phi) = (0, 0) for the dimer; amplitudes psi_j for general L.
  std::vector<double> fixed_point;
  /// One entry per independent degree of freedom (L - 1).
  std::vector<StabilityMode> modes;
  /// Eigenvalues of the linearized flow (pairs +-i omega or +-lambda).
  std::vector<std::complex<double>> linearization_eigenvalues;
  std::vector<std::string> warnings;

  std::vector<double> stable_frequencies() const;
  std::vector<double> unstable_rates() const;
  bool has_marginal() const;

  /// `mode_k, type, value, degeneracy`
  void write_csv(std::ostream& out) const;
};

/// Classical dimer energy per particle (units J):
///   h(z, phi) = 1 - sqrt(1 - 4 z^2) cos(phi) - 2 alpha z^2.
double josephson_energy(double z, double phi, double alpha);

/// Quadratic analysis of h at the symmetric fixed point.
StabilitySpectrum dimer_frequencies(double alpha);

/// Taylor coefficients of h beyond its quadratic part.
struct VCoefficients {
  double alpha = 0.0;
  int order = 0;
  /// (power of z, power of phi) -> exact coefficient. Only total degrees
  /// 3..order appear; h is even in both variables so odd powers are absent.
  std::map<std::pair<int, int>, Rational> terms;

  Rational coefficient(int z_power, int phi_power) const;
  double evaluate(double z, double phi) const;
};

/// v(z, phi) = h - h(0,0) - quadratic part, expanded to total degree `order`.
/// The coupling enters h only through the quadratic term, so all
/// coefficients are alpha-independent rationals.
VCoefficients taylor_v(double alpha, int order);

/// Quadratic part of h: coefficients (of z^2, of phi^2).
std::pair<double, double> quadratic_part(double alpha);

/// Bogoliubov analysis of the discrete Gross-Pitaevskii energy
///   E = -sum_<ij> 2 sqrt(n_i n_j) cos(theta_i - theta_j) + (u/2) sum_j n_j^2
/// linearized about the uniform state n_j = 1/L in number-phase variables.
/// L = 2 has a single bond; L >= 3 is a ring.
StabilitySpectrum gp_stability(double u, int sites);

/// Closed-form squared frequency of plane-wave mode m:
///   omega^2 = l (l + 2u/L), l = 2 (1 - cos(2 pi m / L)) (l = 2 for L = 2).
double gp_omega_squared(double u, int sites, int mode);

/// Coupling u at which the softest mode of the L-site ring turns unstable,
/// located by bisection on [lo, hi].
double gp_critical_coupling(int sites, double lo = -1e3, double hi = 0.0, double tolerance = 1e-12);

/// t_E = ln(N + 1) / (2 lambda).
double ehrenfest_time(int particles, double lambda);

}  // namespace bhq
