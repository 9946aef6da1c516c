#pragma once

#include <vector>

#include "bhq/weyl/weyl_polynomial.hpp"

namespace bhq {

/// Symmetrized second moments of one quadrature pair (x, y) = (b_-, b_+).
struct QuadratureCovariance {
  double minus2 = 0.5;  ///< <x^2>
  double plus2 = 0.5;   ///< <y^2>
  double cross = 0.0;   ///< <(xy + yx)/2>
};

/// Angle phi = arctan(omega / lambda) between the prequench ladder operators
/// and the postquench quadratures, b_+ = (e^{-i phi} a + e^{i phi} a^+)/sqrt(2 sin 2 phi).
double quadrature_angle(double omega, double lambda);

/// Thermal oscillator state with level spacing delta at inverse temperature
/// beta (infinity selects the ground state):
///   <b_+^2> = <b_-^2> = coth(beta delta/2) / (2 sin 2 phi),
///   <{b_-, b_+}/2>   = coth(beta delta/2) cos 2 phi / (2 sin 2 phi).
QuadratureCovariance thermal_covariance(double beta, double delta, double phi);

/// Number of perfect pairings of n objects: P(n) = (n - 1) P(n - 2), P(0) = 1,
/// zero for odd n.
double pairing_count(int n);

/// E[x^mu y^nu] for a centred Gaussian (Isserlis), which is the expectation of
/// the symmetric-ordered operator {b_-^mu b_+^nu}_s.
double gaussian_moment(int mu, int nu, const QuadratureCovariance& cov);

/// Expectation of a symmetric-ordered polynomial in a Gaussian state with
/// independent modes; returns the full time dependence.
ExpPoly wick_expectation(const WeylPolynomial& poly, const std::vector<QuadratureCovariance>& cov);

/// <k| b_+^n |l> in the prequench oscillator basis, a|k> = sqrt(k)|k-1>.
/// Exactly zero when n < |k - l| or n - |k - l| is odd.
Complex bplus_matrix_element(int k, int l, int n, double phi);

}  // namespace bhq
