#pragma once

#include <map>
#include <utility>
#include <vector>

#include "bhq/weyl/gaussian.hpp"
#include "bhq/weyl/manifold.hpp"
#include "bhq/weyl/weyl_polynomial.hpp"

namespace bhq {

/// Analytic predictions for one observable after a quench to an unstable
/// fixed point with rate lambda.
struct ScalingPrediction {
  double lambda = 0.0;
  /// C_k: A_H(t) ~ sum_k C_k (sqrt(hbar) e^{lambda t} b_+)^k.
  std::vector<double> C;
  /// c_kl = C_{|k-l|} <k|b_+^{|k-l|}|l>, filled by predict_ckl.
  std::map<std::pair<int, int>, Complex> ckl;
  /// OTOC coefficients c_m, filled by otoc_series.
  std::vector<double> otoc_c;
  /// Cumulant prefactors d_n (index n), filled by cumulant_prediction.
  std::map<int, double> d;
  /// Everything in the Heisenberg symbol except the pure-growth terms.
  WeylPolynomial remainder;

  /// hbar e^{2 lambda t} <b_+^2>.
  double renorm_param(double t, double hbar, double bplus2) const;
};

/// Reads C_k off a single-mode Heisenberg symbol: the coefficient of
/// y^k t^0 e^{k lambda t} hbar^{k/2}.
ScalingPrediction dominant_scaling(const WeylPolynomial& heisenberg);

/// C_0..C_order from the unstable manifold of the dimer at coupling alpha.
ScalingPrediction manifold_prediction(double alpha, const PhaseSpacePolynomial& observable, int order);

/// c_kl = C_{|k-l|} <k|b_+^{|k-l|}|l>; cached in pred.ckl.
/// Throws OrderError when C_{|k-l|} was not computed.
Complex predict_ckl(ScalingPrediction& pred, int k, int l, double phi);

/// Series a_m X^m in the renormalized parameter X = hbar e^{2 lambda t} <b_+^2>.
struct RenormalizedSeries {
  std::vector<double> coefficients;
  double lambda = 0.0;
  double bplus2 = 0.0;

  double in_parameter(double x) const;
  /// Value at time t for the given hbar.
  double at(double t, double hbar) const;
};

enum class WickFactor {
  Pairings,   ///< <b_+^{2m}> = (number of pairings) <b_+^2>^m
  Factorial,  ///< the variant with (2m - 1)! in place of the pairing count
};

/// <A(t)> = sum_m w_m C_{2m} X^m with w_m from the chosen factor. For
/// Pairings the weight is taken from wick_expectation of y^{2m}.
RenormalizedSeries expectation_series(const ScalingPrediction& pred, const QuadratureCovariance& cov,
                                      WickFactor factor = WickFactor::Pairings);

/// c_m of C(t) = -<[A_H(t), B]^2> = (hbar e^{lambda t})^2 sum_m c_m X^m,
/// from the commutator of the dominant part of A_H with the linear part of B
/// (a single-mode symbol at t = 0, hbar^{1/2} per quadrature), its star
/// square and the Gaussian expectation. Stores the coefficients in
/// pred.otoc_c and returns the series with the (hbar e^{lambda t})^2 prefactor
/// left out.
RenormalizedSeries otoc_series(ScalingPrediction& pred, const WeylPolynomial& b, const QuadratureCovariance& cov,
                               int max_m);

/// Full finite-time OTOC -<[A_H(t), B]^2> from a Heisenberg symbol, with all
/// terms up to hbar^{max_half_order/2}.
ExpPoly otoc_expansion(const WeylPolynomial& heisenberg, const WeylPolynomial& b,
                       const std::vector<QuadratureCovariance>& cov, int max_half_order);

/// Formal cumulants of sum_k C_k s^k g^k with g standard normal, expanded in
/// s^2 (equivalently in X for variance <b_+^2>).
struct CumulantSeries {
  int n = 0;
  /// coefficients[j] multiplies X^j; entries below n - 1 vanish.
  std::vector<double> coefficients;
  double d() const { return coefficients.at(static_cast<std::size_t>(n - 1)); }
};

/// Computes kappa_n, checks that powers below X^{n-1} cancel, and stores d_n.
/// Throws Error when the cancellation fails and OrderError when C is too short.
CumulantSeries cumulant_prediction(ScalingPrediction& pred, int n);

}  // namespace bhq
