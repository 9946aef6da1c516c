#pragma once

#include "bhq/meanfield/meanfield.hpp"
#include "bhq/weyl/weyl_polynomial.hpp"

namespace bhq {

/// Symbol of v in the dimer quadratures: z = sqrt(hbar/2 lambda)(x + y),
/// phi = sqrt(lambda hbar/2)(y - x). A degree-d term carries hbar^{d/2}.
/// The result is complete up to the Taylor order of `v`.
WeylPolynomial quantize_v(const VCoefficients& v, double lambda);

/// Symbol of the quadratic part -lambda hbar x y (for reference and tests).
WeylPolynomial quadratic_symbol(double lambda);

struct DysonConfig {
  /// Keep terms up to hbar^{max_half_order/2}.
  int max_half_order = 6;
};

/// Heisenberg symbol A_H(t) = e^{tL} A with L = L_2 + L_v, expanded as
///   F_0(t) = e^{tL_2} A,  F_n(t) = int_0^t e^{(t-s)L_2} L_v F_{n-1}(s) ds,
/// L_v = (i/hbar)[v, .]. A term of v with degree d raises the hbar half-order
/// by d - 2, so the series terminates at finite n.
/// Throws OrderError when v is not expanded far enough.
WeylPolynomial dyson_expand(const WeylPolynomial& a, const WeylPolynomial& v, int max_half_order);

}  // namespace bhq
