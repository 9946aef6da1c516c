#pragma once

#include <map>
#include <utility>
#include <vector>

namespace bhq {

/// Polynomial symbol in the dimer phase-space variables: (z power, phi power) -> coefficient.
using PhaseSpacePolynomial = std::map<std::pair<int, int>, double>;

/// Power series (z(w), phi(w)) of the unstable manifold of the symmetric
/// fixed point of h(z, phi) for alpha > 1, normalized so that the linear part
/// matches the y-quadrature: z_1 = sqrt(1/2 lambda), phi_1 = sqrt(lambda/2).
/// Satisfies lambda w d/dw Gamma = X(Gamma) for the Hamiltonian vector field X.
struct ManifoldSeries {
  double alpha = 0.0;
  double lambda = 0.0;
  std::vector<double> z;
  std::vector<double> phi;
};

ManifoldSeries dimer_unstable_manifold(double alpha, int order);

/// Dominant-scaling constants C_0..C_order of a classical observable: the
/// coefficients of A(Gamma(w)) in powers of w. These equal the pure-growth
/// coefficients of y^k in the Heisenberg symbol at leading order in hbar.
std::vector<double> manifold_scaling(const ManifoldSeries& manifold, const PhaseSpacePolynomial& observable);

}  // namespace bhq
