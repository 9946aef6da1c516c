#pragma once

#include <vector>

#include "bhq/observables/ensemble.hpp"
#include "bhq/observables/quench.hpp"
#include "bhq/observables/time_series.hpp"

namespace bhq {

/// Orders above this are rejected: kappa_n of a near-Gaussian distribution
/// is a cancellation between moments of size sigma^n (n-1)!!, and at n = 12
/// the double-precision probabilities already leave only a few digits.
inline constexpr int kMaxCumulantOrder = 12;

/// Cumulants kappa_1..kappa_n_max from raw moments m_0 = 1, m_1, ...
std::vector<double> moments_to_cumulants(const std::vector<double>& moments);
/// Raw moments m_0..m_n from cumulants kappa_1..kappa_n (index 0 unused).
std::vector<double> cumulants_to_moments(const std::vector<double>& cumulants);

struct DistributionCumulants {
  /// kappa[n] for n = 1..n_max (index 0 unused).
  std::vector<double> kappa;
  /// Absolute error scale of kappa[n] implied by the input precision.
  std::vector<double> floor;
};

/// Cumulants of the discrete distribution sum_i p_i delta(a - values_i),
/// from central moments accumulated in double-double arithmetic. The floor
/// is `input_precision` times the sum of magnitudes entering kappa_n.
DistributionCumulants distribution_cumulants(const std::vector<double>& values, const std::vector<double>& probabilities,
                                             int n_max, double input_precision = 1e-15);

struct CumulantTable {
  std::vector<double> grid;
  int n_max = 0;
  /// kappa[n][i] at grid[i], n = 1..n_max.
  std::vector<std::vector<double>> kappa;
  std::vector<std::vector<double>> floor;
  /// |kappa| below `flag_factor` times the floor.
  std::vector<std::vector<bool>> precision_limited;

  TimeSeries series(int n, const SeriesMeta& meta = {}) const;
};

/// kappa_n(t) of the outcome distribution of a diagonal observable A in the
/// ensemble mixture, read off |psi_k(t)|^2 in the Fock basis.
/// `input_precision` is the relative accuracy assumed for the propagated
/// probabilities (the propagator, not the arithmetic, limits it).
/// Throws DomainError for non-diagonal A or n_max outside 1..12.
CumulantTable cumulants_numeric(const Evolver& evolver, const SparseOperator& a_diagonal,
                                const ThermalEnsemble& ensemble, const std::vector<double>& grid, int n_max,
                                double flag_factor = 10.0, double input_precision = 1e-12);

}  // namespace bhq
