#pragma once

#include <vector>

#include "bhq/fockspace/prequench.hpp"

namespace bhq {

/// Boltzmann mixture of prequench eigenstates.
struct ThermalEnsemble {
  std::vector<PrequenchState> states;
  /// Normalized over the kept states.
  std::vector<double> weights;
  /// Boltzmann weight of every discarded state (bound for rings).
  double truncation_mass = 0.0;
  double beta = 0.0;
};

/// Lowest excitation energy of the noninteracting ring (2J for the dimer,
/// 2J(1 - cos(2 pi / L)) otherwise).
double prequench_gap(int sites, double hopping);

/// Keeps prequench states until the discarded weight is below
/// `max_truncation`. beta = infinity gives the ground state alone.
///
/// For the dimer the spectrum is exactly equally spaced, so the discarded
/// weight is a geometric tail. For rings it is bounded by
/// (dim - kept) exp(-beta E_last) / Z_kept.
ThermalEnsemble thermal_ensemble(const FockBasis& basis, double hopping, double beta,
                                 double max_truncation = 1e-10);

/// A single state with weight 1.
ThermalEnsemble pure_ensemble(PrequenchState state);

}  // namespace bhq
