#include "bhq/observables/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace bhq {

double prequench_gap(int sites, double hopping) {
  if (sites == 2) return 2.0 * std::abs(hopping);
  return 2.0 * std::abs(hopping) * (1.0 - std::cos(2.0 * std::numbers::pi / sites));
}

ThermalEnsemble pure_ensemble(PrequenchState state) {
  ThermalEnsemble e;
  e.states.push_back(std::move(state));
  e.weights = {1.0};
  e.beta = std::numeric_limits<double>::infinity();
  return e;
}

ThermalEnsemble thermal_ensemble(const FockBasis& basis, double hopping, double beta, double max_truncation) {
  if (!(beta > 0.0)) throw DomainError("thermal_ensemble: beta must be positive");
  if (!(max_truncation > 0.0)) throw DomainError("thermal_ensemble: truncation target must be positive");
  const std::size_t dim = basis.size();
  if (std::isinf(beta)) {
    auto pre = prequench_eigenbasis(basis, hopping, 1);
    return pure_ensemble(std::move(pre.states.front()));
  }

  const double gap = prequench_gap(basis.sites(), hopping);
  // First guess from the lowest gap alone.
  std::size_t count = static_cast<std::size_t>(std::ceil(-std::log(max_truncation) / (beta * gap))) + 1;
  while (true) {
    count = std::min(count, dim);
    auto pre = prequench_eigenbasis(basis, hopping, static_cast<int>(count));
    const double e0 = pre.states.front().energy;
    std::vector<double> w;
    double z = 0.0;
    for (const auto& s : pre.states) {
      w.push_back(std::exp(-beta * (s.energy - e0)));
      z += w.back();
    }
    double tail = 0.0;
    if (count < dim) {
      if (basis.sites() == 2) {
        // Levels E_0 + gap k, k < dim: the discarded share of Z is geometric.
        const double r = std::exp(-beta * gap);
        const double r_dim = std::pow(r, static_cast<double>(dim));
        tail = (std::pow(r, static_cast<double>(count)) - r_dim) / (1.0 - r_dim);
      } else {
        tail = static_cast<double>(dim - count) * std::exp(-beta * (pre.states.back().energy - e0)) / z;
      }
    }
    if (tail < max_truncation || count == dim) {
      ThermalEnsemble e;
      e.beta = beta;
      e.truncation_mass = tail;
      for (double& x : w) x /= z;
      e.weights = std::move(w);
      e.states = std::move(pre.states);
      return e;
    }
    count *= 2;
  }
}

}  // namespace bhq
