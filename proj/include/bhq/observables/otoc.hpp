#pragma once

#include <vector>

#include "bhq/observables/ensemble.hpp"
#include "bhq/observables/quench.hpp"
#include "bhq/observables/time_series.hpp"

namespace bhq {

/// C(t) = -<[A(t), B(0)]^2> averaged over the ensemble.
///
/// Per state psi: w = A(t) B psi - B A(t) psi, contribution ||w||^2. The
/// forward states U(t) psi and U(t) B psi are carried along the grid; each
/// grid point costs one backward propagation of the two vectors A U psi and
/// A U B psi, batched over the ensemble. Throws DomainError unless A and B
/// are Hermitian.
TimeSeries otoc_numeric(const Evolver& evolver, const SparseOperator& a, const SparseOperator& b,
                        const ThermalEnsemble& ensemble, const std::vector<double>& grid, const SeriesMeta& meta = {});

}  // namespace bhq
