#pragma once

#include <utility>
#include <vector>

#include "bhq/fockspace/prequench.hpp"
#include "bhq/observables/quench.hpp"
#include "bhq/observables/time_series.hpp"

namespace bhq {

/// <states[bra]| A(t) |states[ket]> on a nondecreasing grid for every
/// (bra, ket) pair. Each state is propagated once; A is applied only to the
/// distinct kets.
std::vector<std::vector<Complex>> heisenberg_sandwiches(const Evolver& evolver, const SparseOperator& a,
                                                        const std::vector<StateVector>& states,
                                                        const std::vector<std::pair<int, int>>& pairs,
                                                        const std::vector<double>& grid);

/// <k|A(t)|l> for each prequench label k in `k_labels` against label l.
/// Throws DomainError for unknown labels.
std::vector<TimeSeries> matrix_element_scan(const Evolver& evolver, const PrequenchBasis& basis,
                                            const SparseOperator& a, const std::vector<std::vector<int>>& k_labels,
                                            const std::vector<int>& l_label, const std::vector<double>& grid,
                                            const SeriesMeta& meta = {});

/// <k|[A(t), B(0)]|l> for Hermitian B.
std::vector<TimeSeries> commutator_scan(const Evolver& evolver, const PrequenchBasis& basis, const SparseOperator& a,
                                        const SparseOperator& b, const std::vector<std::vector<int>>& k_labels,
                                        const std::vector<int>& l_label, const std::vector<double>& grid,
                                        const SeriesMeta& meta = {});

/// "k=4,l=10" or "k=(1,2),l=(0,0)".
std::string label_pair(const std::vector<int>& k, const std::vector<int>& l);

}  // namespace bhq
