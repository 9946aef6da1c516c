#include "bhq/observables/otoc.hpp"

namespace bhq {

TimeSeries otoc_numeric(const Evolver& evolver, const SparseOperator& a, const SparseOperator& b,
                        const ThermalEnsemble& ensemble, const std::vector<double>& grid, const SeriesMeta& meta) {
  if (!a.hermitian() || !b.hermitian()) throw DomainError("otoc_numeric: A and B must be Hermitian");
  if (ensemble.states.empty() || ensemble.states.size() != ensemble.weights.size()) {
    throw DomainError("otoc_numeric: ensemble has no states or mismatched weights");
  }
  if (grid.empty() || grid.front() < 0.0) throw DomainError("otoc_numeric: grid must start at t >= 0");
  const auto n = static_cast<Eigen::Index>(evolver.dim());
  const auto k = static_cast<Eigen::Index>(ensemble.states.size());
  Eigen::MatrixXcd fock(n, 2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const StateVector& psi = ensemble.states[static_cast<std::size_t>(i)].vector;
    if (psi.size() != n) throw DomainError("otoc_numeric: state dimension mismatch");
    fock.col(i) = psi;
    fock.col(k + i) = b.apply(psi);
  }
  const auto op_a = evolver.prepare(a);
  const auto op_b = evolver.prepare(b);

  // Columns 0..k-1: U psi; k..2k-1: U B psi.
  Eigen::MatrixXcd forward = evolver.load(fock);
  double t_now = 0.0;
  std::vector<double> values;
  values.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    if (g > 0 && !(t > grid[g - 1])) throw DomainError("otoc_numeric: grid must increase strictly");
    if (t > t_now) forward = evolver.propagate(forward, t - t_now);
    t_now = t;
    // Back to t = 0: U^+ A U psi and U^+ A U B psi.
    const Eigen::MatrixXcd back = evolver.propagate(op_a->apply(forward), -t);
    const Eigen::MatrixXcd w = back.rightCols(k) - op_b->apply(back.leftCols(k));
    double c = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) c += ensemble.weights[static_cast<std::size_t>(i)] * w.col(i).squaredNorm();
    values.push_back(c);
  }
  return TimeSeries::make_real(grid, values, meta);
}

}  // namespace bhq
