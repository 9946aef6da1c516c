#include "bhq/observables/matrix_elements.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace bhq {
namespace {

std::string format_label(const std::vector<int>& label) {
  std::ostringstream out;
  if (label.size() == 1) {
    out << label[0];
  } else {
    out << '(';
    for (std::size_t i = 0; i < label.size(); ++i) out << (i ? "," : "") << label[i];
    out << ')';
  }
  return out.str();
}

const StateVector& lookup(const PrequenchBasis& basis, const std::vector<int>& label) {
  const int i = basis.find(label);
  if (i < 0) throw DomainError("matrix_element_scan: no prequench state with label " + format_label(label));
  return basis.states[static_cast<std::size_t>(i)].vector;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("time grid is empty");
  if (grid.front() < 0.0) throw DomainError("time grid starts before t = 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("time grid must increase strictly");
  }
}

}  // namespace

std::string label_pair(const std::vector<int>& k, const std::vector<int>& l) {
  return "k=" + format_label(k) + ",l=" + format_label(l);
}

std::vector<std::vector<Complex>> heisenberg_sandwiches(const Evolver& evolver, const SparseOperator& a,
                                                        const std::vector<StateVector>& states,
                                                        const std::vector<std::pair<int, int>>& pairs,
                                                        const std::vector<double>& grid) {
  check_grid(grid);
  const auto n = static_cast<Eigen::Index>(evolver.dim());
  Eigen::MatrixXcd fock(n, static_cast<Eigen::Index>(states.size()));
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].size() != n) throw DomainError("heisenberg_sandwiches: state dimension mismatch");
    fock.col(static_cast<Eigen::Index>(i)) = states[i];
  }
  std::map<int, Eigen::Index> ket_column;
  for (const auto& [bra, ket] : pairs) {
    if (bra < 0 || ket < 0 || bra >= static_cast<int>(states.size()) || ket >= static_cast<int>(states.size())) {
      throw DomainError("heisenberg_sandwiches: pair index out of range");
    }
    ket_column.emplace(ket, static_cast<Eigen::Index>(ket_column.size()));
  }
  const auto op = evolver.prepare(a);

  std::vector<std::vector<Complex>> out(pairs.size());
  Eigen::MatrixXcd work = evolver.load(fock);
  double t_now = 0.0;
  Eigen::MatrixXcd kets(work.rows(), static_cast<Eigen::Index>(ket_column.size()));
  for (double t : grid) {
    if (t > t_now) work = evolver.propagate(work, t - t_now);
    t_now = t;
    for (const auto& [ket, col] : ket_column) kets.col(col) = work.col(ket);
    const Eigen::MatrixXcd a_kets = op->apply(kets);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto& [bra, ket] = pairs[p];
      out[p].push_back(work.col(bra).dot(a_kets.col(ket_column.at(ket))));
    }
  }
  return out;
}

std::vector<TimeSeries> matrix_element_scan(const Evolver& evolver, const PrequenchBasis& basis,
                                            const SparseOperator& a, const std::vector<std::vector<int>>& k_labels,
                                            const std::vector<int>& l_label, const std::vector<double>& grid,
                                            const SeriesMeta& meta) {
  std::vector<StateVector> states{lookup(basis, l_label)};
  std::vector<std::pair<int, int>> pairs;
  for (const auto& k : k_labels) {
    states.push_back(lookup(basis, k));
    pairs.emplace_back(static_cast<int>(states.size()) - 1, 0);
  }
  const auto values = heisenberg_sandwiches(evolver, a, states, pairs, grid);
  std::vector<TimeSeries> out;
  for (std::size_t i = 0; i < k_labels.size(); ++i) {
    SeriesMeta m = meta;
    m.label = label_pair(k_labels[i], l_label);
    out.push_back(TimeSeries::make_complex(grid, values[i], m));
  }
  return out;
}

std::vector<TimeSeries> commutator_scan(const Evolver& evolver, const PrequenchBasis& basis, const SparseOperator& a,
                                        const SparseOperator& b, const std::vector<std::vector<int>>& k_labels,
                                        const std::vector<int>& l_label, const std::vector<double>& grid,
                                        const SeriesMeta& meta) {
  if (!b.hermitian()) throw DomainError("commutator_scan: B must be Hermitian");
  // <k|A(t) B|l> - <B k|A(t)|l>
  const StateVector& l = lookup(basis, l_label);
  std::vector<StateVector> states{l, b.apply(l)};
  std::vector<std::pair<int, int>> pairs;
  for (const auto& label : k_labels) {
    const StateVector& k = lookup(basis, label);
    states.push_back(k);
    states.push_back(b.apply(k));
    const int ki = static_cast<int>(states.size()) - 2;
    pairs.emplace_back(ki, 1);
    pairs.emplace_back(ki + 1, 0);
  }
  const auto values = heisenberg_sandwiches(evolver, a, states, pairs, grid);
  std::vector<TimeSeries> out;
  for (std::size_t i = 0; i < k_labels.size(); ++i) {
    std::vector<Complex> v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) v[j] = values[2 * i][j] - values[2 * i + 1][j];
    SeriesMeta m = meta;
    m.label = label_pair(k_labels[i], l_label);
    out.push_back(TimeSeries::make_complex(grid, std::move(v), m));
  }
  return out;
}

}  // namespace bhq
