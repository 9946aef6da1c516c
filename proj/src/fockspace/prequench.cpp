#include "bhq/fockspace/prequench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "bhq/fockspace/operators.hpp"

namespace bhq {
namespace {

using DenseMatrix = Eigen::MatrixXcd;

DenseMatrix projected(const SparseOperator& op, const DenseMatrix& block) {
  DenseMatrix m = block.adjoint() * (op.matrix() * block);
  return 0.5 * (m + m.adjoint());
}

// Rotates the columns [first, first + size) of `vectors` into eigenvectors of
// `op` projected onto their span; returns the projected eigenvalues.
Eigen::VectorXd diagonalize_in_place(const SparseOperator& op, DenseMatrix& vectors, Eigen::Index first,
                                     Eigen::Index size) {
  DenseMatrix block = vectors.middleCols(first, size);
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(projected(op, block));
  vectors.middleCols(first, size) = block * eig.eigenvectors();
  return eig.eigenvalues();
}

std::vector<std::pair<Eigen::Index, Eigen::Index>> runs(const std::vector<double>& values, double tol) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= static_cast<Eigen::Index>(values.size()); ++i) {
    if (i == static_cast<Eigen::Index>(values.size()) || values[i] - values[i - 1] > tol) {
      out.emplace_back(start, i - start);
      start = i;
    }
  }
  return out;
}

void align_to_largest_component(StateVector& v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  v *= std::conj(v(arg)) / std::abs(v(arg));
}

}  // namespace

int PrequenchBasis::find(const std::vector<int>& label) const {
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

double PrequenchBasis::orthonormality_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i; j < states.size(); ++j) {
      const Complex g = states[i].vector.dot(states[j].vector);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

void PrequenchBasis::write_csv(std::ostream& out) const {
  out << "index, energy, interaction_shift";
  if (!states.empty()) {
    for (std::size_t m = 0; m < states.front().label.size(); ++m) out << ", k" << (m + 1);
  }
  out << '\n';
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < states.size(); ++i) {
    out << i << ", " << states[i].energy << ", " << states[i].interaction_shift;
    for (int k : states[i].label) out << ", " << k;
    out << '\n';
  }
  out.precision(old);
}

PrequenchBasis prequench_eigenbasis(const FockBasis& basis, double hopping, int count,
                                    double degeneracy_epsilon, const EigenConfig& config) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  if (count < 1 || count > dim) {
    throw DomainError("prequench_eigenbasis: requested " + std::to_string(count) +
                      " states of a " + std::to_string(dim) + "-dimensional basis");
  }
  if (!(degeneracy_epsilon > 0.0)) throw DomainError("prequench_eigenbasis: degeneracy_epsilon must be > 0");
  if (hopping == 0.0) throw DomainError("prequench_eigenbasis: hopping must be nonzero");

  const double tol = degeneracy_epsilon * std::abs(hopping);
  const SparseOperator h0 = build_hamiltonian(basis, hopping, 0.0, true);

  // Ask for a few states beyond `count` so that the multiplet containing the
  // last requested state is complete.
  Eigen::Index request = std::min<Eigen::Index>(dim, count + std::max(4, count / 2));
  EigenResult eig;
  Eigen::Index cut = 0;
  while (true) {
    eig = lowest_eigenpairs(h0, static_cast<int>(request), config);
    cut = 0;
    for (Eigen::Index j = count - 1; j + 1 < request; ++j) {
      if (eig.energies[j + 1] - eig.energies[j] > tol) {
        cut = j + 1;
        break;
      }
    }
    if (cut == 0 && request == dim) cut = dim;
    if (cut > 0) break;
    request = std::min<Eigen::Index>(dim, 2 * request);
  }

  DenseMatrix vectors(dim, cut);
  for (Eigen::Index j = 0; j < cut; ++j) vectors.col(j) = eig.states[j];
  std::vector<double> energies(eig.energies.begin(), eig.energies.begin() + cut);

  const SparseOperator interaction = interaction_operator(basis);
  std::vector<SparseOperator> modes;
  for (int m = 1; m < basis.sites(); ++m) modes.push_back(mode_occupation_operator(basis, m));

  // Generic weights so that distinct mode occupations give distinct values.
  SparseOperator tie_breaker = modes.front().scaled(1.0);
  for (std::size_t m = 1; m < modes.size(); ++m) {
    tie_breaker = tie_breaker + modes[m].scaled(1.0 + std::sqrt(2.0) * static_cast<double>(m));
  }

  std::vector<PrequenchState> states(static_cast<std::size_t>(cut));
  const auto multiplets = runs(energies, tol);
  for (std::size_t g = 0; g < multiplets.size(); ++g) {
    const auto [first, size] = multiplets[g];
    if (size > 1) {
      const Eigen::VectorXd shifts = diagonalize_in_place(interaction, vectors, first, size);
      std::vector<double> sorted(shifts.data(), shifts.data() + shifts.size());
      const double vtol = 1e-9 * std::max(1.0, shifts.cwiseAbs().maxCoeff());
      for (const auto& [sub_first, sub_size] : runs(sorted, vtol)) {
        if (sub_size > 1) diagonalize_in_place(tie_breaker, vectors, first + sub_first, sub_size);
      }
    }
    for (Eigen::Index j = first; j < first + size; ++j) {
      auto& s = states[static_cast<std::size_t>(j)];
      s.vector = vectors.col(j);
      s.energy = energies[static_cast<std::size_t>(j)];
      s.interaction_shift = s.vector.dot(interaction.apply(s.vector)).real();
      s.multiplet = static_cast<int>(g);
      for (const auto& mode : modes) {
        s.label.push_back(static_cast<int>(std::lround(s.vector.dot(mode.apply(s.vector)).real())));
      }
    }
    std::sort(states.begin() + first, states.begin() + first + size,
              [](const PrequenchState& a, const PrequenchState& b) {
                const double scale = 1e-9 * std::max({1.0, std::abs(a.interaction_shift), std::abs(b.interaction_shift)});
                if (std::abs(a.interaction_shift - b.interaction_shift) > scale) {
                  return a.interaction_shift < b.interaction_shift;
                }
                return a.label < b.label;
              });
  }
  states.resize(static_cast<std::size_t>(count));

  PrequenchBasis out{std::move(states)};
  const bool dimer = basis.sites() == 2;
  const SparseOperator z = dimer ? z_operator(basis) : SparseOperator{};
  std::vector<SparseOperator> raising;
  if (!dimer) {
    for (int m = 1; m < basis.sites(); ++m) raising.push_back(mode_raising_operator(basis, m));
  }

  for (std::size_t i = 0; i < out.states.size(); ++i) {
    auto& s = out.states[i];
    bool aligned = false;
    for (std::size_t m = 0; m < s.label.size() && !aligned && i > 0; ++m) {
      if (s.label[m] == 0) continue;
      auto lower = s.label;
      --lower[m];
      const int p = out.find(lower);
      if (p < 0 || static_cast<std::size_t>(p) >= i) continue;
      const StateVector moved = dimer ? z.apply(out.states[p].vector) : raising[m].apply(out.states[p].vector);
      const Complex overlap = s.vector.dot(moved);
      if (std::abs(overlap) < 1e-8 * moved.norm()) continue;
      s.vector *= overlap / std::abs(overlap);
      aligned = true;
    }
    if (!aligned) align_to_largest_component(s.vector);
  }
  return out;
}

}  // namespace bhq
