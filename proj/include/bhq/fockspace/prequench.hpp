#pragma once

#include <iosfwd>
#include <vector>

#include "bhq/common.hpp"
#include "bhq/fockspace/fock_basis.hpp"
#include "bhq/propagator/eigensolver.hpp"

namespace bhq {

/// One prequench eigenstate with its excitation label.
struct PrequenchState {
  StateVector vector;
  double energy = 0.0;
  /// <V> inside the degenerate multiplet, V = sum_j n_j (n_j - 1) / 2.
  double interaction_shift = 0.0;
  /// Occupations of the plane-wave modes m = 1 .. L-1 (rounded). For the
  /// dimer this is the single entry k; for the trimer (k1, k2) counts
  /// quanta in the q = +2pi/3 and q = -2pi/3 modes.
  std::vector<int> label;
  /// Index of the multiplet the state belongs to (0 = ground multiplet).
  int multiplet = 0;
};

struct PrequenchBasis {
  std::vector<PrequenchState> states;

  /// Position of the state carrying `label`, or -1.
  int find(const std::vector<int>& label) const;
  /// Largest |<i|j> - delta_ij| over the stored states.
  double orthonormality_defect() const;
  /// `index, energy, interaction_shift, label...`
  void write_csv(std::ostream& out) const;
};

/// The m lowest eigenstates of the U=0 ring Hamiltonian with hopping J.
///
/// Energies closer than degeneracy_epsilon * |J| form a multiplet. Inside a
/// multiplet the basis is rotated to diagonalize the interaction operator
/// projected onto it (an infinitesimal interaction selects the states).
/// States still tied after that are split by the plane-wave occupations,
/// which commute with both the hopping and the interaction.
///
/// States are ordered by energy, then by interaction shift, then by label.
/// Phases: the first state has its largest component real and positive.
/// Every other state |s> is aligned with a lower state |p> one quantum
/// below it so that <s|X|p> > 0, with X = z for the dimer and
/// X = a_m^+ a_0 (m the mode that gained a quantum) otherwise.
PrequenchBasis prequench_eigenbasis(const FockBasis& basis, double hopping, int count,
                                    double degeneracy_epsilon = 1e-8,
                                    const EigenConfig& config = {});

}  // namespace bhq
