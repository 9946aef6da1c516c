#pragma once

#include <string>
#include <string_view>

#include "bhq/fockspace/fock_basis.hpp"
#include "bhq/fockspace/sparse_operator.hpp"

namespace bhq {

/// Bose-Hubbard Hamiltonian
///   H = -J sum_<ij> (a_i^+ a_j + h.c.) + (U/2) sum_j (a_j^+)^2 a_j^2.
/// Bonds connect neighbouring sites; `periodic` closes the chain into a ring.
/// A dimer always has a single bond.
SparseOperator build_hamiltonian(const FockBasis& basis, double hopping, double interaction,
                                 bool periodic = true);

/// sum_j n_j (n_j - 1) / 2, i.e. the interaction term per unit U.
SparseOperator interaction_operator(const FockBasis& basis);

/// Dimer imbalance z = (n_1 - n_2) / (2 (N+1)).
SparseOperator z_operator(const FockBasis& basis);

/// n_j for 1-based site j, or n_j / N when `scaled`.
SparseOperator site_number_operator(const FockBasis& basis, int site, bool scaled = false);

/// a_q^+ a_q for the plane-wave mode q = 2 pi m / L, with
/// a_q = L^{-1/2} sum_j exp(-i q j) a_j. Commutes with the U=0 Hamiltonian.
SparseOperator mode_occupation_operator(const FockBasis& basis, int mode);

/// a_q^+ a_0: moves one particle from the condensate mode into mode q.
SparseOperator mode_raising_operator(const FockBasis& basis, int mode);

/// Cyclic translation |n_1, ..., n_L> -> |n_L, n_1, ..., n_{L-1}>.
SparseOperator cyclic_shift_operator(const FockBasis& basis);

/// Diagonal operator from a polynomial expression in the diagonal generators
///   z          dimer imbalance (n_1 - n_2)/(2(N+1))
///   n1 .. nL   site occupations
///   z1 .. zL   scaled occupations n_j / N
/// combined with numbers, + - * / ^ (non-negative integer powers) and
/// parentheses, e.g. "z + z^2" or "0.5*(n1 - n2)/N". The symbol N is the
/// particle number. Unknown names raise ConfigError.
SparseOperator operator_polynomial(const FockBasis& basis, std::string_view expression);

}  // namespace bhq
