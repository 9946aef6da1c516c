#pragma once

#include <cstdint>
#include <vector>

#include "bhq/common.hpp"
#include "bhq/fockspace/sparse_operator.hpp"

namespace bhq {

struct EigenConfig {
  /// Residual target ||H psi - E psi|| <= tolerance * ||H||_est.
  double tolerance = 1e-13;
  /// Accepted when iteration stagnates above `tolerance` but below this.
  double acceptable_tolerance = 1e-10;
  int max_iterations = 1000;
  /// Extra block vectors beyond the requested count; 0 picks max(8, m/2).
  int guard_vectors = 0;
  /// Problems up to this dimension are diagonalized densely.
  std::size_t dense_limit = 1500;
  std::uint64_t seed = 0x5eed;
};

struct EigenResult {
  std::vector<double> energies;
  std::vector<StateVector> states;
  std::vector<double> residuals;
  int iterations = 0;
};

/// The m lowest eigenpairs of a Hermitian operator, energies ascending.
///
/// Small problems use a dense solver. Larger ones estimate the bottom of the
/// spectrum with a short Lanczos run, then iterate a block of vectors under
/// the shift-inverted operator (H - sigma)^{-1} with Rayleigh-Ritz
/// projection onto H. The block handles degenerate multiplets, which a
/// single-vector Lanczos recursion cannot resolve.
///
/// Throws ConvergenceError with the residual history if the block does not
/// converge within `max_iterations`.
EigenResult lowest_eigenpairs(const SparseOperator& hamiltonian, int count, const EigenConfig& config = {});

/// Dense Hermitian eigendecomposition of the operator (test oracle, small
/// dimensions only).
EigenResult dense_eigenpairs(const SparseOperator& hamiltonian);

}  // namespace bhq
