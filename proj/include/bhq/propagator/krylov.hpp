#pragma once

#include <vector>

#include "bhq/common.hpp"
#include "bhq/fockspace/sparse_operator.hpp"

namespace bhq {

struct KrylovConfig {
  int max_subspace = 30;
  /// Target for the a-posteriori local error estimate of one step.
  double step_tolerance = 1e-10;
  double max_dt = 1.0;
  /// Steps shorter than this abort with a stiffness diagnostic.
  double min_dt = 1e-12;

  void validate() const;
};

/// A pure state at time t (units 1/J, hbar = 1).
struct EvolvedState {
  StateVector coefficients;
  double t = 0.0;
  /// Sum over steps of |1 - ||psi|| | before renormalization.
  double norm_drift = 0.0;
  /// Sum of accepted local error estimates.
  double error_estimate = 0.0;
  /// Step size the controller would try next; 0 means "pick one".
  double suggested_dt = 0.0;

  static EvolvedState at_zero(StateVector psi);
};

/// exp(-i H (t_target - psi.t)) psi by adaptive Lanczos steps.
///
/// Each step builds a Krylov space of (H - <H>) around the current state,
/// picks the largest step whose error estimate
///   beta_m * dt * |e_m^T phi_1(-i dt T_m) e_1|
/// stays below step_tolerance, and renormalizes, logging the drift.
EvolvedState evolve(const SparseOperator& hamiltonian, EvolvedState psi, double t_target,
                    const KrylovConfig& config = {});

/// Dense exp(-i H t) psi; the oracle for small dimensions.
StateVector evolve_dense(const SparseOperator& hamiltonian, const StateVector& psi, double t);

/// <psi_k| e^{iHt} A e^{-iHt} |psi_l> on a nondecreasing grid, from one
/// propagation of each state.
std::vector<Complex> heisenberg_matrix_element(const SparseOperator& hamiltonian,
                                               const SparseOperator& observable,
                                               const StateVector& bra, const StateVector& ket,
                                               const std::vector<double>& grid,
                                               const KrylovConfig& config = {});

}  // namespace bhq
