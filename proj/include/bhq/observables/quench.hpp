#pragma once

#include <memory>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "bhq/fockspace/fock_basis.hpp"
#include "bhq/fockspace/sparse_operator.hpp"
#include "bhq/propagator/krylov.hpp"

namespace bhq {

enum class Model { Dimer, Trimer };

std::string to_string(Model model);
/// "dimer" or "trimer"; anything else raises ConfigError.
Model model_from_string(const std::string& name);

/// Interaction quench at t = 0. Dimer couplings are alpha = -U(N+1)/(2J),
/// trimer couplings u = UN/J. Only a noninteracting prequench is supported.
struct QuenchSpec {
  Model model = Model::Dimer;
  int particles = 0;
  double pre_coupling = 0.0;
  double post_coupling = 0.0;
  double hopping = 1.0;
};

struct Quench {
  QuenchSpec spec;
  FockBasis basis;
  SparseOperator hamiltonian;  ///< postquench
  double hbar_eff = 0.0;       ///< 1/(N+1)
  /// Largest unstable rate of the postquench fixed point, if unstable.
  std::optional<double> lambda;
  std::optional<double> ehrenfest_time;

  int sites() const { return basis.sites(); }
  /// e.g. "alpha: 0 -> 2.5".
  std::string description() const;
};

/// Builds the basis and postquench Hamiltonian. Throws ConfigError for a
/// nonzero prequench coupling or N < 1.
Quench make_quench(const QuenchSpec& spec);

/// An operator prepared for repeated application in an Evolver's working
/// coordinates.
class WorkingOperator {
 public:
  virtual ~WorkingOperator() = default;
  virtual Eigen::MatrixXcd apply(const Eigen::MatrixXcd& work) const = 0;
  virtual bool hermitian() const = 0;
};

/// Propagation backend acting on batches of states (one per column).
class Evolver {
 public:
  virtual ~Evolver() = default;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
  /// Fock basis to working coordinates and back; inner products agree.
  virtual Eigen::MatrixXcd load(const Eigen::MatrixXcd& fock) const = 0;
  virtual Eigen::MatrixXcd unload(const Eigen::MatrixXcd& work) const = 0;
  /// exp(-iH dt) on every column; dt may be negative.
  virtual Eigen::MatrixXcd propagate(const Eigen::MatrixXcd& work, double dt) const = 0;
  virtual std::shared_ptr<const WorkingOperator> prepare(const SparseOperator& op) const = 0;
};

struct EvolverOptions {
  /// Use the exact reflection-spectrum backend when the Hamiltonian allows
  /// it and the dimension does not exceed this.
  std::size_t spectral_limit = 20001;
  KrylovConfig krylov;
};

/// Exact diagonalization for reflection-symmetric tridiagonal Hamiltonians
/// (the dimer), adaptive Krylov otherwise.
std::unique_ptr<Evolver> make_evolver(const SparseOperator& hamiltonian, const EvolverOptions& options = {});

struct WindowOptions {
  /// Half-width of the initial window in units of the largest energy spread
  /// of the reference states, beyond their extreme mean energies.
  double widths = 12.0;
  /// Largest relative norm a loaded state may have outside the window.
  double tolerance = 1e-12;
  /// The window doubles after each failed attempt.
  int attempts = 4;
};

/// Exact propagation restricted to the eigenstates in an energy window around
/// the reference states (columns, Fock basis). Needs a dimer-type Hamiltonian.
/// Loading a state the window misses throws ConvergenceError. Operators act
/// as their compression onto the window, so sandwiches between loaded states
/// are exact while products of several operators are not.
std::unique_ptr<Evolver> make_windowed_evolver(const SparseOperator& hamiltonian, const Eigen::MatrixXcd& reference,
                                               const WindowOptions& options = {});
std::unique_ptr<Evolver> make_krylov_evolver(const SparseOperator& hamiltonian, const KrylovConfig& config = {});

}  // namespace bhq
