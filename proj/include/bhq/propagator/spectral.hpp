#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bhq/common.hpp"
#include "bhq/fockspace/sparse_operator.hpp"

namespace bhq {

/// Dense real blocks of an operator in the eigenbasis of a
/// ReflectionSpectrum. Coordinates are ordered [even block; odd block].
/// For a windowed spectrum these are the compressed blocks P A P.
struct SpectralOperator {
  Eigen::MatrixXd even_even;
  Eigen::MatrixXd even_odd;  ///< maps odd coordinates to even ones
  Eigen::MatrixXd odd_odd;
  std::size_t even_dim = 0;
  std::size_t odd_dim = 0;

  /// Applies the operator to columns of spectral coordinates.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& x) const;
};

/// Exact propagator for a real symmetric tridiagonal Hamiltonian that is
/// invariant under index reversal i -> n-1-i (the dimer under exchange of
/// the two sites). The reflection splits the space into even and odd
/// blocks, each tridiagonal, which are diagonalized with LAPACK.
///
/// States are handled in spectral coordinates, where exp(-iHt) is a phase
/// per entry and inner products are those of the Fock basis.
///
/// With an energy window only the eigenpairs inside it are kept. Spectral
/// coordinates are then a projection, exact for states supported in the
/// window; projection_loss() tells how far a state is from that.
class ReflectionSpectrum {
 public:
  struct EnergyWindow {
    double lo = 0.0;
    double hi = 0.0;
  };

  /// Throws DomainError when the Hamiltonian does not have this structure.
  explicit ReflectionSpectrum(const SparseOperator& hamiltonian, std::optional<EnergyWindow> window = std::nullopt);

  /// True for real, tridiagonal, reflection-symmetric Hermitian operators.
  static bool applicable(const SparseOperator& hamiltonian, double tolerance = 1e-12);

  /// Fock dimension.
  std::size_t dim() const { return dim_; }
  /// Number of spectral coordinates (dim() unless windowed).
  std::size_t size() const { return even_dim() + odd_dim(); }
  bool windowed() const { return window_.has_value(); }
  std::size_t even_dim() const { return static_cast<std::size_t>(even_energies_.size()); }
  std::size_t odd_dim() const { return static_cast<std::size_t>(odd_energies_.size()); }
  /// Energies in coordinate order (even block ascending, then odd block).
  Eigen::VectorXd energies() const;

  Eigen::MatrixXcd to_spectral(const Eigen::MatrixXcd& fock) const;
  /// Per column, ||psi - P psi|| / ||psi|| for the projector P onto the kept
  /// eigenvectors (zero up to rounding without a window).
  Eigen::VectorXd projection_loss(const Eigen::MatrixXcd& fock) const;
  Eigen::MatrixXcd to_fock(const Eigen::MatrixXcd& spectral) const;
  /// exp(-iHt) in spectral coordinates; t may be negative.
  Eigen::MatrixXcd evolve_spectral(const Eigen::MatrixXcd& spectral, double t) const;
  /// exp(-iHt) psi in the Fock basis.
  StateVector evolve(const StateVector& psi, double t) const;

  /// Representation of a diagonal operator with the given Fock-basis values.
  /// Blocks that vanish identically are left empty.
  SpectralOperator represent_diagonal(const std::vector<double>& values) const;

 private:
  std::size_t dim_ = 0;
  std::optional<EnergyWindow> window_;
  Eigen::VectorXd even_energies_, odd_energies_;
  Eigen::MatrixXd even_vectors_, odd_vectors_;  // columns: eigenvectors in parity coordinates
};

}  // namespace bhq
