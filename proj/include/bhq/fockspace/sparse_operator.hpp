#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Sparse>

#include "bhq/common.hpp"

namespace bhq {

/// Row-compressed complex matrix acting on a Fock basis.
///
/// Immutable after construction. The hermitian flag is a promise checked at
/// construction time (entry(i,j) == conj(entry(j,i)) to 1e-14).
class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor, std::ptrdiff_t>;
  using Triplet = Eigen::Triplet<Complex, std::ptrdiff_t>;

  SparseOperator() = default;
  SparseOperator(Matrix matrix, bool hermitian);

  /// Duplicate (row, col) entries are summed. Entries with magnitude at or
  /// below `drop_tolerance` are removed; the default keeps every structural
  /// entry, including explicit zeros produced by cancellation.
  static SparseOperator from_triplets(std::size_t dim, const std::vector<Triplet>& triplets,
                                      bool hermitian, double drop_tolerance = 0.0);

  static SparseOperator diagonal(const std::vector<double>& values);
  static SparseOperator identity(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  bool hermitian() const { return hermitian_; }
  bool is_diagonal() const { return diagonal_; }
  std::size_t nonzeros() const { return static_cast<std::size_t>(matrix_.nonZeros()); }

  const Matrix& matrix() const { return matrix_; }

  Complex entry(std::size_t row, std::size_t col) const;

  /// Real diagonal of a Hermitian diagonal operator; throws otherwise.
  std::vector<double> diagonal_values() const;

  StateVector apply(const StateVector& in) const { return matrix_ * in; }

  /// Largest |A_ij - conj(A_ji)| over the stored structure.
  double hermiticity_defect() const;

  /// Estimate of the spectral norm (max absolute row sum).
  double norm_estimate() const;

  SparseOperator scaled(Complex factor) const;

  /// Diagnostic dump: `row, col, re, im` for every stored entry.
  void write_csv(std::ostream& out) const;

 private:
  Matrix matrix_;
  bool hermitian_ = false;
  bool diagonal_ = false;
};

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);

}  // namespace bhq
