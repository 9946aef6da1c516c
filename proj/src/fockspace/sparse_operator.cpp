#include "bhq/fockspace/sparse_operator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace bhq {
namespace {

constexpr double kHermitianTolerance = 1e-14;

bool structurally_diagonal(const SparseOperator::Matrix& m) {
  for (std::ptrdiff_t row = 0; row < m.outerSize(); ++row) {
    for (SparseOperator::Matrix::InnerIterator it(m, row); it; ++it) {
      if (it.col() != row && it.value() != Complex(0.0)) return false;
    }
  }
  return true;
}

}  // namespace

SparseOperator::SparseOperator(Matrix matrix, bool hermitian)
    : matrix_(std::move(matrix)), hermitian_(hermitian) {
  if (matrix_.rows() != matrix_.cols()) throw DomainError("SparseOperator: matrix must be square");
  matrix_.makeCompressed();
  diagonal_ = structurally_diagonal(matrix_);
  if (hermitian_) {
    const double defect = hermiticity_defect();
    if (defect > kHermitianTolerance) {
      std::ostringstream msg;
      msg << "SparseOperator: flagged Hermitian but max |A - A^dagger| = " << defect;
      throw DomainError(msg.str());
    }
  }
}

SparseOperator SparseOperator::from_triplets(std::size_t dim, const std::vector<Triplet>& triplets,
                                             bool hermitian, double drop_tolerance) {
  Matrix m(static_cast<std::ptrdiff_t>(dim), static_cast<std::ptrdiff_t>(dim));
  m.setFromTriplets(triplets.begin(), triplets.end());
  if (drop_tolerance > 0.0) {
    m.prune([drop_tolerance](std::ptrdiff_t, std::ptrdiff_t, const Complex& v) {
      return std::abs(v) > drop_tolerance;
    });
  }
  return SparseOperator(std::move(m), hermitian);
}

SparseOperator SparseOperator::diagonal(const std::vector<double>& values) {
  std::vector<Triplet> triplets;
  triplets.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto k = static_cast<std::ptrdiff_t>(i);
    triplets.emplace_back(k, k, Complex(values[i], 0.0));
  }
  return from_triplets(values.size(), triplets, true);
}

SparseOperator SparseOperator::identity(std::size_t dim) {
  return diagonal(std::vector<double>(dim, 1.0));
}

Complex SparseOperator::entry(std::size_t row, std::size_t col) const {
  return matrix_.coeff(static_cast<std::ptrdiff_t>(row), static_cast<std::ptrdiff_t>(col));
}

std::vector<double> SparseOperator::diagonal_values() const {
  if (!diagonal_ || !hermitian_) throw DomainError("diagonal_values: operator is not a real diagonal");
  std::vector<double> out(dim(), 0.0);
  for (std::ptrdiff_t row = 0; row < matrix_.outerSize(); ++row) {
    for (Matrix::InnerIterator it(matrix_, row); it; ++it) {
      if (it.col() == row) out[static_cast<std::size_t>(row)] = it.value().real();
    }
  }
  return out;
}

double SparseOperator::hermiticity_defect() const {
  const Matrix adjoint = matrix_.adjoint();
  const Matrix diff = matrix_ - adjoint;
  double worst = 0.0;
  for (std::ptrdiff_t k = 0; k < diff.nonZeros(); ++k) {
    worst = std::max(worst, std::abs(diff.valuePtr()[k]));
  }
  return worst;
}

double SparseOperator::norm_estimate() const {
  double worst = 0.0;
  for (std::ptrdiff_t row = 0; row < matrix_.outerSize(); ++row) {
    double sum = 0.0;
    for (Matrix::InnerIterator it(matrix_, row); it; ++it) sum += std::abs(it.value());
    worst = std::max(worst, sum);
  }
  return worst;
}

SparseOperator SparseOperator::scaled(Complex factor) const {
  const bool stays_hermitian = hermitian_ && factor.imag() == 0.0;
  return SparseOperator(Matrix(matrix_ * factor), stays_hermitian);
}

void SparseOperator::write_csv(std::ostream& out) const {
  out << "row, col, re, im\n";
  out << std::setprecision(17);
  for (std::ptrdiff_t row = 0; row < matrix_.outerSize(); ++row) {
    for (Matrix::InnerIterator it(matrix_, row); it; ++it) {
      out << row << ", " << it.col() << ", " << it.value().real() << ", " << it.value().imag() << '\n';
    }
  }
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim()) throw DomainError("SparseOperator +: dimension mismatch");
  return SparseOperator(SparseOperator::Matrix(a.matrix() + b.matrix()), a.hermitian() && b.hermitian());
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim()) throw DomainError("SparseOperator *: dimension mismatch");
  // The product of Hermitian operators is Hermitian only if they commute;
  // the flag is kept only for the always-safe diagonal case.
  const bool hermitian = a.hermitian() && b.hermitian() && a.is_diagonal() && b.is_diagonal();
  return SparseOperator(SparseOperator::Matrix(a.matrix() * b.matrix()), hermitian);
}

}  // namespace bhq
