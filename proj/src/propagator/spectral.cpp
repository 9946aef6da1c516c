#include "bhq/propagator/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

namespace bhq {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct Tridiagonal {
  std::vector<double> diag, off;
};

// Diagonal and first superdiagonal; nullopt-like empty result when the
// matrix has other structure or complex entries.
bool extract_tridiagonal(const SparseOperator& h, Tridiagonal& out, double tolerance) {
  if (!h.hermitian()) return false;
  const auto n = static_cast<Eigen::Index>(h.dim());
  out.diag.assign(n, 0.0);
  out.off.assign(n > 0 ? n - 1 : 0, 0.0);
  const auto& m = h.matrix();
  double scale = 0.0;
  for (Eigen::Index row = 0; row < m.outerSize(); ++row) {
    for (SparseOperator::Matrix::InnerIterator it(m, row); it; ++it) {
      scale = std::max(scale, std::abs(it.value()));
    }
  }
  for (Eigen::Index row = 0; row < m.outerSize(); ++row) {
    for (SparseOperator::Matrix::InnerIterator it(m, row); it; ++it) {
      const Eigen::Index col = it.col();
      const Complex v = it.value();
      if (std::abs(v.imag()) > tolerance * scale) return false;
      if (col == row) {
        out.diag[row] = v.real();
      } else if (col == row + 1) {
        out.off[row] = v.real();
      } else if (col + 1 != row && std::abs(v) > tolerance * scale) {
        return false;
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(out.diag[i] - out.diag[n - 1 - i]) > tolerance * scale) return false;
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (std::abs(out.off[i] - out.off[n - 2 - i]) > tolerance * scale) return false;
  }
  return true;
}

// Eigenpairs of a symmetric tridiagonal matrix, all of them or those with
// energies in (lo, hi].
void diagonalize(std::vector<double> diag, std::vector<double> off, const std::optional<ReflectionSpectrum::EnergyWindow>& window,
                 Eigen::VectorXd& energies, Eigen::MatrixXd& vectors) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) {
    energies.resize(0);
    vectors.resize(0, 0);
    return;
  }
  off.resize(n, 0.0);  // dstevr wants length n
  int expected = n;
  if (window) {
    // Sturm count bounds the number of eigenpairs to allocate for.
    std::vector<double> w(n);
    std::vector<int> iblock(n), isplit(n);
    int m = 0, nsplit = 0;
    const int info = LAPACKE_dstebz('V', 'B', n, window->lo, window->hi, 0, 0, 0.0, diag.data(), off.data(), &m,
                                    &nsplit, w.data(), iblock.data(), isplit.data());
    if (info != 0) throw ConvergenceError("ReflectionSpectrum: dstebz failed");
    expected = m;
  }
  energies.resize(expected);
  vectors.resize(n, expected);
  if (expected == 0) return;
  std::vector<int> support(2 * static_cast<std::size_t>(std::max(expected, 1)));
  int found = 0;
  Eigen::VectorXd all(n);
  const int info =
      window ? LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'V', n, diag.data(), off.data(), window->lo, window->hi, 0, 0, 0.0,
                              &found, all.data(), vectors.data(), n, support.data())
             : LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'A', n, diag.data(), off.data(), 0.0, 0.0, 0, 0, 0.0, &found,
                              all.data(), vectors.data(), n, support.data());
  if (info != 0 || found != expected) {
    std::ostringstream msg;
    msg << "ReflectionSpectrum: dstevr failed (info " << info << ", " << found << " of " << expected
        << " eigenpairs)";
    throw ConvergenceError(msg.str());
  }
  energies = all.head(expected);
}

// Columns of `x` as n x 2k real blocks [Re | Im], multiplied by `m`.
Eigen::MatrixXcd real_times(const Eigen::MatrixXd& m, const Eigen::MatrixXcd& x, bool transpose) {
  const auto k = x.cols();
  Eigen::MatrixXd stacked(x.rows(), 2 * k);
  stacked.leftCols(k) = x.real();
  stacked.rightCols(k) = x.imag();
  const Eigen::MatrixXd y = transpose ? Eigen::MatrixXd(m.transpose() * stacked) : Eigen::MatrixXd(m * stacked);
  Eigen::MatrixXcd out(y.rows(), k);
  out.real() = y.leftCols(k);
  out.imag() = y.rightCols(k);
  return out;
}

}  // namespace

bool ReflectionSpectrum::applicable(const SparseOperator& hamiltonian, double tolerance) {
  Tridiagonal t;
  return extract_tridiagonal(hamiltonian, t, tolerance);
}

ReflectionSpectrum::ReflectionSpectrum(const SparseOperator& hamiltonian, std::optional<EnergyWindow> window)
    : dim_(hamiltonian.dim()), window_(window) {
  if (window && !(window->lo < window->hi)) throw DomainError("ReflectionSpectrum: empty energy window");
  Tridiagonal t;
  if (!extract_tridiagonal(hamiltonian, t, 1e-12)) {
    throw DomainError("ReflectionSpectrum: Hamiltonian is not a real reflection-symmetric tridiagonal matrix");
  }
  const std::size_t n = dim_;
  const std::size_t half = n / 2;
  const bool odd_length = n % 2 == 1;

  // Even block: (|i> + |n-1-i>)/sqrt 2 for i < half, plus the middle state.
  Tridiagonal even, odd;
  even.diag.assign(t.diag.begin(), t.diag.begin() + half);
  odd.diag = even.diag;
  if (half > 1) {
    even.off.assign(t.off.begin(), t.off.begin() + (half - 1));
    odd.off = even.off;
  }
  if (odd_length) {
    even.diag.push_back(t.diag[half]);
    if (half > 0) even.off.push_back(std::sqrt(2.0) * t.off[half - 1]);
  } else if (half > 0) {
    // The two middle sites are coupled to each other.
    even.diag[half - 1] += t.off[half - 1];
    odd.diag[half - 1] -= t.off[half - 1];
  }
  diagonalize(even.diag, even.off, window_, even_energies_, even_vectors_);
  diagonalize(odd.diag, odd.off, window_, odd_energies_, odd_vectors_);
}

Eigen::VectorXd ReflectionSpectrum::energies() const {
  Eigen::VectorXd e(size());
  e << even_energies_, odd_energies_;
  return e;
}

namespace {

struct ParityParts {
  Eigen::MatrixXcd even, odd;
};

ParityParts split_parity(const Eigen::MatrixXcd& fock) {
  const auto n = fock.rows();
  const auto half = n / 2;
  ParityParts p{Eigen::MatrixXcd(n - half, fock.cols()), Eigen::MatrixXcd(half, fock.cols())};
  for (Eigen::Index i = 0; i < half; ++i) {
    p.even.row(i) = kInvSqrt2 * (fock.row(i) + fock.row(n - 1 - i));
    p.odd.row(i) = kInvSqrt2 * (fock.row(i) - fock.row(n - 1 - i));
  }
  if (n % 2 == 1) p.even.row(half) = fock.row(half);
  return p;
}

}  // namespace

Eigen::MatrixXcd ReflectionSpectrum::to_spectral(const Eigen::MatrixXcd& fock) const {
  if (static_cast<std::size_t>(fock.rows()) != dim_) throw DomainError("to_spectral: dimension mismatch");
  const auto ne = static_cast<Eigen::Index>(even_dim());
  const auto no = static_cast<Eigen::Index>(odd_dim());
  const ParityParts p = split_parity(fock);
  Eigen::MatrixXcd out(ne + no, fock.cols());
  out.topRows(ne) = real_times(even_vectors_, p.even, true);
  out.bottomRows(no) = real_times(odd_vectors_, p.odd, true);
  return out;
}

Eigen::VectorXd ReflectionSpectrum::projection_loss(const Eigen::MatrixXcd& fock) const {
  const Eigen::MatrixXcd kept = to_spectral(fock);
  Eigen::VectorXd loss(fock.cols());
  for (Eigen::Index c = 0; c < fock.cols(); ++c) {
    const double total = fock.col(c).squaredNorm();
    // Differencing squared norms cannot resolve losses below ~1e-8, so the
    // windowed case forms the residual.
    if (total == 0.0) {
      loss(c) = 0.0;
    } else if (windowed()) {
      loss(c) = (fock.col(c) - to_fock(kept.col(c))).norm() / std::sqrt(total);
    } else {
      loss(c) = std::sqrt(std::max(0.0, 1.0 - kept.col(c).squaredNorm() / total));
    }
  }
  return loss;
}

Eigen::MatrixXcd ReflectionSpectrum::to_fock(const Eigen::MatrixXcd& spectral) const {
  if (static_cast<std::size_t>(spectral.rows()) != size()) throw DomainError("to_fock: dimension mismatch");
  const auto n = static_cast<Eigen::Index>(dim_);
  const auto half = n / 2;
  const auto ne = static_cast<Eigen::Index>(even_dim());
  const auto no = static_cast<Eigen::Index>(odd_dim());
  const Eigen::MatrixXcd even = real_times(even_vectors_, spectral.topRows(ne), false);
  const Eigen::MatrixXcd odd = real_times(odd_vectors_, spectral.bottomRows(no), false);
  Eigen::MatrixXcd out(n, spectral.cols());
  for (Eigen::Index i = 0; i < half; ++i) {
    out.row(i) = kInvSqrt2 * (even.row(i) + odd.row(i));
    out.row(n - 1 - i) = kInvSqrt2 * (even.row(i) - odd.row(i));
  }
  if (n % 2 == 1) out.row(half) = even.row(half);
  return out;
}

Eigen::MatrixXcd ReflectionSpectrum::evolve_spectral(const Eigen::MatrixXcd& spectral, double t) const {
  if (static_cast<std::size_t>(spectral.rows()) != size()) throw DomainError("evolve_spectral: dimension mismatch");
  const Eigen::VectorXd e = energies();
  Eigen::VectorXcd phases(e.size());
  for (Eigen::Index j = 0; j < e.size(); ++j) phases(j) = std::polar(1.0, -e(j) * t);
  return phases.asDiagonal() * spectral;
}

StateVector ReflectionSpectrum::evolve(const StateVector& psi, double t) const {
  return to_fock(evolve_spectral(to_spectral(psi), t)).col(0);
}

SpectralOperator ReflectionSpectrum::represent_diagonal(const std::vector<double>& values) const {
  if (values.size() != dim_) throw DomainError("represent_diagonal: dimension mismatch");
  const std::size_t n = dim_;
  const std::size_t no = n / 2;
  const std::size_t ne = n - no;
  // In parity coordinates the operator has diagonal blocks (d_i + d_mirror)/2
  // and an even-odd coupling (d_i - d_mirror)/2.
  Eigen::VectorXd sum_even(ne), sum_odd(no), diff(no);
  double max_sum = 0.0, max_diff = 0.0;
  for (std::size_t i = 0; i < no; ++i) {
    sum_even(i) = sum_odd(i) = 0.5 * (values[i] + values[n - 1 - i]);
    diff(i) = 0.5 * (values[i] - values[n - 1 - i]);
    max_sum = std::max(max_sum, std::abs(sum_even(i)));
    max_diff = std::max(max_diff, std::abs(diff(i)));
  }
  if (ne > no) {
    sum_even(no) = values[no];
    max_sum = std::max(max_sum, std::abs(sum_even(no)));
  }
  SpectralOperator op;
  op.even_dim = even_dim();
  op.odd_dim = odd_dim();
  if (max_sum > 0.0) {
    op.even_even = even_vectors_.transpose() * (sum_even.asDiagonal() * even_vectors_);
    op.odd_odd = odd_vectors_.transpose() * (sum_odd.asDiagonal() * odd_vectors_);
  }
  if (max_diff > 0.0) {
    op.even_odd = even_vectors_.topRows(no).transpose() * (diff.asDiagonal() * odd_vectors_);
  }
  return op;
}

Eigen::MatrixXcd SpectralOperator::apply(const Eigen::MatrixXcd& x) const {
  const auto ne = static_cast<Eigen::Index>(even_dim);
  const auto no = static_cast<Eigen::Index>(odd_dim);
  if (x.rows() != ne + no) throw DomainError("SpectralOperator::apply: dimension mismatch");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(x.rows(), x.cols());
  if (even_even.size() > 0) {
    out.topRows(ne) = real_times(even_even, x.topRows(ne), false);
    out.bottomRows(no) = real_times(odd_odd, x.bottomRows(no), false);
  }
  if (even_odd.size() > 0) {
    out.topRows(ne) += real_times(even_odd, x.bottomRows(no), false);
    out.bottomRows(no) += real_times(even_odd, x.topRows(ne), true);
  }
  return out;
}

}  // namespace bhq
