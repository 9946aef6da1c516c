#include "bhq/propagator/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <limits>
#include <optional>
#include <sstream>
#include <type_traits>

#include <Eigen/SparseLU>

namespace bhq {
namespace {

using DenseMatrix = Eigen::MatrixXcd;

DenseMatrix random_block(std::size_t rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  DenseMatrix m(static_cast<Eigen::Index>(rows), cols);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = Complex(normal(rng), normal(rng));
  }
  return m;
}

struct SpectrumBound {
  double lowest_ritz;
  double error_bound;
};

// Short Lanczos recursion with full reorthogonalization; returns the lowest
// Ritz value and its residual bound beta_k |s_k|.
SpectrumBound estimate_bottom(const SparseOperator& h, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(h.dim());
  const int steps = static_cast<int>(std::min<Eigen::Index>(60, n));
  DenseMatrix basis(n, steps);
  basis.col(0) = random_block(h.dim(), 1, seed).col(0).normalized();
  std::vector<double> alpha, beta;
  int used = 0;
  for (int j = 0; j < steps; ++j) {
    StateVector w = h.matrix() * basis.col(j);
    alpha.push_back(basis.col(j).dot(w).real());
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).adjoint() * w);
    }
    const double b = w.norm();
    used = j + 1;
    if (j + 1 == steps || b < 1e-12 * std::abs(alpha.back()) + 1e-300) {
      beta.push_back(b);
      break;
    }
    beta.push_back(b);
    basis.col(j + 1) = w / b;
  }
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(used, used);
  for (int j = 0; j < used; ++j) {
    tri(j, j) = alpha[j];
    if (j + 1 < used) tri(j, j + 1) = tri(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
  const double ritz = eig.eigenvalues()(0);
  const double bound = std::abs(beta[used - 1] * eig.eigenvectors()(used - 1, 0));
  return {ritz, bound};
}

using RealMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, std::ptrdiff_t>;

// Irreducible real symmetric tridiagonal matrix (distinct eigenvalues).
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i+1
};

std::optional<Tridiagonal> as_tridiagonal(const RealMatrix& h) {
  Tridiagonal t;
  const Eigen::Index n = h.rows();
  t.diag.assign(static_cast<std::size_t>(n), 0.0);
  t.off.assign(static_cast<std::size_t>(n > 0 ? n - 1 : 0), 0.0);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (RealMatrix::InnerIterator it(h, r); it; ++it) {
      const Eigen::Index c = it.col();
      if (c == r) {
        t.diag[r] = it.value();
      } else if (c == r + 1) {
        t.off[r] = it.value();
      } else if (c != r - 1) {
        return std::nullopt;
      }
    }
  }
  for (double b : t.off) {
    if (b == 0.0) return std::nullopt;
  }
  return t;
}

// Number of eigenvalues strictly below x (Sturm sequence).
Eigen::Index count_below(const Tridiagonal& t, double x) {
  Eigen::Index count = 0;
  double d = 1.0;
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    const double b2 = i == 0 ? 0.0 : t.off[i - 1] * t.off[i - 1];
    d = t.diag[i] - x - b2 / d;
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

// Bisection for the lowest eigenvalues, inverse iteration for the vectors.
std::optional<EigenResult> tridiagonal_eigenpairs(const RealMatrix& h, const Tridiagonal& t, int count,
                                                  double norm, const EigenConfig& config) {
  const auto n = static_cast<Eigen::Index>(t.diag.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double radius = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(t.off[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - radius);
    hi = std::max(hi, t.diag[i] + radius);
  }

  using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
  const ColMatrix base = h;
  ColMatrix identity(n, n);
  identity.setIdentity();

  EigenResult out;
  std::vector<Eigen::VectorXd> found;
  for (int k = 0; k < count; ++k) {
    double a = lo;
    double b = hi;
    while (b - a > 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (count_below(t, mid) > k) {
        b = mid;
      } else {
        a = mid;
      }
    }
    const double lambda = 0.5 * (a + b);

    double sigma = lambda;
    Eigen::SparseLU<ColMatrix> lu;
    for (int attempt = 0; attempt < 4; ++attempt) {
      const ColMatrix shifted = base - sigma * identity;
      lu.compute(shifted);
      if (lu.info() == Eigen::Success) break;
      sigma += 4.0 * std::numeric_limits<double>::epsilon() * norm;
    }
    if (lu.info() != Eigen::Success) return std::nullopt;

    std::mt19937_64 rng(config.seed + static_cast<std::uint64_t>(k));
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (auto& x : v) x = normal(rng);
    v.normalize();
    double residual = std::numeric_limits<double>::infinity();
    double energy = lambda;
    for (int iteration = 0; iteration < 6; ++iteration) {
      v = lu.solve(v);
      for (const auto& w : found) v -= w.dot(v) * w;
      v.normalize();
      const Eigen::VectorXd hv = h * v;
      energy = v.dot(hv);
      residual = (hv - energy * v).norm();
      if (residual <= config.tolerance * norm) break;
    }
    if (residual > config.acceptable_tolerance * norm) return std::nullopt;
    found.push_back(v);
    out.energies.push_back(energy);
    out.states.emplace_back(v.cast<Complex>());
    out.residuals.push_back(residual);
  }
  out.iterations = 1;
  return out;
}

template <typename Scalar>
using Block = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Block<Scalar> random_start(Eigen::Index rows, int cols, std::uint64_t seed) {
  if constexpr (std::is_same_v<Scalar, double>) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Block<double> m(rows, cols);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = normal(rng);
    }
    return m;
  } else {
    return random_block(static_cast<std::size_t>(rows), cols, seed);
  }
}

template <typename Scalar>
Block<Scalar> householder_columns(const Block<Scalar>& block) {
  Eigen::HouseholderQR<Block<Scalar>> qr(block);
  return qr.householderQ() * Block<Scalar>::Identity(block.rows(), block.cols());
}

// Columns arriving here are close to orthogonal up to their scale, so
// normalizing them and running Cholesky QR twice is accurate and much
// cheaper than Householder; the latter remains the fallback.
template <typename Scalar>
Block<Scalar> orthonormal_columns(const Block<Scalar>& block) {
  Block<Scalar> y = block;
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const double n = y.col(j).norm();
    if (!(n > 0.0) || !std::isfinite(n)) return householder_columns<Scalar>(block);
    y.col(j) /= n;
  }
  for (int pass = 0; pass < 2; ++pass) {
    Block<Scalar> gram = Block<Scalar>::Zero(y.cols(), y.cols());
    gram.template selfadjointView<Eigen::Lower>().rankUpdate(y.adjoint());
    Eigen::LLT<Block<Scalar>> llt(gram.template selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success || llt.rcond() < 1e-10) return householder_columns<Scalar>(block);
    llt.matrixU().template solveInPlace<Eigen::OnTheRight>(y);
  }
  return y;
}

// Subspace iteration on (H - sigma)^{-1} with Rayleigh-Ritz projection.
template <typename Scalar>
EigenResult block_iteration(const Eigen::SparseMatrix<Scalar, Eigen::RowMajor, std::ptrdiff_t>& h,
                            double norm, int count, const EigenConfig& config) {
  const Eigen::Index dim = h.rows();
  const int guard = config.guard_vectors > 0 ? config.guard_vectors : std::max(8, count / 2);
  const int block = static_cast<int>(std::min<Eigen::Index>(dim, count + guard));

  const SparseOperator wrapped(h.template cast<Complex>(), true);
  const auto bottom = estimate_bottom(wrapped, config.seed);
  // Keep the shift safely below the lowest eigenvalue so that the
  // shift-inverted operator ranks eigenvalues in their natural order.
  const double margin = std::max({2.0 * bottom.error_bound, 1e-9 * std::abs(bottom.lowest_ritz), 1e-6});
  double shift = bottom.lowest_ritz - margin;

  using ColMatrix = Eigen::SparseMatrix<Scalar, Eigen::ColMajor>;
  const ColMatrix base = h;
  Eigen::SparseLU<ColMatrix> lu;
  bool lu_analyzed = false;
  auto factorize = [&](double sigma) {
    ColMatrix identity(base.rows(), base.cols());
    identity.setIdentity();
    ColMatrix shifted = base - Scalar(sigma) * identity;
    shifted.makeCompressed();
    if (!lu_analyzed) {
      lu.analyzePattern(shifted);
      lu_analyzed = true;
    }
    lu.factorize(shifted);
    if (lu.info() != Eigen::Success) {
      throw ConvergenceError("lowest_eigenpairs: factorization of H - sigma failed at sigma = " +
                             std::to_string(sigma));
    }
  };
  factorize(shift);

  Block<Scalar> vectors = orthonormal_columns<Scalar>(random_start<Scalar>(dim, block, config.seed + 1));
  Eigen::VectorXd ritz = Eigen::VectorXd::Zero(block);
  std::vector<double> history;
  double best = std::numeric_limits<double>::infinity();
  int stagnant = 0;

  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    const Block<Scalar> solved = lu.solve(vectors);
    const Block<Scalar> next = orthonormal_columns<Scalar>(solved);
    const Block<Scalar> h_next = h * next;
    Block<Scalar> projected = next.adjoint() * h_next;
    projected = (0.5 * (projected + projected.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<Block<Scalar>> eig(projected);
    vectors = next * eig.eigenvectors();
    const Block<Scalar> h_vectors = h_next * eig.eigenvectors().leftCols(count);
    ritz = eig.eigenvalues();

    double worst = 0.0;
    std::vector<double> residuals(count);
    for (int k = 0; k < count; ++k) {
      residuals[k] = (h_vectors.col(k) - ritz(k) * vectors.col(k)).norm();
      worst = std::max(worst, residuals[k]);
    }
    history.push_back(worst / norm);

    // The first Lanczos estimate can sit far below the spectrum; move the
    // shift up to the converging lowest Ritz value when that gains a lot.
    const double candidate = ritz(0) - std::max({2.0 * residuals[0], 1e-9 * std::abs(ritz(0)), 1e-6});
    if (candidate > shift && ritz(0) - candidate < 0.5 * (ritz(0) - shift)) {
      shift = candidate;
      factorize(shift);
    }

    if (worst / norm < best * 0.9) {
      best = worst / norm;
      stagnant = 0;
    } else {
      ++stagnant;
    }
    const bool converged = worst <= config.tolerance * norm;
    const bool settled = stagnant >= 8 && worst <= config.acceptable_tolerance * norm;
    if (converged || settled) {
      EigenResult out;
      out.iterations = iteration;
      for (int k = 0; k < count; ++k) {
        out.energies.push_back(ritz(k));
        out.states.emplace_back(vectors.col(k).template cast<Complex>());
        out.residuals.push_back(residuals[k]);
      }
      return out;
    }
  }

  std::ostringstream msg;
  msg << "lowest_eigenpairs: no convergence after " << config.max_iterations
      << " iterations (relative residual history, every 10th:";
  for (std::size_t i = 0; i < history.size(); i += 10) msg << ' ' << history[i];
  msg << ')';
  throw ConvergenceError(msg.str());
}

}  // namespace

EigenResult dense_eigenpairs(const SparseOperator& hamiltonian) {
  if (!hamiltonian.hermitian()) throw DomainError("dense_eigenpairs: operator must be Hermitian");
  const DenseMatrix dense = DenseMatrix(hamiltonian.matrix());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(dense);
  EigenResult out;
  for (Eigen::Index k = 0; k < dense.rows(); ++k) {
    out.energies.push_back(eig.eigenvalues()(k));
    out.states.emplace_back(eig.eigenvectors().col(k));
    out.residuals.push_back((dense * eig.eigenvectors().col(k) - eig.eigenvalues()(k) * eig.eigenvectors().col(k)).norm());
  }
  return out;
}

EigenResult lowest_eigenpairs(const SparseOperator& hamiltonian, int count, const EigenConfig& config) {
  if (!hamiltonian.hermitian()) throw DomainError("lowest_eigenpairs: operator must be Hermitian");
  const std::size_t dim = hamiltonian.dim();
  if (count < 1 || static_cast<std::size_t>(count) > dim) {
    throw DomainError("lowest_eigenpairs: requested " + std::to_string(count) + " pairs of a " +
                      std::to_string(dim) + "-dimensional operator");
  }

  if (dim <= config.dense_limit) {
    auto all = dense_eigenpairs(hamiltonian);
    all.energies.resize(count);
    all.states.resize(count);
    all.residuals.resize(count);
    return all;
  }

  const bool real = std::all_of(hamiltonian.matrix().valuePtr(),
                                hamiltonian.matrix().valuePtr() + hamiltonian.matrix().nonZeros(),
                                [](const Complex& v) { return v.imag() == 0.0; });
  if (real) {
    const RealMatrix h = hamiltonian.matrix().real();
    if (const auto tri = as_tridiagonal(h)) {
      if (auto out = tridiagonal_eigenpairs(h, *tri, count, hamiltonian.norm_estimate(), config)) return *out;
    }
    return block_iteration<double>(h, hamiltonian.norm_estimate(), count, config);
  }
  return block_iteration<Complex>(hamiltonian.matrix(), hamiltonian.norm_estimate(), count, config);
}

}  // namespace bhq
