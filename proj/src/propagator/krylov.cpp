#include "bhq/propagator/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bhq {
namespace {

// phi_1(z) = (e^z - 1) / z
Complex phi1(Complex z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return (std::exp(z) - 1.0) / z;
}

struct KrylovSpace {
  Eigen::MatrixXcd vectors;      // orthonormal columns v_0 .. v_{m-1}
  Eigen::VectorXd ritz_values;   // eigenvalues of the shifted tridiagonal
  Eigen::MatrixXd ritz_vectors;  // its eigenvectors
  double shift = 0.0;            // <psi|H|psi>
  double residual_beta = 0.0;    // beta_m (0 on happy breakdown)
  double norm = 0.0;             // ||psi||
};

KrylovSpace build_space(const SparseOperator& h, const StateVector& psi, int max_subspace) {
  KrylovSpace space;
  const auto n = static_cast<Eigen::Index>(h.dim());
  const int m_max = static_cast<int>(std::min<Eigen::Index>(max_subspace, n));
  space.norm = psi.norm();
  space.vectors.resize(n, m_max);
  space.vectors.col(0) = psi / space.norm;

  std::vector<double> alpha, beta;
  int m = 0;
  for (int j = 0; j < m_max; ++j) {
    StateVector w = h.matrix() * space.vectors.col(j);
    const double a = space.vectors.col(j).dot(w).real();
    if (j == 0) space.shift = a;
    w -= space.shift * space.vectors.col(j);
    alpha.push_back(a - space.shift);
    // Full reorthogonalization inside the (small) Krylov space.
    for (int pass = 0; pass < 2; ++pass) {
      w -= space.vectors.leftCols(j + 1) * (space.vectors.leftCols(j + 1).adjoint() * w);
    }
    const double b = w.norm();
    m = j + 1;
    const double scale = std::abs(alpha.front()) + (beta.empty() ? 0.0 : beta.front()) + 1.0;
    if (b <= 1e-14 * scale) {
      space.residual_beta = 0.0;
      break;
    }
    if (j + 1 == m_max) {
      space.residual_beta = b;
      break;
    }
    beta.push_back(b);
    space.vectors.col(j + 1) = w / b;
  }
  space.vectors.conservativeResize(Eigen::NoChange, m);

  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) {
    tri(j, j) = alpha[j];
    if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(tri);
  space.ritz_values = eig.eigenvalues();
  space.ritz_vectors = eig.eigenvectors();
  return space;
}

double step_error(const KrylovSpace& space, double dt) {
  if (space.residual_beta == 0.0) return 0.0;
  const auto m = space.ritz_values.size();
  Complex acc = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    acc += space.ritz_vectors(m - 1, j) * phi1(Complex(0.0, -dt * space.ritz_values(j))) *
           space.ritz_vectors(0, j);
  }
  return space.residual_beta * dt * std::abs(acc);
}

StateVector apply_step(const KrylovSpace& space, double dt) {
  const auto m = space.ritz_values.size();
  Eigen::VectorXcd small(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    small(j) = std::exp(Complex(0.0, -dt * space.ritz_values(j))) * space.ritz_vectors(0, j);
  }
  const Eigen::VectorXcd coeffs = space.ritz_vectors.cast<Complex>() * small;
  return (space.norm * std::exp(Complex(0.0, -dt * space.shift))) * (space.vectors * coeffs);
}

}  // namespace

void KrylovConfig::validate() const {
  if (max_subspace < 4) throw ConfigError("KrylovConfig: max_subspace must be >= 4");
  if (!(step_tolerance > 0.0)) throw ConfigError("KrylovConfig: step_tolerance must be > 0");
  if (!(max_dt > 0.0)) throw ConfigError("KrylovConfig: max_dt must be > 0");
}

EvolvedState EvolvedState::at_zero(StateVector psi) {
  EvolvedState out;
  out.coefficients = std::move(psi);
  return out;
}

EvolvedState evolve(const SparseOperator& hamiltonian, EvolvedState psi, double t_target,
                    const KrylovConfig& config) {
  config.validate();
  if (!hamiltonian.hermitian()) throw DomainError("evolve: Hamiltonian must be Hermitian");
  if (static_cast<std::size_t>(psi.coefficients.size()) != hamiltonian.dim()) {
    throw DomainError("evolve: state dimension does not match the Hamiltonian");
  }
  if (t_target < psi.t) throw DomainError("evolve: target time precedes the current time");

  double dt_try = psi.suggested_dt > 0.0 ? psi.suggested_dt : config.max_dt;
  while (t_target - psi.t > 0.0) {
    const double remaining = t_target - psi.t;
    const KrylovSpace space = build_space(hamiltonian, psi.coefficients, config.max_subspace);
    const int m = static_cast<int>(space.ritz_values.size());

    double dt = std::min({dt_try, remaining, config.max_dt});
    double err = step_error(space, dt);
    while (err > config.step_tolerance) {
      const double factor = std::clamp(0.9 * std::pow(config.step_tolerance / err, 1.0 / m), 0.1, 0.9);
      dt *= factor;
      if (dt < config.min_dt) {
        std::ostringstream msg;
        msg << "evolve: step size " << dt << " below " << config.min_dt << " at t = " << psi.t
            << " (error estimate " << err << ", Krylov dimension " << m
            << "); the problem is too stiff for this subspace size";
        throw ConvergenceError(msg.str());
      }
      err = step_error(space, dt);
    }

    StateVector next = apply_step(space, dt);
    const double norm = next.norm();
    psi.norm_drift += std::abs(1.0 - norm / space.norm);
    next *= space.norm / norm;
    psi.coefficients = std::move(next);
    psi.error_estimate += err;
    // Land exactly on the target to avoid a dangling sliver of time.
    psi.t = (dt == remaining) ? t_target : psi.t + dt;

    if (dt < std::min(remaining, config.max_dt)) {
      dt_try = dt;
    } else {
      const double grow = err > 0.0 ? 0.9 * std::pow(config.step_tolerance / err, 1.0 / m) : 2.0;
      dt_try = std::max(dt_try, dt * std::clamp(grow, 1.0, 2.0));
    }
  }
  psi.suggested_dt = dt_try;
  return psi;
}

StateVector evolve_dense(const SparseOperator& hamiltonian, const StateVector& psi, double t) {
  const Eigen::MatrixXcd dense = Eigen::MatrixXcd(hamiltonian.matrix());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense);
  Eigen::VectorXcd phases(dense.rows());
  for (Eigen::Index k = 0; k < dense.rows(); ++k) {
    phases(k) = std::exp(Complex(0.0, -t * eig.eigenvalues()(k)));
  }
  const Eigen::VectorXcd coeffs = eig.eigenvectors().adjoint() * psi;
  return eig.eigenvectors() * phases.cwiseProduct(coeffs);
}

std::vector<Complex> heisenberg_matrix_element(const SparseOperator& hamiltonian,
                                               const SparseOperator& observable,
                                               const StateVector& bra, const StateVector& ket,
                                               const std::vector<double>& grid,
                                               const KrylovConfig& config) {
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw DomainError("heisenberg_matrix_element: time grid must be nondecreasing");
  }
  std::vector<Complex> out;
  out.reserve(grid.size());
  auto left = EvolvedState::at_zero(bra);
  auto right = EvolvedState::at_zero(ket);
  for (double t : grid) {
    if (t < 0.0) throw DomainError("heisenberg_matrix_element: negative time in grid");
    left = evolve(hamiltonian, std::move(left), t, config);
    right = evolve(hamiltonian, std::move(right), t, config);
    out.push_back(left.coefficients.dot(observable.matrix() * right.coefficients));
  }
  return out;
}

}  // namespace bhq
