#include "bhq/observables/quench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bhq/fockspace/operators.hpp"
#include "bhq/meanfield/meanfield.hpp"
#include "bhq/propagator/spectral.hpp"

namespace bhq {

std::string to_string(Model model) { return model == Model::Dimer ? "dimer" : "trimer"; }

Model model_from_string(const std::string& name) {
  if (name == "dimer") return Model::Dimer;
  if (name == "trimer") return Model::Trimer;
  throw ConfigError("unknown model '" + name + "' (expected dimer or trimer)");
}

std::string Quench::description() const {
  std::ostringstream out;
  out << (spec.model == Model::Dimer ? "alpha" : "u") << ": " << spec.pre_coupling << " -> " << spec.post_coupling;
  return out.str();
}

Quench make_quench(const QuenchSpec& spec) {
  if (spec.particles < 1) throw ConfigError("quench: particle number must be >= 1");
  if (spec.pre_coupling != 0.0) {
    throw ConfigError("quench: only a noninteracting prequench (coupling 0) is supported");
  }
  if (!std::isfinite(spec.post_coupling) || !std::isfinite(spec.hopping) || spec.hopping <= 0.0) {
    throw ConfigError("quench: couplings must be finite and the hopping positive");
  }
  const int sites = spec.model == Model::Dimer ? 2 : 3;
  auto basis = FockBasis::build(sites, spec.particles);
  const double interaction = spec.model == Model::Dimer ? interaction_from_alpha(spec.post_coupling, spec.particles)
                                                        : interaction_from_u(spec.post_coupling, spec.particles);
  Quench q{spec, basis, build_hamiltonian(basis, spec.hopping, spec.hopping * interaction), 1.0 / (spec.particles + 1.0),
           std::nullopt, std::nullopt};
  const auto stability =
      spec.model == Model::Dimer ? dimer_frequencies(spec.post_coupling) : gp_stability(spec.post_coupling, sites);
  const auto rates = stability.unstable_rates();
  if (!rates.empty()) {
    q.lambda = spec.hopping * *std::max_element(rates.begin(), rates.end());
    q.ehrenfest_time = ehrenfest_time(spec.particles, *q.lambda);
  }
  return q;
}

namespace {

class SparseWorkingOperator final : public WorkingOperator {
 public:
  explicit SparseWorkingOperator(SparseOperator op) : op_(std::move(op)) {}
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& work) const override { return op_.matrix() * work; }
  bool hermitian() const override { return op_.hermitian(); }

 private:
  SparseOperator op_;
};

class KrylovEvolver final : public Evolver {
 public:
  KrylovEvolver(const SparseOperator& h, KrylovConfig config)
      : forward_(h), backward_(h.scaled(-1.0)), config_(config) {}
  std::size_t dim() const override { return forward_.dim(); }
  std::string name() const override { return "krylov"; }
  Eigen::MatrixXcd load(const Eigen::MatrixXcd& fock) const override { return fock; }
  Eigen::MatrixXcd unload(const Eigen::MatrixXcd& work) const override { return work; }
  Eigen::MatrixXcd propagate(const Eigen::MatrixXcd& work, double dt) const override {
    Eigen::MatrixXcd out(work.rows(), work.cols());
    const auto& h = dt >= 0.0 ? forward_ : backward_;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index c = 0; c < work.cols(); ++c) {
      out.col(c) = evolve(h, EvolvedState::at_zero(work.col(c)), std::abs(dt), config_).coefficients;
    }
    return out;
  }
  std::shared_ptr<const WorkingOperator> prepare(const SparseOperator& op) const override {
    if (op.dim() != dim()) throw DomainError("prepare: operator dimension does not match");
    return std::make_shared<SparseWorkingOperator>(op);
  }

 private:
  SparseOperator forward_, backward_;
  KrylovConfig config_;
};

class SpectralDiagonalOperator final : public WorkingOperator {
 public:
  SpectralDiagonalOperator(SpectralOperator op, bool hermitian) : op_(std::move(op)), hermitian_(hermitian) {}
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& work) const override { return op_.apply(work); }
  bool hermitian() const override { return hermitian_; }

 private:
  SpectralOperator op_;
  bool hermitian_;
};

// Non-diagonal operators pass through the Fock basis.
class SpectralRoundTripOperator final : public WorkingOperator {
 public:
  SpectralRoundTripOperator(std::shared_ptr<const ReflectionSpectrum> spectrum, SparseOperator op)
      : spectrum_(std::move(spectrum)), op_(std::move(op)) {}
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& work) const override {
    const Eigen::MatrixXcd fock = spectrum_->to_fock(work);
    return spectrum_->to_spectral(op_.matrix() * fock);
  }
  bool hermitian() const override { return op_.hermitian(); }

 private:
  std::shared_ptr<const ReflectionSpectrum> spectrum_;
  SparseOperator op_;
};

class SpectralEvolver final : public Evolver {
 public:
  explicit SpectralEvolver(std::shared_ptr<const ReflectionSpectrum> spectrum, double load_tolerance = 0.0)
      : spectrum_(std::move(spectrum)), load_tolerance_(load_tolerance) {}
  std::size_t dim() const override { return spectrum_->dim(); }
  std::string name() const override { return spectrum_->windowed() ? "spectral-window" : "spectral"; }
  Eigen::MatrixXcd load(const Eigen::MatrixXcd& fock) const override {
    if (spectrum_->windowed()) {
      const double loss = spectrum_->projection_loss(fock).maxCoeff();
      if (loss > load_tolerance_) {
        std::ostringstream msg;
        msg << "spectral-window: state lies " << loss << " outside the energy window (tolerance " << load_tolerance_
            << ")";
        throw ConvergenceError(msg.str());
      }
    }
    return spectrum_->to_spectral(fock);
  }
  Eigen::MatrixXcd unload(const Eigen::MatrixXcd& work) const override { return spectrum_->to_fock(work); }
  Eigen::MatrixXcd propagate(const Eigen::MatrixXcd& work, double dt) const override {
    return spectrum_->evolve_spectral(work, dt);
  }
  std::shared_ptr<const WorkingOperator> prepare(const SparseOperator& op) const override {
    if (op.dim() != dim()) throw DomainError("prepare: operator dimension does not match");
    if (op.is_diagonal() && op.hermitian()) {
      return std::make_shared<SpectralDiagonalOperator>(spectrum_->represent_diagonal(op.diagonal_values()), true);
    }
    return std::make_shared<SpectralRoundTripOperator>(spectrum_, op);
  }

 private:
  std::shared_ptr<const ReflectionSpectrum> spectrum_;
  double load_tolerance_;
};

}  // namespace

std::unique_ptr<Evolver> make_krylov_evolver(const SparseOperator& hamiltonian, const KrylovConfig& config) {
  config.validate();
  if (!hamiltonian.hermitian()) throw DomainError("make_evolver: Hamiltonian must be Hermitian");
  return std::make_unique<KrylovEvolver>(hamiltonian, config);
}

std::unique_ptr<Evolver> make_evolver(const SparseOperator& hamiltonian, const EvolverOptions& options) {
  if (hamiltonian.dim() <= options.spectral_limit && ReflectionSpectrum::applicable(hamiltonian)) {
    return std::make_unique<SpectralEvolver>(std::make_shared<ReflectionSpectrum>(hamiltonian));
  }
  return make_krylov_evolver(hamiltonian, options.krylov);
}

std::unique_ptr<Evolver> make_windowed_evolver(const SparseOperator& hamiltonian, const Eigen::MatrixXcd& reference,
                                               const WindowOptions& options) {
  if (!ReflectionSpectrum::applicable(hamiltonian)) {
    throw DomainError("make_windowed_evolver: needs a real reflection-symmetric tridiagonal Hamiltonian");
  }
  if (reference.cols() == 0 || static_cast<std::size_t>(reference.rows()) != hamiltonian.dim()) {
    throw DomainError("make_windowed_evolver: reference states missing or of the wrong dimension");
  }
  if (!(options.widths > 0.0) || !(options.tolerance > 0.0) || options.attempts < 1) {
    throw DomainError("make_windowed_evolver: widths, tolerance and attempts must be positive");
  }
  const Eigen::MatrixXcd h_ref = hamiltonian.matrix() * reference;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, spread = 0.0;
  for (Eigen::Index c = 0; c < reference.cols(); ++c) {
    const double norm2 = reference.col(c).squaredNorm();
    const double mean = reference.col(c).dot(h_ref.col(c)).real() / norm2;
    const double sigma = std::sqrt(std::max(0.0, h_ref.col(c).squaredNorm() / norm2 - mean * mean));
    lo = std::min(lo, mean);
    hi = std::max(hi, mean);
    spread = std::max(spread, sigma);
  }
  // Keeps some room when every reference state is an eigenstate.
  spread = std::max(spread, 1e-8 * std::max({1.0, std::abs(lo), std::abs(hi)}));
  double widths = options.widths;
  double loss = 0.0;
  for (int attempt = 0; attempt < options.attempts; ++attempt, widths *= 2.0) {
    auto spectrum = std::make_shared<ReflectionSpectrum>(
        hamiltonian, ReflectionSpectrum::EnergyWindow{lo - widths * spread, hi + widths * spread});
    loss = spectrum->projection_loss(reference).maxCoeff();
    if (loss <= options.tolerance) return std::make_unique<SpectralEvolver>(std::move(spectrum), options.tolerance);
  }
  std::ostringstream msg;
  msg << "make_windowed_evolver: reference states keep " << loss << " outside the widest window";
  throw ConvergenceError(msg.str());
}

}  // namespace bhq
