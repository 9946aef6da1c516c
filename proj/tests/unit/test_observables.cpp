#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "bhq/fockspace/operators.hpp"
#include "bhq/fockspace/prequench.hpp"
#include "bhq/observables/collapse.hpp"
#include "bhq/observables/cumulants.hpp"
#include "bhq/observables/ensemble.hpp"
#include "bhq/observables/fitting.hpp"
#include "bhq/observables/manifest.hpp"
#include "bhq/observables/matrix_elements.hpp"
#include "bhq/observables/otoc.hpp"
#include "bhq/observables/quench.hpp"

using namespace bhq;

namespace {

KrylovConfig tight_krylov() {
  KrylovConfig c;
  c.step_tolerance = 1e-12;
  return c;
}

// exp(-iHt) from Eigen's dense self-adjoint solver, independent of the
// LAPACK tridiagonal path and of Krylov.
struct DenseEvolution {
  Eigen::MatrixXcd vectors;
  Eigen::VectorXd energies;

  explicit DenseEvolution(const SparseOperator& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(h.matrix()));
    vectors = es.eigenvectors();
    energies = es.eigenvalues();
  }
  Eigen::MatrixXcd u(double t) const {
    Eigen::VectorXcd phases(energies.size());
    for (Eigen::Index i = 0; i < energies.size(); ++i) phases(i) = std::polar(1.0, -energies(i) * t);
    return vectors * phases.asDiagonal() * vectors.adjoint();
  }
};

double dense_otoc(const DenseEvolution& dense, const SparseOperator& a, const SparseOperator& b,
                  const ThermalEnsemble& ens, double t) {
  const Eigen::MatrixXcd u = dense.u(t);
  const Eigen::MatrixXcd at = u.adjoint() * Eigen::MatrixXcd(a.matrix()) * u;
  const Eigen::MatrixXcd bm(b.matrix());
  const Eigen::MatrixXcd comm = at * bm - bm * at;
  double c = 0.0;
  for (std::size_t i = 0; i < ens.states.size(); ++i) c += ens.weights[i] * (comm * ens.states[i].vector).squaredNorm();
  return c;
}

// Bernoulli cumulants as polynomials in p: kappa_1 = p,
// kappa_{n+1} = p (1 - p) d kappa_n / dp.
std::vector<double> binomial_cumulants(int trials, double p, int n_max) {
  std::vector<std::vector<double>> poly{{}, {0.0, 1.0}};
  for (int n = 1; n < n_max; ++n) {
    const auto& k = poly[n];
    std::vector<double> d(k.size() > 1 ? k.size() - 1 : 1, 0.0);
    for (std::size_t j = 1; j < k.size(); ++j) d[j - 1] = j * k[j];
    std::vector<double> next(d.size() + 2, 0.0);
    for (std::size_t j = 0; j < d.size(); ++j) {
      next[j + 1] += d[j];
      next[j + 2] -= d[j];
    }
    poly.push_back(next);
  }
  std::vector<double> out(n_max + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) {
    double v = 0.0;
    for (std::size_t j = poly[n].size(); j-- > 0;) v = v * p + poly[n][j];
    out[n] = trials * v;
  }
  return out;
}

}  // namespace

TEST_CASE("time series validation and csv") {
  const auto s = TimeSeries::make_real({0.0, 0.5, 1.0}, {1.0, 1.0 / 3.0, -2.0});
  CHECK_FALSE(s.complex_valued);
  std::ostringstream out;
  s.write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,value");
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "0.5,0.33333333333333331");
  // 17 significant digits round-trip exactly.
  CHECK(std::stod(line.substr(line.find(',') + 1)) == 1.0 / 3.0);

  const auto c = TimeSeries::make_complex({0.0, 1.0}, {Complex(1.0, -2.0), Complex(0.1, 0.2)});
  std::ostringstream cout_;
  c.write_csv(cout_);
  CHECK(cout_.str().rfind("t,re,im\n0,1,-2\n", 0) == 0);

  CHECK_THROWS_AS(TimeSeries::make_real({0.0, 0.0}, {1.0, 2.0}), DomainError);
  CHECK_THROWS_AS(TimeSeries::make_real({0.0, 1.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(TimeSeries::make_real({0.0, 1.0}, {1.0, std::nan("")}), DomainError);
  CHECK_THROWS_AS(TimeSeries::make_real({1.0, 0.5}, {1.0, 2.0}), DomainError);

  const auto g = linear_grid(0.0, 1.0, 11);
  REQUIRE(g.size() == 11);
  CHECK(g.back() == 1.0);
  CHECK(g[3] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(linear_grid(1.0, 1.0, 5), DomainError);
}

TEST_CASE("manifest round trip") {
  Manifest m;
  m.model = "dimer";
  m.quench = "alpha: 0 -> 2.5";
  m.hbar_eff = 1.0 / 10001.0;
  m.lambda = 2.0 * std::sqrt(1.5);
  m.ehrenfest_time = std::log(10001.0) / (2.0 * *m.lambda);
  m.window = FitWindow{0.6, 1.5};
  m.git_describe = git_describe();
  m.config = {{"particles", 10000}};
  m.outputs["series"] = {"a.csv"};
  const auto j = m.to_json();
  for (const char* key : {"model", "quench", "hbar_eff", "lambda", "t_E", "window", "git_describe"}) {
    CHECK(j.contains(key));
  }
  const Manifest back = Manifest::from_json(j);
  CHECK(back.hbar_eff == m.hbar_eff);
  CHECK(*back.lambda == *m.lambda);
  CHECK(back.window->hi == 1.5);
  CHECK(back.outputs == m.outputs);

  Manifest stable = m;
  stable.lambda.reset();
  stable.ehrenfest_time.reset();
  stable.window.reset();
  CHECK_FALSE(Manifest::from_json(stable.to_json()).lambda.has_value());
  CHECK_THROWS_AS(Manifest::from_json(nlohmann::json{{"model", "dimer"}}), ConfigError);
}

TEST_CASE("quench setup") {
  const auto q = make_quench({Model::Dimer, 100, 0.0, 2.5, 1.0});
  CHECK(q.hbar_eff == doctest::Approx(1.0 / 101.0));
  REQUIRE(q.lambda.has_value());
  CHECK(*q.lambda == doctest::Approx(2.0 * std::sqrt(1.5)).epsilon(1e-12));
  CHECK(*q.ehrenfest_time == doctest::Approx(std::log(101.0) / (2.0 * *q.lambda)).epsilon(1e-12));
  CHECK(q.description() == "alpha: 0 -> 2.5");

  const auto stable = make_quench({Model::Dimer, 50, 0.0, 0.5, 1.0});
  CHECK_FALSE(stable.lambda.has_value());

  const auto tri = make_quench({Model::Trimer, 12, 0.0, -20.0, 1.0});
  REQUIRE(tri.lambda.has_value());
  CHECK(*tri.lambda == doctest::Approx(std::sqrt(31.0)).epsilon(1e-12));

  CHECK_THROWS_AS(make_quench({Model::Dimer, 10, 1.0, 2.5, 1.0}), ConfigError);
  CHECK_THROWS_AS(make_quench({Model::Dimer, 0, 0.0, 2.5, 1.0}), ConfigError);
  CHECK_THROWS_AS(model_from_string("tetramer"), ConfigError);
  CHECK(model_from_string("trimer") == Model::Trimer);
}

TEST_CASE("thermal ensemble") {
  const auto basis = FockBasis::build(2, 200);
  const double gap = prequench_gap(2, 1.0);
  CHECK(gap == 2.0);
  const double beta = 1.0 / (2.0 * gap);
  const auto ens = thermal_ensemble(basis, 1.0, beta);
  double sum = 0.0;
  for (double w : ens.weights) sum += w;
  CHECK(std::abs(sum - 1.0) < 1e-12);
  CHECK(ens.truncation_mass < 1e-10);
  // Equally spaced spectrum: successive weights fall by exp(-beta * gap).
  for (std::size_t i = 1; i < ens.weights.size(); ++i) {
    CHECK(ens.weights[i] / ens.weights[i - 1] == doctest::Approx(std::exp(-beta * gap)).epsilon(1e-9));
  }
  // Discarded mass from the full Boltzmann sum.
  const double r = std::exp(-beta * gap);
  double z_all = 0.0, z_kept = 0.0;
  for (int k = 0; k <= 200; ++k) z_all += std::pow(r, k);
  for (std::size_t k = 0; k < ens.states.size(); ++k) z_kept += std::pow(r, static_cast<double>(k));
  CHECK(ens.truncation_mass == doctest::Approx((z_all - z_kept) / z_all).epsilon(1e-6));

  const auto ground = thermal_ensemble(basis, 1.0, std::numeric_limits<double>::infinity());
  REQUIRE(ground.states.size() == 1);
  const auto pre = prequench_eigenbasis(basis, 1.0, 1);
  CHECK(std::abs(std::abs(ground.states[0].vector.dot(pre.states[0].vector)) - 1.0) < 1e-10);

  const auto ring = thermal_ensemble(FockBasis::build(3, 8), 1.0, 1.0 / (2.0 * prequench_gap(3, 1.0)));
  double ring_sum = 0.0;
  for (double w : ring.weights) ring_sum += w;
  CHECK(std::abs(ring_sum - 1.0) < 1e-12);
  CHECK(ring.truncation_mass < 1e-10);
}

TEST_CASE("evolver backends agree") {
  const auto q = make_quench({Model::Dimer, 40, 0.0, 2.5, 1.0});
  const auto spectral = make_evolver(q.hamiltonian);
  const auto krylov = make_krylov_evolver(q.hamiltonian, tight_krylov());
  CHECK(spectral->name() == "spectral");
  CHECK(krylov->name() == "krylov");
  const DenseEvolution dense(q.hamiltonian);
  const auto pre = prequench_eigenbasis(q.basis, 1.0, 6);
  Eigen::MatrixXcd fock(q.basis.size(), 3);
  for (int i = 0; i < 3; ++i) fock.col(i) = pre.states[i].vector;
  for (const Evolver* e : {spectral.get(), krylov.get()}) {
    const Eigen::MatrixXcd moved = e->unload(e->propagate(e->load(fock), 1.3));
    CHECK((moved - dense.u(1.3) * fock).norm() < 1e-9);
    const Eigen::MatrixXcd back = e->unload(e->propagate(e->propagate(e->load(fock), 0.7), -0.7));
    CHECK((back - fock).norm() < 1e-9);
  }

  // The trimer has no reflection structure and falls back to Krylov.
  const auto tri = make_quench({Model::Trimer, 6, 0.0, -20.0, 1.0});
  CHECK(make_evolver(tri.hamiltonian)->name() == "krylov");
}

TEST_CASE("windowed evolver") {
  const auto q = make_quench({Model::Dimer, 400, 0.0, 2.5, 1.0});
  const auto pre = prequench_eigenbasis(q.basis, 1.0, 8);
  Eigen::MatrixXcd ref(q.basis.size(), 8);
  for (int i = 0; i < 8; ++i) ref.col(i) = pre.states[i].vector;
  const auto windowed = make_windowed_evolver(q.hamiltonian, ref);
  const auto full = make_evolver(q.hamiltonian);
  CHECK(windowed->name() == "spectral-window");

  const auto a = operator_polynomial(q.basis, "z + z^2");
  const auto grid = linear_grid(0.0, 1.5, 7);
  const auto w = matrix_element_scan(*windowed, pre, a, {{2}, {3}, {7}}, {5}, grid);
  const auto f = matrix_element_scan(*full, pre, a, {{2}, {3}, {7}}, {5}, grid);
  for (std::size_t s = 0; s < w.size(); ++s) {
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(w[s].values[i] - f[s].values[i]) < 1e-10);
  }

  // A Fock state at the band edge lies far outside the window.
  Eigen::MatrixXcd edge = Eigen::MatrixXcd::Zero(q.basis.size(), 1);
  edge(0, 0) = 1.0;
  CHECK_THROWS_AS(windowed->load(edge), ConvergenceError);

  WindowOptions narrow;
  narrow.widths = 1e-3;
  narrow.attempts = 1;
  CHECK_THROWS_AS(make_windowed_evolver(q.hamiltonian, ref, narrow), ConvergenceError);
  const auto tri = make_quench({Model::Trimer, 4, 0.0, -20.0, 1.0});
  CHECK_THROWS_AS(make_windowed_evolver(tri.hamiltonian, Eigen::MatrixXcd::Ones(tri.basis.size(), 1)), DomainError);
}

TEST_CASE("matrix element scan") {
  const auto q = make_quench({Model::Dimer, 60, 0.0, 2.5, 1.0});
  const auto ev = make_evolver(q.hamiltonian);
  const auto pre = prequench_eigenbasis(q.basis, 1.0, 8);
  const auto grid = linear_grid(0.0, 2.0, 9);

  const auto id = operator_polynomial(q.basis, "1");
  const auto ones = matrix_element_scan(*ev, pre, id, {{3}}, {3}, grid);
  for (const auto& v : ones[0].values) CHECK(std::abs(v - 1.0) < 1e-12);

  const auto a = operator_polynomial(q.basis, "z + z^2");
  const auto s = matrix_element_scan(*ev, pre, a, {{1}, {2}, {4}}, {3}, grid);
  REQUIRE(s.size() == 3);
  CHECK(s[0].meta.label == "k=1,l=3");
  const int ks[] = {1, 2, 4};
  for (int i = 0; i < 3; ++i) {
    const Complex direct = pre.states[ks[i]].vector.dot(a.apply(pre.states[3].vector));
    CHECK(std::abs(s[i].values[0] - direct) < 1e-12);
  }

  // Krylov against the dense oracle at a later time.
  const auto kry = make_krylov_evolver(q.hamiltonian, tight_krylov());
  const auto sk = matrix_element_scan(*kry, pre, a, {{1}, {2}, {4}}, {3}, grid);
  const DenseEvolution dense(q.hamiltonian);
  const Eigen::MatrixXcd u = dense.u(grid.back());
  for (int i = 0; i < 3; ++i) {
    const Complex oracle = (u * pre.states[ks[i]].vector).dot(a.apply(u * pre.states[3].vector));
    CHECK(std::abs(sk[i].values.back() - oracle) < 1e-9);
    CHECK(std::abs(s[i].values.back() - oracle) < 1e-9);
  }

  // Exchange parity: z is odd, so <k|z(t)|l> vanishes for even k - l.
  const auto z = z_operator(q.basis);
  const auto sz = matrix_element_scan(*ev, pre, z, {{1}, {5}, {2}}, {3}, grid);
  for (const auto& v : sz[0].values) CHECK(std::abs(v) < 1e-12);
  for (const auto& v : sz[1].values) CHECK(std::abs(v) < 1e-12);
  CHECK(std::abs(sz[2].values.back()) > 1e-6);

  CHECK_THROWS_AS(matrix_element_scan(*ev, pre, a, {{30}}, {3}, grid), DomainError);
}

TEST_CASE("commutator scan") {
  const auto q = make_quench({Model::Dimer, 30, 0.0, 2.5, 1.0});
  const auto ev = make_evolver(q.hamiltonian);
  const auto pre = prequench_eigenbasis(q.basis, 1.0, 6);
  const auto a = z_operator(q.basis);
  const auto b = operator_polynomial(q.basis, "z^2");
  const auto grid = linear_grid(0.0, 1.0, 5);
  const auto c = commutator_scan(*ev, pre, a, b, {{1}, {2}}, {0}, grid);
  // At t = 0 both are functions of z and commute.
  for (const auto& s : c) CHECK(std::abs(s.values[0]) < 1e-14);
  const DenseEvolution dense(q.hamiltonian);
  const Eigen::MatrixXcd u = dense.u(1.0);
  const Eigen::MatrixXcd at = u.adjoint() * Eigen::MatrixXcd(a.matrix()) * u;
  const Eigen::MatrixXcd bm(b.matrix());
  for (int i = 0; i < 2; ++i) {
    const Complex oracle = pre.states[i + 1].vector.dot((at * bm - bm * at) * pre.states[0].vector);
    CHECK(std::abs(c[i].values.back() - oracle) < 1e-10);
  }
  CHECK_THROWS_AS(commutator_scan(*ev, pre, a, mode_raising_operator(q.basis, 1), {{1}}, {0}, grid), DomainError);
}

TEST_CASE("otoc") {
  const auto q = make_quench({Model::Dimer, 24, 0.0, 2.5, 1.0});
  const auto ev = make_evolver(q.hamiltonian);
  const auto kry = make_krylov_evolver(q.hamiltonian, tight_krylov());
  const auto ens = thermal_ensemble(q.basis, 1.0, 0.25);
  const auto z = z_operator(q.basis);
  const auto grid = linear_grid(0.0, 1.5, 6);
  const DenseEvolution dense(q.hamiltonian);

  const auto c = otoc_numeric(*ev, z, z, ens, grid);
  const auto ck = otoc_numeric(*kry, z, z, ens, grid);
  CHECK(std::abs(c.values[0]) < 1e-20);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double oracle = dense_otoc(dense, z, z, ens, grid[i]);
    CHECK(c.values[i].real() >= 0.0);
    CHECK(std::abs(c.values[i].real() - oracle) < 1e-10 * std::max(1.0, oracle));
    CHECK(std::abs(ck.values[i].real() - oracle) < 1e-9 * std::max(1.0, oracle));
  }

  const auto id = operator_polynomial(q.basis, "1");
  for (const auto& v : otoc_numeric(*ev, z, id, ens, grid).values) CHECK(std::abs(v) < 1e-20);

  // Non-reflection-symmetric case through Krylov.
  const auto tri = make_quench({Model::Trimer, 5, 0.0, -20.0, 1.0});
  const auto tri_ev = make_evolver(tri.hamiltonian, {0, tight_krylov()});
  const auto n1 = site_number_operator(tri.basis, 1, true);
  const auto n2 = site_number_operator(tri.basis, 2, true);
  const auto tri_ens = thermal_ensemble(tri.basis, 1.0, 1.0);
  const auto ct = otoc_numeric(*tri_ev, n1, n2, tri_ens, {0.0, 0.2, 0.4});
  const DenseEvolution tri_dense(tri.hamiltonian);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(ct.values[i].real() - dense_otoc(tri_dense, n1, n2, tri_ens, ct.grid[i])) < 1e-10);
  }
  CHECK_THROWS_AS(otoc_numeric(*ev, mode_raising_operator(q.basis, 1), z, ens, grid), DomainError);
}

TEST_CASE("cumulants of known distributions") {
  // Moment/cumulant round trip.
  const std::vector<double> kappa{0.0, 0.3, 1.7, -0.4, 2.2, 0.9, -1.1, 0.05};
  const auto m = cumulants_to_moments(kappa);
  const auto back = moments_to_cumulants(m);
  for (std::size_t n = 1; n < kappa.size(); ++n) CHECK(std::abs(back[n] - kappa[n]) < 1e-12 * std::max(1.0, std::abs(m[n])));
  CHECK_THROWS_AS(moments_to_cumulants({0.5, 1.0}), DomainError);

  // Binomial(40, 0.3) against the closed-form recursion.
  const int trials = 40;
  const double p = 0.3;
  std::vector<double> values, probs;
  for (int k = 0; k <= trials; ++k) {
    values.push_back(k);
    probs.push_back(std::exp(std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0) +
                             k * std::log(p) + (trials - k) * std::log1p(-p)));
  }
  const auto exact = binomial_cumulants(trials, p, 10);
  const auto got = distribution_cumulants(values, probs, 10);
  for (int n = 1; n <= 10; ++n) {
    CHECK(std::abs(got.kappa[n] - exact[n]) <= std::max(1e-10 * std::abs(exact[n]), 10.0 * got.floor[n]));
  }

  // Lattice Gaussian with spacing sigma/5: higher cumulants vanish to far
  // below the floor, kappa_2 = sigma^2.
  const double sigma = 0.01;
  values.clear();
  probs.clear();
  for (int i = -70; i <= 70; ++i) {
    const double x = 0.5 + i * sigma / 5.0;
    values.push_back(x);
    probs.push_back(std::exp(-0.5 * std::pow((x - 0.5) / sigma, 2)));
  }
  const auto g = distribution_cumulants(values, probs, 12);
  CHECK(g.kappa[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.kappa[2] == doctest::Approx(sigma * sigma).epsilon(1e-12));
  for (int n = 3; n <= 12; ++n) CHECK(std::abs(g.kappa[n]) < 10.0 * g.floor[n]);

  CHECK_THROWS_AS(distribution_cumulants(values, probs, 13), DomainError);
  CHECK_THROWS_AS(distribution_cumulants(values, probs, 0), DomainError);
  CHECK_THROWS_AS(distribution_cumulants({1.0}, {0.5, 0.5}, 2), DomainError);
}

TEST_CASE("cumulants along a quench") {
  const auto q = make_quench({Model::Dimer, 80, 0.0, 2.5, 1.0});
  const auto ev = make_evolver(q.hamiltonian);
  const auto kry = make_krylov_evolver(q.hamiltonian, tight_krylov());
  const auto ens = thermal_ensemble(q.basis, 1.0, 0.25);
  const auto z = z_operator(q.basis);
  const auto grid = linear_grid(0.0, 1.0, 5);
  const auto t = cumulants_numeric(*ev, z, ens, grid, 6);
  const auto tk = cumulants_numeric(*kry, z, ens, grid, 6);

  // t = 0 directly from the ensemble.
  const auto a = z.diagonal_values();
  std::vector<double> p(a.size(), 0.0);
  for (std::size_t k = 0; k < ens.states.size(); ++k) {
    for (std::size_t i = 0; i < a.size(); ++i) p[i] += ens.weights[k] * std::norm(ens.states[k].vector(i));
  }
  const auto direct = distribution_cumulants(a, p, 6);
  for (int n = 1; n <= 6; ++n) {
    CHECK(std::abs(t.kappa[n][0] - direct.kappa[n]) <= 10.0 * t.floor[n][0] + 1e-300);
    // Exchange symmetry keeps odd cumulants of z at zero.
    if (n % 2 == 1) CHECK(t.precision_limited[n].back());
  }
  for (int n : {2, 4, 6}) {
    CHECK_FALSE(t.precision_limited[n].back());
    CHECK(std::abs(t.kappa[n].back() - tk.kappa[n].back()) < 1e-8 * std::abs(t.kappa[n].back()));
  }
  CHECK(t.series(2).meta.label == "n=2");
  CHECK_THROWS_AS(cumulants_numeric(*ev, z, ens, grid, 13), DomainError);
  CHECK_THROWS_AS(cumulants_numeric(*ev, q.hamiltonian, ens, grid, 4), DomainError);
}

TEST_CASE("exponent fits") {
  const auto grid = linear_grid(0.0, 2.0, 41);
  std::vector<double> v;
  for (double t : grid) v.push_back(3.0 * std::exp(1.7 * t));
  const auto fit = fit_exponent(TimeSeries::make_real(grid, v), {0.2, 1.8});
  CHECK(fit.rate == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
  CHECK(fit.points == 33);

  std::mt19937 rng(7);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> noisy;
  for (std::size_t i = 0; i < grid.size(); ++i) noisy.push_back(v[i] * (1.0 + noise(rng)));
  CHECK(fit_exponent(TimeSeries::make_real(grid, noisy), {0.0, 2.0}).rate == doctest::Approx(1.7).epsilon(0.02));

  const auto flat = fit_exponent(TimeSeries::make_real(grid, std::vector<double>(grid.size(), -2.0)), {0.0, 2.0});
  CHECK(std::abs(flat.rate) < 1e-14);

  std::vector<double> sign_change = v;
  sign_change[20] = -1.0;
  CHECK_THROWS_AS(fit_exponent(TimeSeries::make_real(grid, sign_change), {0.0, 2.0}), WindowError);
  std::vector<double> with_zero = v;
  with_zero[10] = 0.0;
  CHECK_THROWS_AS(fit_exponent(TimeSeries::make_real(grid, with_zero), {0.0, 2.0}), WindowError);
  CHECK_THROWS_AS(fit_exponent(TimeSeries::make_real(grid, v), {0.0, 0.15}), WindowError);
  // Complex series may rotate freely.
  std::vector<Complex> rotating;
  for (double t : grid) rotating.push_back(std::polar(std::exp(0.5 * t), 3.0 * t));
  CHECK(fit_exponent(TimeSeries::make_complex(grid, rotating), {0.0, 2.0}).rate == doctest::Approx(0.5));
}

TEST_CASE("phase deviation") {
  const auto grid = linear_grid(0.0, 1.0, 11);
  const double phi = 0.37;
  const int k = 4, l = 10;
  std::vector<Complex> v, flipped, offset;
  for (double t : grid) {
    const double mag = std::exp(2.0 * t);
    v.push_back(std::polar(mag, (k - l) * phi));
    flipped.push_back(std::polar(mag, (k - l) * phi + std::numbers::pi));
    offset.push_back(std::polar(mag, (k - l) * phi + 0.2));
  }
  const auto d = phase_deviation(TimeSeries::make_complex(grid, v), k, l, phi);
  CHECK(d.max_abs({0.0, 1.0}) < 1e-12);
  CHECK(phase_deviation(TimeSeries::make_complex(grid, flipped), k, l, phi).max_abs({0.0, 1.0}) < 1e-12);
  CHECK(phase_deviation(TimeSeries::make_complex(grid, offset), k, l, phi).max_abs({0.0, 1.0}) ==
        doctest::Approx(0.2));

  v[3] = 1e-20;
  const auto flagged = phase_deviation(TimeSeries::make_complex(grid, v), k, l, phi);
  CHECK(flagged.undefined[3]);
  CHECK_FALSE(flagged.undefined[4]);
  CHECK_THROWS_AS(phase_deviation(TimeSeries::make_complex(grid, v), 3, 3, phi), DomainError);
}

TEST_CASE("collapse") {
  const double lambda = 2.0, hbar = 1e-3;
  const auto grid = linear_grid(0.1, 2.0, 40);
  std::vector<CollapseInput> inputs;
  for (int order : {1, 2, 3}) {
    const Complex c(0.5 * order, -0.3);
    std::vector<Complex> v;
    for (double t : grid) v.push_back(c * std::pow(std::sqrt(hbar) * std::exp(lambda * t), order));
    SeriesMeta meta;
    meta.label = "order " + std::to_string(order);
    inputs.push_back({TimeSeries::make_complex(grid, v, meta), order, c});
  }
  inputs.push_back({TimeSeries::make_complex(grid, std::vector<Complex>(grid.size(), 0.0)), 2, 1.0});
  // Rounding noise on a symmetry-forbidden element.
  inputs.push_back({TimeSeries::make_complex(grid, std::vector<Complex>(grid.size(), Complex(3e-13, -1e-13))), 2, 1.0});
  const auto curves = collapse_statistic(inputs, lambda, hbar);
  REQUIRE(curves.size() == 5);
  for (int i = 0; i < 3; ++i) {
    for (const auto& f : curves[i].f.values) CHECK(f.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(curves[i].plateau.found);
    CHECK(curves[i].plateau.t_begin == grid.front());
    CHECK(curves[i].plateau.t_end == grid.back());
  }
  CHECK(curves[3].excluded);
  CHECK(curves[3].note.find("selection rule") != std::string::npos);
  CHECK(curves[4].excluded);
  // Without other inputs to set the scale the same series is kept.
  CHECK_FALSE(collapse_statistic({inputs[4]}, lambda, hbar).front().excluded);
  CHECK(pointwise_spread(curves, {0.0, 2.0}) < 1e-12);
  CHECK(level_spread(curves, {0.0, 2.0}) < 1e-12);

  // A curve that drops to half its level midway.
  std::vector<double> step;
  for (double t : grid) step.push_back(t < 1.2 ? 1.0 : 0.5);
  const auto plateau = detect_plateau(TimeSeries::make_real(grid, step), 0.2, {0.0, 2.0});
  CHECK(plateau.found);
  CHECK(plateau.t_end < 1.2);
  CHECK(plateau.level == doctest::Approx(1.0));
  CHECK_THROWS_AS(collapse_statistic({{inputs[0].series, 0, 1.0}}, lambda, hbar), DomainError);
}
