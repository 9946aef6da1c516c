#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "bhq/fockspace/fock_basis.hpp"
#include "bhq/fockspace/operators.hpp"
#include "bhq/fockspace/prequench.hpp"
#include "bhq/propagator/eigensolver.hpp"

using namespace bhq;

namespace {

// Independent count: number of compositions of N into L parts by recursion.
std::uint64_t count_compositions(int sites, int particles) {
  if (sites == 1) return 1;
  std::uint64_t total = 0;
  for (int n = 0; n <= particles; ++n) total += count_compositions(sites - 1, particles - n);
  return total;
}

Eigen::VectorXd dense_spectrum(const SparseOperator& op) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Eigen::MatrixXcd(op.matrix()));
  return eig.eigenvalues();
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("basis enumeration") {
  SUBCASE("dimer N=3 ordering") {
    const auto b = FockBasis::build(2, 3);
    REQUIRE(b.size() == 4);
    const std::vector<std::vector<Occupation>> expected{{3, 0}, {2, 1}, {1, 2}, {0, 3}};
    for (std::size_t i = 0; i < 4; ++i) {
      const auto s = b.state(i);
      CHECK(std::vector<Occupation>(s.begin(), s.end()) == expected[i]);
    }
  }
  SUBCASE("trimer N=300 size") {
    CHECK(count_compositions(3, 300) == 45451);
    CHECK(FockBasis::build(3, 300).size() == 45451);
  }
  SUBCASE("dimer N=1e5 size") { CHECK(FockBasis::build(2, 100000).size() == 100001); }
  SUBCASE("round trip, particle number and descending order") {
    for (int sites = 2; sites <= 4; ++sites) {
      for (int n : {1, 2, 5, 9}) {
        const auto b = FockBasis::build(sites, n);
        CHECK(b.size() == count_compositions(sites, n));
        for (std::size_t i = 0; i < b.size(); ++i) {
          const auto s = b.state(i);
          std::uint64_t total = 0;
          for (auto x : s) total += x;
          CHECK(total == static_cast<std::uint64_t>(n));
          CHECK(b.index(s) == i);
          if (i > 0) {
            const auto prev = b.state(i - 1);
            CHECK(std::lexicographical_compare(s.begin(), s.end(), prev.begin(), prev.end()));
          }
        }
      }
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(FockBasis::build(1, 3), DomainError);
    CHECK_THROWS_AS(FockBasis::build(2, 0), DomainError);
    CHECK_THROWS_AS(FockBasis::build(4, 1000), SizingError);
    try {
      FockBasis::build(4, 1000);
    } catch (const SizingError& e) {
      CHECK(std::string(e.what()).find("167668501") != std::string::npos);
    }
  }
  SUBCASE("csv dump") {
    std::ostringstream out;
    FockBasis::build(2, 1).write_csv(out);
    CHECK(out.str().find("index") == 0);
  }
}

TEST_CASE("hamiltonian spectra") {
  SUBCASE("single particle") {
    for (double u : {0.0, -3.0, 7.5}) {
      const auto ev = dense_spectrum(build_hamiltonian(FockBasis::build(2, 1), 1.0, u));
      CHECK(ev(0) == doctest::Approx(-1.0).epsilon(1e-14));
      CHECK(ev(1) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("two free particles") {
    const auto ev = dense_spectrum(build_hamiltonian(FockBasis::build(2, 2), 1.0, 0.0));
    CHECK(ev(0) == doctest::Approx(-2.0));
    CHECK(std::abs(ev(1)) < 1e-14);
    CHECK(ev(2) == doctest::Approx(2.0));
  }
  SUBCASE("trimer ground energy against an independent dense build") {
    // Oracle: Hamiltonian assembled densely from explicit ladder matrices
    // on the truncated single-site space.
    const auto b = FockBasis::build(3, 3);
    const int cut = 4;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cut, cut);
    for (int n = 1; n < cut; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(cut, cut);
    auto kron3 = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& w) {
      return Eigen::MatrixXd(Eigen::kroneckerProduct(Eigen::kroneckerProduct(x, y).eval(), w));
    };
    std::vector<Eigen::MatrixXd> site{kron3(a, id, id), kron3(id, a, id), kron3(id, id, a)};
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(cut * cut * cut, cut * cut * cut);
    const double u = -1.0;
    for (int j = 0; j < 3; ++j) {
      const auto& aj = site[j];
      const auto& ak = site[(j + 1) % 3];
      h -= aj.transpose() * ak + ak.transpose() * aj;
      h += 0.5 * u * aj.transpose() * aj.transpose() * aj * aj;
    }
    // Restrict to N=3 by projecting with the number operator.
    Eigen::MatrixXd number = Eigen::MatrixXd::Zero(h.rows(), h.cols());
    for (const auto& aj : site) number += aj.transpose() * aj;
    std::vector<int> keep;
    for (int i = 0; i < h.rows(); ++i) {
      if (std::abs(number(i, i) - 3.0) < 1e-12) keep.push_back(i);
    }
    REQUIRE(keep.size() == b.size());
    Eigen::MatrixXd sub(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t c = 0; c < keep.size(); ++c) sub(r, c) = h(keep[r], keep[c]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(sub);

    const auto ev = dense_spectrum(build_hamiltonian(b, 1.0, u));
    for (Eigen::Index k = 0; k < ev.size(); ++k) CHECK(std::abs(ev(k) - oracle.eigenvalues()(k)) < 1e-12);
  }
}

TEST_CASE("hamiltonian structure") {
  const auto dimer = FockBasis::build(2, 40);
  const auto h = build_hamiltonian(dimer, 1.0, -0.3);
  CHECK(h.hermiticity_defect() == 0.0);
  for (Eigen::Index r = 0; r < h.matrix().outerSize(); ++r) {
    for (SparseOperator::Matrix::InnerIterator it(h.matrix(), r); it; ++it) CHECK(std::abs(it.col() - r) <= 1);
  }

  const auto trimer = FockBasis::build(3, 6);
  const auto ht = build_hamiltonian(trimer, 1.0, -2.0);
  CHECK(ht.hermiticity_defect() == 0.0);
  const Eigen::MatrixXcd hd(ht.matrix());
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(hd.rows(), hd.cols());
  for (int j = 1; j <= 3; ++j) total += Eigen::MatrixXcd(site_number_operator(trimer, j).matrix());
  CHECK(max_abs(hd * total - total * hd) == 0.0);

  for (int n = 2; n <= 10; n += 4) {
    const auto b = FockBasis::build(3, n);
    const Eigen::MatrixXcd hm(build_hamiltonian(b, 1.0, -1.3).matrix());
    const Eigen::MatrixXcd shift(cyclic_shift_operator(b).matrix());
    CHECK(max_abs(hm * shift - shift * hm) < 1e-13);
    for (int m = 0; m < 3; ++m) {
      const Eigen::MatrixXcd mode(mode_occupation_operator(b, m).matrix());
      const Eigen::MatrixXcd h0(build_hamiltonian(b, 1.0, 0.0).matrix());
      CHECK(max_abs(h0 * mode - mode * h0) < 1e-12);
    }
  }
  // Open chain differs from the ring for L=3 but not for L=2.
  CHECK(build_hamiltonian(trimer, 1.0, 0.0, false).nonzeros() < ht.nonzeros());
  CHECK(build_hamiltonian(dimer, 1.0, 0.0, false).nonzeros() == build_hamiltonian(dimer, 1.0, 0.0, true).nonzeros());
}

TEST_CASE("diagonal observables") {
  const int n = 7;
  const auto b = FockBasis::build(2, n);
  const auto z = z_operator(b);
  const auto zv = z.diagonal_values();
  CHECK(zv.front() == doctest::Approx(n / (2.0 * (n + 1))).epsilon(1e-15));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double k = b.state(i)[0];
    CHECK(zv[i] == doctest::Approx((2 * k - n) / (2.0 * (n + 1))));
    CHECK(zv[i] == doctest::Approx(-zv[b.size() - 1 - i]));
  }
  CHECK_THROWS_AS(z_operator(FockBasis::build(3, 2)), GeometryError);

  const auto b3 = FockBasis::build(2, 3);
  CHECK(site_number_operator(b3, 1).diagonal_values()[0] == 3.0);
  CHECK(site_number_operator(b3, 2, true).diagonal_values()[2] == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(site_number_operator(b3, 3), DomainError);

  const auto poly = operator_polynomial(b, "z + z^2").diagonal_values();
  const double z0 = n / (2.0 * (n + 1));
  CHECK(poly[0] == doctest::Approx(z0 + z0 * z0).epsilon(1e-15));
  const auto one = operator_polynomial(b, "1").diagonal_values();
  CHECK(std::all_of(one.begin(), one.end(), [](double v) { return v == 1.0; }));
  const auto sq = operator_polynomial(b, "z^2").diagonal_values();
  for (std::size_t i = 0; i < sq.size(); ++i) CHECK(std::abs(sq[i] - zv[i] * zv[i]) < 1e-15);
  const auto scaled = operator_polynomial(b, "-(n1 - n2)/(2*(N+1)) + z").diagonal_values();
  for (double v : scaled) CHECK(std::abs(v) < 1e-15);
  CHECK_THROWS_AS(operator_polynomial(b, "q + 1"), ConfigError);
  CHECK_THROWS_AS(operator_polynomial(b, "n3"), ConfigError);
  CHECK_THROWS_AS(operator_polynomial(b, "z^-1"), ConfigError);
  CHECK_THROWS_AS(operator_polynomial(b, "(z"), ConfigError);
}

TEST_CASE("prequench eigenbasis") {
  SUBCASE("dimer harmonic ladder") {
    const auto b = FockBasis::build(2, 100000);
    const auto pre = prequench_eigenbasis(b, 1.0, 21);
    CHECK(pre.orthonormality_defect() < 1e-12);
    const auto z = z_operator(b);
    for (int k = 0; k <= 20; ++k) {
      CHECK(pre.states[k].label == std::vector<int>{k});
      const double gap = pre.states[k].energy - pre.states[0].energy;
      CHECK(std::abs(gap - 2.0 * k) <= 0.01 * 2.0 * std::max(k, 1));
      if (k > 0) {
        const Complex zk = pre.states[k].vector.dot(z.apply(pre.states[k - 1].vector));
        CHECK(zk.real() > 0.0);
        CHECK(std::abs(zk.imag()) < 1e-12 * std::abs(zk));
      }
    }
  }
  SUBCASE("trimer first multiplet") {
    const auto b = FockBasis::build(3, 300);
    const auto pre = prequench_eigenbasis(b, 1.0, 6);
    CHECK(pre.orthonormality_defect() < 1e-12);
    CHECK(pre.states[0].label == std::vector<int>{0, 0});
    CHECK(pre.states[1].energy - pre.states[0].energy == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(pre.states[2].energy - pre.states[0].energy == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(pre.states[3].energy - pre.states[0].energy == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(pre.states[1].multiplet == 1);
    CHECK(pre.states[2].multiplet == 1);
    CHECK(pre.states[3].multiplet == 2);
    std::vector<std::vector<int>> labels;
    for (const auto& s : pre.states) labels.push_back(s.label);
    CHECK(std::count(labels.begin(), labels.end(), std::vector<int>{1, 0}) == 1);
    CHECK(std::count(labels.begin(), labels.end(), std::vector<int>{0, 1}) == 1);
    CHECK(std::count(labels.begin(), labels.end(), std::vector<int>{2, 0}) == 1);
    CHECK(std::count(labels.begin(), labels.end(), std::vector<int>{1, 1}) == 1);
    CHECK(std::count(labels.begin(), labels.end(), std::vector<int>{0, 2}) == 1);
  }
  SUBCASE("small trimer: states are plane-wave eigenstates, phases follow a_m^+ a_0") {
    const auto b = FockBasis::build(3, 8);
    const auto pre = prequench_eigenbasis(b, 1.0, 10);
    CHECK(pre.orthonormality_defect() < 1e-12);
    const auto h0 = build_hamiltonian(b, 1.0, 0.0);
    for (const auto& s : pre.states) {
      CHECK((h0.apply(s.vector) - s.energy * s.vector).norm() < 1e-10);
      for (int m = 1; m <= 2; ++m) {
        const auto nm = mode_occupation_operator(b, m);
        CHECK((nm.apply(s.vector) - double(s.label[m - 1]) * s.vector).norm() < 1e-9);
      }
      const double free = -2.0 * 8 + 3.0 * (s.label[0] + s.label[1]);
      CHECK(s.energy == doctest::Approx(free).epsilon(1e-12));
    }
    const auto r1 = mode_raising_operator(b, 1);
    const int p = pre.find({1, 0});
    REQUIRE(p > 0);
    const Complex amp = pre.states[p].vector.dot(r1.apply(pre.states[0].vector));
    CHECK(amp.real() > 0.0);
    CHECK(std::abs(amp.imag()) < 1e-10);
  }
  SUBCASE("single state and errors") {
    const auto b = FockBasis::build(2, 10);
    const auto pre = prequench_eigenbasis(b, 1.0, 1);
    REQUIRE(pre.states.size() == 1);
    CHECK(pre.states[0].energy == doctest::Approx(-10.0));
    CHECK_THROWS_AS(prequench_eigenbasis(b, 1.0, 12), DomainError);
    CHECK_THROWS_AS(prequench_eigenbasis(b, 1.0, 2, 0.0), DomainError);
  }
}
