#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bellquad/errors.hpp"
#include "bellquad/quantum_model.hpp"
#include "support/oracles.hpp"

using namespace bellquad;

namespace {

UnitVector unit(const std::array<double, 3>& v) { return UnitVector(v[0], v[1], v[2]); }
Observable first(const std::array<double, 3>& v) { return {Particle::first, unit(v)}; }
Observable second(const std::array<double, 3>& v) { return {Particle::second, unit(v)}; }

void check_matrix(const Matrix4& m, const Matrix4& expected, double tol = 1e-15) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::abs(m[i][j] - expected[i][j]) <= tol);
    }
}

Matrix4 diag(double a, double b, double c, double d) {
  Matrix4 m{};
  m[0][0] = a;
  m[1][1] = b;
  m[2][2] = c;
  m[3][3] = d;
  return m;
}

}  // namespace

TEST_CASE("observable_matrix builds Pauli operators on the right factor") {
  check_matrix(observable_matrix(first({0, 0, 1})), diag(1, 1, -1, -1));
  check_matrix(observable_matrix(second({0, 0, 1})), diag(1, -1, 1, -1));

  Matrix4 sx1{};
  sx1[0][2] = sx1[2][0] = sx1[1][3] = sx1[3][1] = 1;
  check_matrix(observable_matrix(first({1, 0, 0})), sx1);
}

TEST_CASE("observable_matrix squares to the identity") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = oracle::random_direction(rng);
    for (Particle p : {Particle::first, Particle::second}) {
      const Matrix4 m = observable_matrix({p, unit(n)});
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          Complex sq = 0;
          for (int k = 0; k < 4; ++k) sq += m[i][k] * m[k][j];
          CHECK(std::abs(sq - Complex(i == j ? 1 : 0, 0)) <= 1e-12);
          CHECK(std::abs(m[i][j] - std::conj(m[j][i])) <= 1e-15);
        }
    }
  }
}

TEST_CASE("unit vectors are validated") {
  CHECK_THROWS_AS(UnitVector(0.5, 0, 0), ValidationError);
  CHECK_THROWS_AS(UnitVector(0, 0, 0), ValidationError);
  CHECK_NOTHROW(UnitVector(0, 1 + 5e-10, 0));
  CHECK_THROWS_AS(UnitVector(0, 1 + 1e-8, 0), ValidationError);
}

TEST_CASE("density matrix validation") {
  CHECK_NOTHROW(DensityMatrix::singlet());
  CHECK_NOTHROW(DensityMatrix::werner(0.3));
  CHECK_THROWS_AS(DensityMatrix::werner(1.5), ValidationError);

  SUBCASE("trace") { CHECK_THROWS_AS(DensityMatrix{diag(0.5, 0.5, 0.5, 0)}, ValidationError); }
  SUBCASE("hermiticity") {
    Matrix4 m = diag(0.25, 0.25, 0.25, 0.25);
    m[0][1] = Complex(0, 0.1);
    m[1][0] = Complex(0, 0.1);
    CHECK_THROWS_AS(DensityMatrix{m}, ValidationError);
  }
  SUBCASE("positivity") {
    CHECK_THROWS_AS(DensityMatrix{diag(0.6, 0.6, -0.2, 0)}, ValidationError);
    // Hermitian, unit trace, positive diagonal, but eigenvalues 0.5 +- 0.6.
    Matrix4 m = diag(0.5, 0.5, 0, 0);
    m[0][1] = Complex(0, 0.6);
    m[1][0] = Complex(0, -0.6);
    CHECK_THROWS_AS(DensityMatrix{m}, ValidationError);
  }
}

TEST_CASE("hermitian eigenvalues") {
  const auto ev = hermitian_eigenvalues(DensityMatrix::singlet().entries());
  CHECK(std::abs(ev[0]) < 1e-14);
  CHECK(std::abs(ev[3] - 1) < 1e-14);

  const auto w = hermitian_eigenvalues(DensityMatrix::werner(0.6).entries());
  CHECK(std::abs(w[0] - 0.1) < 1e-14);
  CHECK(std::abs(w[3] - (0.6 + 0.1)) < 1e-14);

  // A complex example with eigenvalues 0.5 +- 0.3 on the first block.
  Matrix4 m = diag(0.5, 0.5, 0, 0);
  m[0][1] = Complex(0.0, 0.3);
  m[1][0] = Complex(0.0, -0.3);
  const auto c = hermitian_eigenvalues(m);
  CHECK(std::abs(c[0]) < 1e-14);
  CHECK(std::abs(c[2] - 0.2) < 1e-14);
  CHECK(std::abs(c[3] - 0.8) < 1e-14);
}

TEST_CASE("correlation examples") {
  const auto singlet = DensityMatrix::singlet();
  CHECK(correlation(singlet, first({0, 0, 1}), second({0, 0, 1})) ==
        doctest::Approx(oracle::correlation(oracle::singlet(), {0, 0, 1}, {0, 0, 1})));
  CHECK(std::abs(correlation(singlet, first({0, 0, 1}), second({0, 0, 1})) + 1.0) < 1e-15);
  CHECK(std::abs(correlation(singlet, first({0, 0, 1}), second({1, 0, 0}))) < 1e-15);
  CHECK(std::abs(correlation(DensityMatrix::maximally_mixed(), first({0, 1, 0}),
                             second({1, 0, 0}))) < 1e-15);
  CHECK_THROWS_AS(correlation(singlet, first({0, 0, 1}), first({0, 0, 1})), UsageError);
  CHECK_THROWS_AS(double_prob(singlet, second({0, 0, 1}), second({0, 0, 1})), UsageError);
}

TEST_CASE("single and double probability examples") {
  const auto singlet = DensityMatrix::singlet();
  const auto ket00 = DensityMatrix::product_00();
  CHECK(std::abs(single_prob(singlet, first({0.6, 0, 0.8})) - 0.5) < 1e-15);
  CHECK(std::abs(single_prob(ket00, first({0, 0, 1})) - 1.0) < 1e-15);
  CHECK(std::abs(single_prob(ket00, first({1, 0, 0})) - 0.5) < 1e-15);

  CHECK(std::abs(double_prob(singlet, first({0, 0, 1}), second({0, 0, 1}))) < 1e-15);
  CHECK(std::abs(double_prob(DensityMatrix::maximally_mixed(), first({1, 0, 0}),
                             second({0, 1, 0})) - 0.25) < 1e-15);
  // Orthogonal settings on the singlet: (1 - nA.nB)/4 = 1/4.
  CHECK(std::abs(double_prob(singlet, first({0, 0, 1}), second({1, 0, 0})) - 0.25) < 1e-15);
  CHECK(std::abs(double_prob(singlet, first({0, 0, 1}), second({1, 0, 0})) -
                 oracle::joint(oracle::singlet(), {0, 0, 1}, {1, 0, 0})) < 1e-15);
}

TEST_CASE("experimental_probs examples") {
  SUBCASE("maximally mixed") {
    std::mt19937_64 rng(3);
    const auto p = experimental_probs(DensityMatrix::maximally_mixed(),
                                      oracle::random_directions(rng).settings());
    const auto v = oracle::as_array(p);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(v[i] - 0.5) < 1e-15);
    for (int i = 4; i < 8; ++i) CHECK(std::abs(v[i] - 0.25) < 1e-15);
  }
  SUBCASE("singlet at CHSH-optimal settings") {
    const auto p = oracle::as_array(
        experimental_probs(DensityMatrix::singlet(), oracle::chsh_optimal().settings()));
    const auto expected = oracle::probs(oracle::singlet(), oracle::chsh_optimal());
    const double lo = (2 - std::sqrt(2.0)) / 8;
    const double hi = (2 + std::sqrt(2.0)) / 8;
    CHECK(std::abs(lo - 0.0732233) < 1e-7);
    CHECK(std::abs(hi - 0.4267767) < 1e-7);
    const std::array<double, 8> frozen{0.5, 0.5, 0.5, 0.5, lo, lo, lo, hi};
    for (int i = 0; i < 8; ++i) {
      CAPTURE(i);
      CHECK(std::abs(expected[i] - frozen[i]) < 1e-15);
      CHECK(std::abs(p[i] - frozen[i]) < 1e-15);
    }
  }
  SUBCASE("|00> with every direction along z") {
    const auto p =
        oracle::as_array(experimental_probs(DensityMatrix::product_00(), oracle::all_z().settings()));
    for (double v : p) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("quantum invariants over random states and settings") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto ens = oracle::random_ensemble(rng);
    const auto dirs = oracle::random_directions(rng);
    const DensityMatrix rho = ens.density();
    const Observable a = first(dirs.a);
    const Observable b = second(dirs.b);

    const double e = correlation(rho, a, b);
    const double pa = single_prob(rho, a);
    const double pb = single_prob(rho, b);
    const double pab = double_prob(rho, a, b);
    CHECK(std::abs(e - (4 * pab - 2 * pa - 2 * pb + 1)) <= 1e-10);
    CHECK(std::abs(e - oracle::correlation(ens, dirs.a, dirs.b)) <= 1e-12);
    CHECK(std::abs(pab - oracle::joint(ens, dirs.a, dirs.b)) <= 1e-12);
    for (double p : {pa, pb, pab}) {
      CHECK(p >= -1e-10);
      CHECK(p <= 1 + 1e-10);
    }

    // Singlet: <AB> = -nA . nB.
    const double s = correlation(DensityMatrix::singlet(), a, b);
    CHECK(std::abs(s + a.direction.dot(b.direction)) <= 1e-10);

    // Quantum data always respects the Fréchet bounds.
    CHECK_NOTHROW(experimental_probs(rho, dirs.settings()));
  }
}
