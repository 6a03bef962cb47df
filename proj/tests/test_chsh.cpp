#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bellquad/chsh.hpp"
#include "bellquad/quantum_model.hpp"
#include "support/oracles.hpp"

using namespace bellquad;

namespace {

// The four C combinations written out by hand, one formula each.
std::array<double, 4> c_by_substitution(const std::array<double, 8>& p) {
  const double A = p[0], Ap = p[1], B = p[2], Bp = p[3];
  const double AB = p[4], ABp = p[5], ApB = p[6], ApBp = p[7];
  return {A + Bp - (AB + ABp - ApB + ApBp), Ap + Bp - (ApB + ApBp - AB + ABp),
          A + B - (ABp + AB - ApBp + ApB), Ap + B - (ApBp + ApB - ABp + AB)};
}

}  // namespace

TEST_CASE("variant names follow the interchange table") {
  CHECK(variant_name(CVariant::aa_bb) == "AA'BB'");
  CHECK(variant_name(CVariant::a_abb) == "A'ABB'");
  CHECK(variant_name(CVariant::aa_b_b) == "AA'B'B");
  CHECK(variant_name(CVariant::a_ab_b) == "A'AB'B");
}

TEST_CASE("chsh_correlation_form examples") {
  const auto zero = chsh_correlation_form({0, 0, 0, 0});
  CHECK(zero.satisfied);
  for (double v : zero.values) CHECK(v == 0.0);

  const double r = std::sqrt(2.0) / 2;
  const auto tsirelson = chsh_correlation_form({-r, -r, -r, r});
  CHECK_FALSE(tsirelson.satisfied);
  const double max = *std::max_element(tsirelson.values.begin(), tsirelson.values.end());
  CHECK(std::abs(max - 2 * std::sqrt(2.0)) < 1e-15);
  CHECK(std::abs(max - 2.8284271) < 1e-7);

  const auto product = chsh_correlation_form({1, 1, 1, 1});
  CHECK(product.satisfied);
  CHECK(*std::max_element(product.values.begin(), product.values.end()) == 2.0);
}

TEST_CASE("c_function examples") {
  const auto uniform = oracle::uniform_probs();
  for (CVariant v : kCVariants) CHECK(c_function(uniform, v) == 0.5);

  const auto singlet = oracle::singlet_optimal_probs();
  const auto frozen = c_by_substitution(oracle::as_array(singlet));
  for (CVariant v : kCVariants)
    CHECK(std::abs(c_function(singlet, v) - frozen[static_cast<int>(v)]) < 1e-15);
  // Only C(AA'B'B) leaves [0,1]: (1 + sqrt2)/2.
  CHECK(std::abs(c_function(singlet, CVariant::aa_b_b) - (1 + std::sqrt(2.0)) / 2) < 1e-15);

  // Equal doubles and equal singles make the A <-> A' interchange a symmetry.
  const auto sym = oracle::to_probs({0.4, 0.4, 0.6, 0.7, 0.3, 0.35, 0.3, 0.35});
  CHECK(c_function(sym, CVariant::aa_bb) == doctest::Approx(c_function(sym, CVariant::a_abb)));
}

TEST_CASE("chsh_probability_form examples") {
  const auto uniform = chsh_probability_form(oracle::uniform_probs());
  CHECK(uniform.satisfied);
  CHECK_FALSE(uniform.boundary);
  for (double c : uniform.c_values) {
    CHECK(c > 0);
    CHECK(c < 1);
  }
  CHECK(uniform.margin == 0.5);

  const auto singlet = chsh_probability_form(oracle::singlet_optimal_probs());
  CHECK_FALSE(singlet.satisfied);
  CHECK(std::abs(singlet.max_s() - 2 * std::sqrt(2.0)) < 1e-14);
  CHECK(singlet.upper_slack(CVariant::aa_b_b) < 0);

  const auto det = chsh_probability_form(experimental_probs(DensityMatrix::product_00(),
                                                            oracle::all_z().settings()));
  CHECK(det.satisfied);
  CHECK(det.boundary);
  CHECK(det.margin == doctest::Approx(0).scale(1e-12));
}

TEST_CASE("probability and correlation forms agree on random Fréchet data") {
  std::mt19937_64 rng(7);
  int violated = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const auto raw = oracle::random_frechet(rng);
    const auto probs = oracle::to_probs(raw);
    const auto report = chsh_probability_form(probs);
    const auto corr = chsh_correlation_form(correlations_of(probs));
    REQUIRE(report.satisfied == corr.satisfied);
    violated += report.satisfied ? 0 : 1;

    const auto frozen = c_by_substitution(raw);
    const auto corrs = correlations_of(probs);
    for (CVariant v : kCVariants) {
      const int i = static_cast<int>(v);
      CHECK(std::abs(report.c_values[i] - frozen[i]) <= 1e-12);
      // 2(2C - 1) = -(<XY> + <XY'> - <X'Y> + <X'Y'>).
      CHECK(std::abs(2 * (2 * report.c_values[i] - 1) + signed_chsh_combination(corrs, v)) <= 1e-12);
    }
  }
  // The sample must exercise both outcomes to mean anything.
  CHECK(violated > 1000);
  CHECK(violated < 99000);
}

TEST_CASE("quantum CHSH values never exceed the Tsirelson bound") {
  std::mt19937_64 rng(1234);
  double largest = 0;
  for (int trial = 0; trial < 5000; ++trial) {
    const auto ens = oracle::random_ensemble(rng);
    const auto probs = experimental_probs(ens.density(), oracle::random_directions(rng).settings());
    const auto r = chsh_probability_form(probs);
    CHECK(r.max_s() <= 2 * std::sqrt(2.0) + 1e-9);
    largest = std::max(largest, r.max_s());
  }
  CHECK(largest > 2.0);
}
