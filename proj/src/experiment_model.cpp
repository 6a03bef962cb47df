#include "bellquad/experiment_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "bellquad/errors.hpp"

namespace bellquad {

namespace {

void require_probability(double value, const char* name, double tolerance) {
  if (!std::isfinite(value) || value < -tolerance || value > 1 + tolerance) {
    std::ostringstream msg;
    msg << name << " = " << value << " is not a probability";
    throw ValidationError(msg.str());
  }
}

void require_frechet(double p_x, double p_y, double p_xy, const char* pair, double tolerance) {
  const double lower = std::max(0.0, p_x + p_y - 1);
  const double upper = std::min(p_x, p_y);
  if (p_xy < lower - tolerance || p_xy > upper + tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "P(" << pair << ") = " << p_xy << " violates the Fréchet bounds [" << lower << ", "
        << upper << "]";
    throw InconsistencyError(msg.str());
  }
}

void require_singles(const Singles& s, double tolerance) {
  require_probability(s.a, "P(A)", tolerance);
  require_probability(s.a_prime, "P(A')", tolerance);
  require_probability(s.b, "P(B)", tolerance);
  require_probability(s.b_prime, "P(B')", tolerance);
}

}  // namespace

ExperimentalProbs::ExperimentalProbs(const Singles& singles, const Doubles& doubles,
                                     double tolerance)
    : s_(singles), d_(doubles) {
  require_singles(s_, tolerance);
  require_probability(d_.ab, "P(AB)", tolerance);
  require_probability(d_.ab_prime, "P(AB')", tolerance);
  require_probability(d_.a_prime_b, "P(A'B)", tolerance);
  require_probability(d_.a_prime_b_prime, "P(A'B')", tolerance);
  require_frechet(s_.a, s_.b, d_.ab, "AB", tolerance);
  require_frechet(s_.a, s_.b_prime, d_.ab_prime, "AB'", tolerance);
  require_frechet(s_.a_prime, s_.b, d_.a_prime_b, "A'B", tolerance);
  require_frechet(s_.a_prime, s_.b_prime, d_.a_prime_b_prime, "A'B'", tolerance);
}

double ExperimentalProbs::joint(Setting a, Setting b) const noexcept {
  if (a == Setting::unprimed) return b == Setting::unprimed ? d_.ab : d_.ab_prime;
  return b == Setting::unprimed ? d_.a_prime_b : d_.a_prime_b_prime;
}

ThreeExperimentProbs::ThreeExperimentProbs(const Singles& singles, double ab, double ab_prime,
                                           double a_prime_b, double tolerance)
    : s_(singles), ab_(ab), ab_prime_(ab_prime), a_prime_b_(a_prime_b) {
  require_singles(s_, tolerance);
  require_probability(ab_, "P(AB)", tolerance);
  require_probability(ab_prime_, "P(AB')", tolerance);
  require_probability(a_prime_b_, "P(A'B)", tolerance);
  require_frechet(s_.a, s_.b, ab_, "AB", tolerance);
  require_frechet(s_.a, s_.b_prime, ab_prime_, "AB'", tolerance);
  require_frechet(s_.a_prime, s_.b, a_prime_b_, "A'B", tolerance);
}

ExperimentalProbs ThreeExperimentProbs::with_a_prime_b_prime(double value,
                                                             double tolerance) const {
  return ExperimentalProbs(s_, Doubles{ab_, ab_prime_, a_prime_b_, value}, tolerance);
}

double CorrelationSet::at(Setting a, Setting b) const noexcept {
  if (a == Setting::unprimed) return b == Setting::unprimed ? ab : ab_prime;
  return b == Setting::unprimed ? a_prime_b : a_prime_b_prime;
}

PairOutcomeTable expand_pair(double p_x, double p_y, double p_xy, double tolerance) {
  PairOutcomeTable t;
  t.p = {p_xy, p_x - p_xy, p_y - p_xy, 1 - p_x - p_y + p_xy};
  static constexpr const char* kViolated[] = {
      "P(XY) >= 0", "P(XY) <= P(X)", "P(XY) <= P(Y)", "P(XY) >= P(X) + P(Y) - 1"};
  for (int i = 0; i < 4; ++i) {
    if (t.p[i] < -tolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "pair outcome table has negative entry " << t.p[i] << ": Fréchet bound "
          << kViolated[i] << " violated";
      throw InconsistencyError(msg.str());
    }
  }
  return t;
}

PairOutcomeTable pair_table(const ExperimentalProbs& probs, Setting a, Setting b) {
  return expand_pair(probs.single_a(a), probs.single_b(b), probs.joint(a, b));
}

double correlation_from_probs(double p_x, double p_y, double p_xy) noexcept {
  return 4 * p_xy - 2 * p_x - 2 * p_y + 1;
}

CorrelationSet correlations_of(const ExperimentalProbs& probs) {
  const auto& s = probs.singles();
  const auto& d = probs.doubles();
  return {correlation_from_probs(s.a, s.b, d.ab), correlation_from_probs(s.a, s.b_prime, d.ab_prime),
          correlation_from_probs(s.a_prime, s.b, d.a_prime_b),
          correlation_from_probs(s.a_prime, s.b_prime, d.a_prime_b_prime)};
}

ExperimentalProbs probs_from_correlations(const Singles& singles, const CorrelationSet& corrs,
                                          double tolerance) {
  auto inverse = [](double e, double p_x, double p_y) { return (e + 2 * p_x + 2 * p_y - 1) / 4; };
  const Doubles d{inverse(corrs.ab, singles.a, singles.b),
                  inverse(corrs.ab_prime, singles.a, singles.b_prime),
                  inverse(corrs.a_prime_b, singles.a_prime, singles.b),
                  inverse(corrs.a_prime_b_prime, singles.a_prime, singles.b_prime)};
  require_singles(singles, tolerance);
  require_frechet(singles.a, singles.b, d.ab, "AB", tolerance);
  require_frechet(singles.a, singles.b_prime, d.ab_prime, "AB'", tolerance);
  require_frechet(singles.a_prime, singles.b, d.a_prime_b, "A'B", tolerance);
  require_frechet(singles.a_prime, singles.b_prime, d.a_prime_b_prime, "A'B'", tolerance);
  return ExperimentalProbs(singles, d, tolerance);
}

}  // namespace bellquad
