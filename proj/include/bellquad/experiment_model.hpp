#pragma once

#include <array>
#include <cstdint>

namespace bellquad {

inline constexpr double kInvariantTolerance = 1e-9;

/// Outcome of a dichotomic measurement. The enumerator value doubles as a bit
/// (plus = 0, minus = 1) for indexing outcome tables.
enum class Sign : std::uint8_t { plus = 0, minus = 1 };

inline constexpr std::array<Sign, 2> kSigns{Sign::plus, Sign::minus};

constexpr int bit(Sign s) noexcept { return static_cast<int>(s); }
constexpr Sign flip(Sign s) noexcept { return s == Sign::plus ? Sign::minus : Sign::plus; }
constexpr char to_char(Sign s) noexcept { return s == Sign::plus ? '+' : '-'; }

/// Which of the two analyser settings an observer used: A vs A', B vs B'.
enum class Setting : std::uint8_t { unprimed = 0, primed = 1 };

constexpr int index(Setting s) noexcept { return static_cast<int>(s); }
constexpr Setting swapped(Setting s, bool swap) noexcept {
  return swap ? (s == Setting::unprimed ? Setting::primed : Setting::unprimed) : s;
}

/// P(A), P(A'), P(B), P(B'): each the probability of reading +1.
struct Singles {
  double a = 0;
  double a_prime = 0;
  double b = 0;
  double b_prime = 0;
};

/// P(AB), P(AB'), P(A'B), P(A'B') with both observers reading +1.
struct Doubles {
  double ab = 0;
  double ab_prime = 0;
  double a_prime_b = 0;
  double a_prime_b_prime = 0;
};

/// The eight independent probabilities of the four EPR experiments.
/// Validated at construction: all values in [0,1] and every double inside
/// its Fréchet bounds max(0, P(X)+P(Y)-1) <= P(XY) <= min(P(X), P(Y)).
class ExperimentalProbs {
 public:
  ExperimentalProbs(const Singles& singles, const Doubles& doubles,
                    double tolerance = kInvariantTolerance);

  const Singles& singles() const noexcept { return s_; }
  const Doubles& doubles() const noexcept { return d_; }

  double single_a(Setting s) const noexcept { return s == Setting::unprimed ? s_.a : s_.a_prime; }
  double single_b(Setting s) const noexcept { return s == Setting::unprimed ? s_.b : s_.b_prime; }
  double joint(Setting a, Setting b) const noexcept;

 private:
  Singles s_;
  Doubles d_;
};

/// The seven probabilities measured when the (A', B') experiment is not
/// performed. Same validation as ExperimentalProbs for the three pairs present.
class ThreeExperimentProbs {
 public:
  ThreeExperimentProbs(const Singles& singles, double ab, double ab_prime, double a_prime_b,
                       double tolerance = kInvariantTolerance);

  const Singles& singles() const noexcept { return s_; }
  double ab() const noexcept { return ab_; }
  double ab_prime() const noexcept { return ab_prime_; }
  double a_prime_b() const noexcept { return a_prime_b_; }

  /// Completes the record with a chosen P(A'B').
  ExperimentalProbs with_a_prime_b_prime(double value,
                                         double tolerance = kInvariantTolerance) const;

 private:
  Singles s_;
  double ab_;
  double ab_prime_;
  double a_prime_b_;
};

/// Four outcome probabilities of one experiment, indexed by (x, y).
struct PairOutcomeTable {
  std::array<double, 4> p{};  // (+,+), (+,-), (-,+), (-,-)

  double at(Sign x, Sign y) const noexcept { return p[2 * bit(x) + bit(y)]; }
  double sum() const noexcept { return p[0] + p[1] + p[2] + p[3]; }
};

struct CorrelationSet {
  double ab = 0;
  double ab_prime = 0;
  double a_prime_b = 0;
  double a_prime_b_prime = 0;

  double at(Setting a, Setting b) const noexcept;
};

/// Sum rules: {P(XY), P(X)-P(XY), P(Y)-P(XY), 1-P(X)-P(Y)+P(XY)}.
/// Throws InconsistencyError if an entry is below -tolerance.
PairOutcomeTable expand_pair(double p_x, double p_y, double p_xy,
                             double tolerance = kInvariantTolerance);

PairOutcomeTable pair_table(const ExperimentalProbs& probs, Setting a, Setting b);

/// <XY> = 4 P(XY) - 2 P(X) - 2 P(Y) + 1.
double correlation_from_probs(double p_x, double p_y, double p_xy) noexcept;

CorrelationSet correlations_of(const ExperimentalProbs& probs);

/// Inverse of correlations_of given the four singles. Throws
/// InconsistencyError if a resulting double violates its Fréchet bounds.
ExperimentalProbs probs_from_correlations(const Singles& singles, const CorrelationSet& corrs,
                                          double tolerance = kInvariantTolerance);

}  // namespace bellquad
