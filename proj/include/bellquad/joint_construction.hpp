#pragma once

#include <array>
#include <optional>

#include "bellquad/chsh.hpp"
#include "bellquad/experiment_model.hpp"
#include "bellquad/quad_distribution.hpp"

namespace bellquad {

/// Slack added to upper bounds (and subtracted from lower bounds) before an
/// emptiness test.
inline constexpr double kIntervalSlack = 1e-12;

/// Closed interval [lo, hi] of admissible values for one free parameter.
struct Interval {
  double lo = 0;
  double hi = 0;

  double width() const noexcept { return hi - lo; }
  /// Affine map of t in [0,1] onto the interval.
  double at(double t) const noexcept { return lo + t * (hi - lo); }
  /// Inverse of at(), clamped to [0,1]; 0 for a degenerate interval.
  double position_of(double value) const noexcept;
  bool contains(double value, double tolerance = 0) const noexcept {
    return value >= lo - tolerance && value <= hi + tolerance;
  }
};

/// Positions of the free parameters inside their (conditional) feasible
/// intervals. 0.5 everywhere selects interval midpoints.
struct FamilyParams {
  double t_dotdot = 0.5;       // P(..++)
  double t_a_plus = 0.5;       // P(+.++)
  double t_a_prime_plus = 0.5; // P(.+++)
  std::array<double, 4> t_bb{0.5, 0.5, 0.5, 0.5};  // P(++bb'), (b,b') in ++, +-, -+, --
  std::optional<double> t_a_prime_b_prime;         // P(A'B'), three-experiment mode only

  /// Throws ValidationError if any component lies outside [0,1].
  void validate() const;
};

/// The triple probabilities P(a.bb') and P(.a'bb'), each indexed by
/// 4*[first=-] + 2*[b=-] + [b'=-].
struct TripleProbs {
  std::array<double, 8> a_dot{};
  std::array<double, 8> dot_a_prime{};

  static constexpr int index(Sign first, Sign b, Sign b_prime) noexcept {
    return 4 * bit(first) + 2 * bit(b) + bit(b_prime);
  }
  double p_a_dot(Sign a, Sign b, Sign b_prime) const noexcept {
    return a_dot[index(a, b, b_prime)];
  }
  double p_dot_a_prime(Sign a_prime, Sign b, Sign b_prime) const noexcept {
    return dot_a_prime[index(a_prime, b, b_prime)];
  }
  /// P(..bb') = sum_a P(a.bb').
  double p_dot_dot(Sign b, Sign b_prime) const noexcept {
    return p_a_dot(Sign::plus, b, b_prime) + p_a_dot(Sign::minus, b, b_prime);
  }
};

/// `slack` is also the CHSH decision tolerance of the construction: the
/// P(..++) interval is empty by more than `slack` exactly when some C leaves
/// [0,1] by more than `slack`.
struct ConstructionOptions {
  double slack = kIntervalSlack;
  double positivity_tolerance = kPositivityTolerance;
};

/// Feasible range of P(..++): intersection of the bounds implied by the
/// P(a.++) inequalities and by the P(.a'++) inequalities. Throws ChshViolation
/// if the intersection is empty.
Interval interval_p_dotdot(const ExperimentalProbs& probs, const ConstructionOptions& opt = {});

/// Range of P(a.++) given P(..++) = p_dotdot, such that both P(a.++) and
/// P(-a.++) = p_dotdot - P(a.++) keep the four P(a.bb') nonnegative.
Interval interval_p_a_plusplus(const ExperimentalProbs& probs, Sign a, double p_dotdot,
                               const ConstructionOptions& opt = {});

/// Same as interval_p_a_plusplus for P(.a'++).
Interval interval_p_aprime_plusplus(const ExperimentalProbs& probs, Sign a_prime, double p_dotdot,
                                    const ConstructionOptions& opt = {});

/// Step 1: all sixteen triples from P(+.++), P(.+++) and their common sum
/// P(..++).
TripleProbs step1_triples(const ExperimentalProbs& probs, double p_a_pp, double p_ap_pp,
                          double p_dotdot, const ConstructionOptions& opt = {});

/// Range of P(++bb') keeping P(+-bb'), P(-+bb'), P(--bb') nonnegative.
Interval interval_p_pp_bb(const TripleProbs& triples, Sign b, Sign b_prime,
                          const ConstructionOptions& opt = {});

/// Step 2: the quadruple distribution from the triples and the four P(++bb')
/// (ordered ++, +-, -+, --).
QuadDistribution step2_quadruple(const TripleProbs& triples, const std::array<double, 4>& p_pp_bb,
                                 const ConstructionOptions& opt = {});

/// A constructed distribution together with every interval and chosen value.
struct Construction {
  QuadDistribution distribution;
  Interval dotdot;
  double p_dotdot;
  Interval a_plus;
  double p_a_plus;
  Interval a_prime_plus;
  double p_a_prime_plus;
  TripleProbs triples;
  std::array<Interval, 4> pp_bb;
  std::array<double, 4> p_pp_bb;
};

struct ThreeExperimentConstruction {
  Interval a_prime_b_prime;
  double p_a_prime_b_prime;
  ExperimentalProbs completed;
  Construction construction;
};

/// Joint distribution reproducing all four experiments. Throws ChshViolation
/// when none exists.
Construction construct_4exp(const ExperimentalProbs& probs, const FamilyParams& params = {},
                            const ConstructionOptions& opt = {});

/// Admissible values of the unmeasured P(A'B'): both CHSH pairs
///   |<AB> + <AB'>| + |<A'B> - <A'B'>| <= 2,
///   |<AB> - <AB'>| + |<A'B> + <A'B'>| <= 2,
/// intersected with the Fréchet bounds of (A', B'). Throws InconsistencyError
/// if empty.
Interval interval_p_aprime_bprime(const ThreeExperimentProbs& probs,
                                  const ConstructionOptions& opt = {});

/// Joint distribution reproducing the (A,B), (A,B') and (A',B) experiments.
/// Uses params.t_a_prime_b_prime (default 0.5) to choose P(A'B').
ThreeExperimentConstruction construct_3exp(const ThreeExperimentProbs& probs,
                                           const FamilyParams& params = {},
                                           const ConstructionOptions& opt = {});

/// Parameters that make construct_4exp reproduce `target`, recovered by
/// inverting each affine map. `target` must reproduce `probs`.
FamilyParams recover_params(const ExperimentalProbs& probs, const QuadDistribution& target,
                            const ConstructionOptions& opt = {});

/// Three-experiment counterpart of recover_params; also recovers
/// t_a_prime_b_prime from the target's P(.+.+) marginal.
FamilyParams recover_params_3exp(const ThreeExperimentProbs& probs,
                                 const QuadDistribution& target,
                                 const ConstructionOptions& opt = {});

/// The eight experimental probabilities read off a quadruple distribution.
ExperimentalProbs marginal_probs(const QuadDistribution& q);

}  // namespace bellquad
