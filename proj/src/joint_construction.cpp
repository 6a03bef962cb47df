#include "bellquad/joint_construction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bellquad/errors.hpp"

namespace bellquad {

namespace {

// Marginals of the experimental data seen from one A-side setting s:
// P(a.+.), P(a..+) and P(a...) where the first slot is A (s = unprimed) or A'.
struct SideMarginals {
  PairOutcomeTable with_b;
  PairOutcomeTable with_b_prime;
  double single;

  SideMarginals(const ExperimentalProbs& probs, Setting s)
      : with_b(pair_table(probs, s, Setting::unprimed)),
        with_b_prime(pair_table(probs, s, Setting::primed)),
        single(probs.single_a(s)) {}

  double plus_dot(Sign a) const { return with_b.at(a, Sign::plus); }
  double dot_plus(Sign a) const { return with_b_prime.at(a, Sign::plus); }
  double dot_dot(Sign a) const { return a == Sign::plus ? single : 1 - single; }
};

// Lower bounds above upper bounds by at most `slack` collapse to the midpoint.
template <class OnEmpty>
Interval checked(double lo, double hi, double slack, OnEmpty on_empty) {
  if (!(lo <= hi + slack)) on_empty(lo, hi);
  if (lo > hi) lo = hi = (lo + hi) / 2;
  return {lo, hi};
}

[[noreturn]] void internal_empty(const char* what, double lo, double hi) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "empty interval for " << what << ": [" << lo << ", " << hi << "]";
  throw InternalError(msg.str());
}

// Bounds keeping P(a.+-), P(a.-+), P(a.--) >= 0 (and likewise for a').
Interval single_side_bounds(const SideMarginals& m, Sign a) {
  return {std::max(0.0, m.plus_dot(a) + m.dot_plus(a) - m.dot_dot(a)),
          std::min(m.plus_dot(a), m.dot_plus(a))};
}

// The P(..++) range implied by one side's inequalities, written out term by
// term; the consistency condition between the two sides is then checked by
// intersecting the two ranges.
Interval dotdot_bounds(const ExperimentalProbs& probs, Setting s) {
  const SideMarginals m(probs, s);
  const double p_b = probs.single_b(Setting::unprimed);
  const double p_bp = probs.single_b(Setting::primed);
  const double total = 1;
  const double lo = std::max({0.0, p_b + p_bp - total,
                              m.plus_dot(Sign::plus) + m.dot_plus(Sign::plus) - m.dot_dot(Sign::plus),
                              m.plus_dot(Sign::minus) + m.dot_plus(Sign::minus) - m.dot_dot(Sign::minus)});
  const double hi = std::min({p_b, p_bp, m.plus_dot(Sign::plus) + m.dot_plus(Sign::minus),
                              m.dot_plus(Sign::plus) + m.plus_dot(Sign::minus)});
  return {lo, hi};
}

Interval side_plusplus(const ExperimentalProbs& probs, Setting s, Sign a, double p_dotdot,
                       const ConstructionOptions& opt, const char* what) {
  const SideMarginals m(probs, s);
  const Interval own = single_side_bounds(m, a);
  const Interval other = single_side_bounds(m, flip(a));
  // P(-a.++) = p_dotdot - P(a.++) must lie in `other`.
  const double lo = std::max(own.lo, p_dotdot - other.hi);
  const double hi = std::min(own.hi, p_dotdot - other.lo);
  return checked(lo, hi, opt.slack, [&](double l, double h) { internal_empty(what, l, h); });
}

// The four P(x.bb') of one side from P(x.++).
void fill_side(const SideMarginals& m, Sign x, double p_pp, std::array<double, 8>& out) {
  out[TripleProbs::index(x, Sign::plus, Sign::plus)] = p_pp;
  out[TripleProbs::index(x, Sign::plus, Sign::minus)] = m.plus_dot(x) - p_pp;
  out[TripleProbs::index(x, Sign::minus, Sign::plus)] = m.dot_plus(x) - p_pp;
  out[TripleProbs::index(x, Sign::minus, Sign::minus)] =
      m.dot_dot(x) + p_pp - m.plus_dot(x) - m.dot_plus(x);
}

void require_nonnegative(const std::array<double, 8>& v, double tolerance, const char* what) {
  for (double x : v) {
    if (!(x >= -tolerance)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << what << " triple probability " << x << " is negative";
      throw InternalError(msg.str());
    }
  }
}

constexpr std::array<std::array<Sign, 2>, 4> kBbOrder{{{Sign::plus, Sign::plus},
                                                       {Sign::plus, Sign::minus},
                                                       {Sign::minus, Sign::plus},
                                                       {Sign::minus, Sign::minus}}};

void require_unit(double t, const char* name) {
  if (!(t >= 0 && t <= 1)) {
    std::ostringstream msg;
    msg << "parameter " << name << " = " << t << " outside [0, 1]";
    throw ValidationError(msg.str());
  }
}

}  // namespace

double Interval::position_of(double value) const noexcept {
  const double w = width();
  if (!(w > 0)) return 0;
  return std::clamp((value - lo) / w, 0.0, 1.0);
}

void FamilyParams::validate() const {
  require_unit(t_dotdot, "t.dotdot");
  require_unit(t_a_plus, "t.a_plus");
  require_unit(t_a_prime_plus, "t.aprime_plus");
  for (double t : t_bb) require_unit(t, "t.bb");
  if (t_a_prime_b_prime) require_unit(*t_a_prime_b_prime, "t.aprime_bprime");
}

Interval interval_p_dotdot(const ExperimentalProbs& probs, const ConstructionOptions& opt) {
  const Interval from_a = dotdot_bounds(probs, Setting::unprimed);
  const Interval from_a_prime = dotdot_bounds(probs, Setting::primed);
  return checked(std::max(from_a.lo, from_a_prime.lo), std::min(from_a.hi, from_a_prime.hi),
                 opt.slack, [&](double, double) {
                   throw ChshViolation(chsh_probability_form(probs, opt.slack));
                 });
}

Interval interval_p_a_plusplus(const ExperimentalProbs& probs, Sign a, double p_dotdot,
                               const ConstructionOptions& opt) {
  return side_plusplus(probs, Setting::unprimed, a, p_dotdot, opt, "P(a.++)");
}

Interval interval_p_aprime_plusplus(const ExperimentalProbs& probs, Sign a_prime,
                                    double p_dotdot, const ConstructionOptions& opt) {
  return side_plusplus(probs, Setting::primed, a_prime, p_dotdot, opt, "P(.a'++)");
}

TripleProbs step1_triples(const ExperimentalProbs& probs, double p_a_pp, double p_ap_pp,
                          double p_dotdot, const ConstructionOptions& opt) {
  const SideMarginals a_side(probs, Setting::unprimed);
  const SideMarginals a_prime_side(probs, Setting::primed);
  TripleProbs t;
  fill_side(a_side, Sign::plus, p_a_pp, t.a_dot);
  fill_side(a_side, Sign::minus, p_dotdot - p_a_pp, t.a_dot);
  fill_side(a_prime_side, Sign::plus, p_ap_pp, t.dot_a_prime);
  fill_side(a_prime_side, Sign::minus, p_dotdot - p_ap_pp, t.dot_a_prime);
  require_nonnegative(t.a_dot, opt.positivity_tolerance, "P(a.bb')");
  require_nonnegative(t.dot_a_prime, opt.positivity_tolerance, "P(.a'bb')");
  return t;
}

Interval interval_p_pp_bb(const TripleProbs& triples, Sign b, Sign b_prime,
                          const ConstructionOptions& opt) {
  const double plus_dot = triples.p_a_dot(Sign::plus, b, b_prime);
  const double dot_plus = triples.p_dot_a_prime(Sign::plus, b, b_prime);
  const double lo = std::max(0.0, plus_dot + dot_plus - triples.p_dot_dot(b, b_prime));
  const double hi = std::min(plus_dot, dot_plus);
  return checked(lo, hi, opt.slack, [](double l, double h) { internal_empty("P(++bb')", l, h); });
}

QuadDistribution step2_quadruple(const TripleProbs& triples, const std::array<double, 4>& p_pp_bb,
                                 const ConstructionOptions& opt) {
  QuadDistribution::Entries q{};
  for (int k = 0; k < 4; ++k) {
    const auto [b, bp] = kBbOrder[k];
    const double pp = p_pp_bb[k];
    const double plus_dot = triples.p_a_dot(Sign::plus, b, bp);
    const double dot_plus = triples.p_dot_a_prime(Sign::plus, b, bp);
    q[QuadDistribution::index(Sign::plus, Sign::plus, b, bp)] = pp;
    q[QuadDistribution::index(Sign::plus, Sign::minus, b, bp)] = plus_dot - pp;
    q[QuadDistribution::index(Sign::minus, Sign::plus, b, bp)] = dot_plus - pp;
    q[QuadDistribution::index(Sign::minus, Sign::minus, b, bp)] =
        triples.p_dot_dot(b, bp) - dot_plus - plus_dot + pp;
  }
  return QuadDistribution::clamped(q, opt.positivity_tolerance);
}

Construction construct_4exp(const ExperimentalProbs& probs, const FamilyParams& params,
                            const ConstructionOptions& opt) {
  params.validate();
  const Interval dotdot = interval_p_dotdot(probs, opt);
  const double p_dotdot = dotdot.at(params.t_dotdot);
  const Interval a_plus = interval_p_a_plusplus(probs, Sign::plus, p_dotdot, opt);
  const double p_a_plus = a_plus.at(params.t_a_plus);
  const Interval a_prime_plus = interval_p_aprime_plusplus(probs, Sign::plus, p_dotdot, opt);
  const double p_a_prime_plus = a_prime_plus.at(params.t_a_prime_plus);
  const TripleProbs triples = step1_triples(probs, p_a_plus, p_a_prime_plus, p_dotdot, opt);

  std::array<Interval, 4> pp_bb;
  std::array<double, 4> p_pp_bb{};
  for (int k = 0; k < 4; ++k) {
    pp_bb[k] = interval_p_pp_bb(triples, kBbOrder[k][0], kBbOrder[k][1], opt);
    p_pp_bb[k] = pp_bb[k].at(params.t_bb[k]);
  }
  return Construction{step2_quadruple(triples, p_pp_bb, opt),
                      dotdot,
                      p_dotdot,
                      a_plus,
                      p_a_plus,
                      a_prime_plus,
                      p_a_prime_plus,
                      triples,
                      pp_bb,
                      p_pp_bb};
}

Interval interval_p_aprime_bprime(const ThreeExperimentProbs& probs,
                                  const ConstructionOptions& opt) {
  const Singles& s = probs.singles();
  const double e_ab = correlation_from_probs(s.a, s.b, probs.ab());
  const double e_abp = correlation_from_probs(s.a, s.b_prime, probs.ab_prime());
  const double e_apb = correlation_from_probs(s.a_prime, s.b, probs.a_prime_b());

  // |<A'B> - u| <= 2 - |<AB> + <AB'>| and |<A'B> + u| <= 2 - |<AB> - <AB'>|, u = <A'B'>.
  const double r_sum = 2 - std::abs(e_ab + e_abp);
  const double r_diff = 2 - std::abs(e_ab - e_abp);
  const double u_lo = std::max(e_apb - r_sum, -e_apb - r_diff);
  const double u_hi = std::min(e_apb + r_sum, -e_apb + r_diff);

  // u = 4 P(A'B') - 2 P(A') - 2 P(B') + 1.
  auto to_prob = [&](double u) { return (u + 2 * s.a_prime + 2 * s.b_prime - 1) / 4; };
  const double lo = std::max({to_prob(u_lo), 0.0, s.a_prime + s.b_prime - 1});
  const double hi = std::min({to_prob(u_hi), s.a_prime, s.b_prime});
  return checked(lo, hi, opt.slack, [](double l, double h) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "no admissible P(A'B'): CHSH range and Fréchet bounds do not intersect ([" << l
        << ", " << h << "])";
    throw InconsistencyError(msg.str());
  });
}

ThreeExperimentConstruction construct_3exp(const ThreeExperimentProbs& probs,
                                           const FamilyParams& params,
                                           const ConstructionOptions& opt) {
  params.validate();
  const Interval range = interval_p_aprime_bprime(probs, opt);
  const double chosen = range.at(params.t_a_prime_b_prime.value_or(0.5));
  ExperimentalProbs completed = probs.with_a_prime_b_prime(chosen);
  Construction c = construct_4exp(completed, params, opt);
  return {range, chosen, completed, std::move(c)};
}

FamilyParams recover_params(const ExperimentalProbs& probs, const QuadDistribution& target,
                            const ConstructionOptions& opt) {
  FamilyParams t;
  const Interval dotdot = interval_p_dotdot(probs, opt);
  const double p_dotdot = target.marginal("..++");
  t.t_dotdot = dotdot.position_of(p_dotdot);
  // Continue from the value construct_4exp will actually use.
  const double used_dotdot = dotdot.at(t.t_dotdot);

  const Interval a_plus = interval_p_a_plusplus(probs, Sign::plus, used_dotdot, opt);
  t.t_a_plus = a_plus.position_of(target.marginal("+.++"));
  const Interval a_prime_plus = interval_p_aprime_plusplus(probs, Sign::plus, used_dotdot, opt);
  t.t_a_prime_plus = a_prime_plus.position_of(target.marginal(".+++"));

  const TripleProbs triples = step1_triples(probs, a_plus.at(t.t_a_plus),
                                            a_prime_plus.at(t.t_a_prime_plus), used_dotdot, opt);
  for (int k = 0; k < 4; ++k) {
    const auto [b, bp] = kBbOrder[k];
    const Interval range = interval_p_pp_bb(triples, b, bp, opt);
    t.t_bb[k] = range.position_of(target.at(Sign::plus, Sign::plus, b, bp));
  }
  return t;
}

FamilyParams recover_params_3exp(const ThreeExperimentProbs& probs,
                                 const QuadDistribution& target,
                                 const ConstructionOptions& opt) {
  const Interval range = interval_p_aprime_bprime(probs, opt);
  const double t_apbp = range.position_of(target.marginal(".+.+"));
  FamilyParams t = recover_params(probs.with_a_prime_b_prime(range.at(t_apbp)), target, opt);
  t.t_a_prime_b_prime = t_apbp;
  return t;
}

ExperimentalProbs marginal_probs(const QuadDistribution& q) {
  return ExperimentalProbs(
      Singles{q.marginal("+..."), q.marginal(".+.."), q.marginal("..+."), q.marginal("...+")},
      Doubles{q.marginal("+.+."), q.marginal("+..+"), q.marginal(".++."), q.marginal(".+.+")});
}

}  // namespace bellquad
