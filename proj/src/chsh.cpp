#include "bellquad/chsh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bellquad {

namespace {

std::string describe(const ChshReport& r) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "Bell-CHSH inequalities violated: max CHSH value " << r.max_s() << ", margin "
      << r.margin;
  return msg.str();
}

}  // namespace

std::string variant_name(CVariant v) {
  const auto [swap_a, swap_b] = interchange_of(v);
  std::string name = swap_a ? "A'A" : "AA'";
  name += swap_b ? "B'B" : "BB'";
  return name;
}

double ChshReport::max_s() const noexcept {
  return *std::max_element(s_values.begin(), s_values.end());
}

ChshViolation::ChshViolation(ChshReport report)
    : Error(describe(report)), report_(std::move(report)) {}

double signed_chsh_combination(const CorrelationSet& corrs, CVariant v) noexcept {
  const auto [swap_a, swap_b] = interchange_of(v);
  const Setting x = swapped(Setting::unprimed, swap_a);
  const Setting xp = swapped(Setting::primed, swap_a);
  const Setting y = swapped(Setting::unprimed, swap_b);
  const Setting yp = swapped(Setting::primed, swap_b);
  return corrs.at(x, y) + corrs.at(x, yp) - corrs.at(xp, y) + corrs.at(xp, yp);
}

CorrelationFormResult chsh_correlation_form(const CorrelationSet& corrs, double tolerance) {
  CorrelationFormResult out;
  out.satisfied = true;
  for (CVariant v : kCVariants) {
    const double s = std::abs(signed_chsh_combination(corrs, v));
    out.values[static_cast<int>(v)] = s;
    if (s > 2 + tolerance) out.satisfied = false;
  }
  return out;
}

double c_function(const ExperimentalProbs& probs, CVariant v) noexcept {
  const auto [swap_a, swap_b] = interchange_of(v);
  const Setting x = swapped(Setting::unprimed, swap_a);
  const Setting xp = swapped(Setting::primed, swap_a);
  const Setting y = swapped(Setting::unprimed, swap_b);
  const Setting yp = swapped(Setting::primed, swap_b);
  return probs.single_a(x) + probs.single_b(yp) -
         (probs.joint(x, y) + probs.joint(x, yp) - probs.joint(xp, y) + probs.joint(xp, yp));
}

ChshReport chsh_probability_form(const ExperimentalProbs& probs, double tolerance) {
  ChshReport r;
  r.s_values = chsh_correlation_form(correlations_of(probs), tolerance).values;
  r.margin = INFINITY;
  for (CVariant v : kCVariants) {
    const double c = c_function(probs, v);
    r.c_values[static_cast<int>(v)] = c;
    r.margin = std::min({r.margin, c, 1 - c});
  }
  r.satisfied = r.margin >= -tolerance;
  r.boundary = r.satisfied && r.margin < tolerance;
  return r;
}

}  // namespace bellquad
