#include "bellquad/quad_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bellquad/errors.hpp"

namespace bellquad {

namespace {

double total(const QuadDistribution::Entries& p) {
  return std::accumulate(p.begin(), p.end(), 0.0);
}

}  // namespace

QuadDistribution::QuadDistribution(const Entries& p, double positivity_tolerance,
                                   double normalization_tolerance)
    : p_(p) {
  for (int i = 0; i < 16; ++i) {
    if (!std::isfinite(p_[i]) || p_[i] < -positivity_tolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "quadruple probability P(" << label(i) << ") = " << p_[i] << " is negative";
      throw ValidationError(msg.str());
    }
  }
  const double sum = total(p_);
  if (std::abs(sum - 1) > normalization_tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "quadruple probabilities sum to " << sum << ", expected 1";
    throw ValidationError(msg.str());
  }
}

QuadDistribution QuadDistribution::clamped(Entries p, double clamp_tolerance) {
  bool changed = false;
  for (int i = 0; i < 16; ++i) {
    if (p[i] < -clamp_tolerance || !std::isfinite(p[i])) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "constructed P(" << label(i) << ") = " << p[i] << " is negative";
      throw InternalError(msg.str());
    }
    if (p[i] < 0) {
      p[i] = 0;
      changed = true;
    }
  }
  const double sum = total(p);
  // Clamping itself adds up to 16 * clamp_tolerance of mass.
  if (std::abs(sum - 1) > kNormalizationTolerance + 16 * clamp_tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "constructed distribution sums to " << sum;
    throw InternalError(msg.str());
  }
  if (changed)
    for (double& v : p) v /= sum;
  return QuadDistribution(p);
}

std::string QuadDistribution::label(int index) {
  std::string s(4, '+');
  for (int k = 0; k < 4; ++k)
    if (index & (8 >> k)) s[k] = '-';
  return s;
}

double QuadDistribution::min_entry() const noexcept {
  return *std::min_element(p_.begin(), p_.end());
}

double QuadDistribution::marginal(std::string_view pattern) const {
  if (pattern.size() != 4 ||
      pattern.find_first_not_of("+-.") != std::string_view::npos) {
    throw ValidationError("marginal pattern must be four of '+', '-', '.': " +
                          std::string(pattern));
  }
  double sum = 0;
  for (int i = 0; i < 16; ++i) {
    const std::string l = label(i);
    bool match = true;
    for (int k = 0; k < 4 && match; ++k) match = pattern[k] == '.' || pattern[k] == l[k];
    if (match) sum += p_[i];
  }
  return sum;
}

}  // namespace bellquad
