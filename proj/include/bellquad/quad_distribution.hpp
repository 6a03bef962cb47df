#pragma once

#include <array>
#include <string>
#include <string_view>

#include "bellquad/experiment_model.hpp"

namespace bellquad {

inline constexpr double kPositivityTolerance = 1e-12;
inline constexpr double kNormalizationTolerance = 1e-10;

/// Joint distribution P(a a' b b') over the values of A, A', B, B'.
///
/// Entry order is lexicographic in (a, a', b, b') with + before -, i.e. the
/// index is 8*[a=-] + 4*[a'=-] + 2*[b=-] + [b'=-].
class QuadDistribution {
 public:
  using Entries = std::array<double, 16>;

  /// Validates: every entry >= -positivity_tolerance, sum within
  /// normalization_tolerance of 1. Throws ValidationError otherwise.
  explicit QuadDistribution(const Entries& p, double positivity_tolerance = kPositivityTolerance,
                            double normalization_tolerance = kNormalizationTolerance);

  /// For freshly computed entries: negatives in [-clamp_tolerance, 0) are set
  /// to zero and the result renormalised. Larger negatives, or a sum away
  /// from 1, throw InternalError.
  static QuadDistribution clamped(Entries p, double clamp_tolerance = kPositivityTolerance);

  static constexpr int index(Sign a, Sign a_prime, Sign b, Sign b_prime) noexcept {
    return 8 * bit(a) + 4 * bit(a_prime) + 2 * bit(b) + bit(b_prime);
  }
  /// "+-+-" style label of an entry.
  static std::string label(int index);

  double at(Sign a, Sign a_prime, Sign b, Sign b_prime) const noexcept {
    return p_[index(a, a_prime, b, b_prime)];
  }
  double operator[](int i) const { return p_[i]; }
  const Entries& entries() const noexcept { return p_; }
  double min_entry() const noexcept;

  /// Sum over the indices marked '.' in a four-character pattern such as
  /// "+.+." (= P(A=+, B=+)). Throws ValidationError on a malformed pattern.
  double marginal(std::string_view pattern) const;

 private:
  Entries p_;
};

}  // namespace bellquad
