#pragma once

#include <array>
#include <string>

#include "bellquad/errors.hpp"
#include "bellquad/experiment_model.hpp"

namespace bellquad {

inline constexpr double kChshTolerance = 1e-9;

/// The four probability combinations C(XX'YY'), obtained from C(AA'BB') by
/// interchanging A <-> A' and/or B <-> B'.
enum class CVariant : std::uint8_t { aa_bb = 0, a_abb = 1, aa_b_b = 2, a_ab_b = 3 };

inline constexpr std::array<CVariant, 4> kCVariants{CVariant::aa_bb, CVariant::a_abb,
                                                    CVariant::aa_b_b, CVariant::a_ab_b};

/// Interchange table: which settings a variant swaps relative to C(AA'BB').
struct Interchange {
  bool swap_a;
  bool swap_b;
};

inline constexpr std::array<Interchange, 4> kInterchange{
    Interchange{false, false}, Interchange{true, false}, Interchange{false, true},
    Interchange{true, true}};

constexpr Interchange interchange_of(CVariant v) noexcept {
  return kInterchange[static_cast<int>(v)];
}

/// "AA'BB'", "A'ABB'", "AA'B'B", "A'AB'B".
std::string variant_name(CVariant v);

struct ChshReport {
  /// |<XY> + <XY'> - <X'Y> + <X'Y'>| for each variant's role assignment.
  std::array<double, 4> s_values{};
  std::array<double, 4> c_values{};
  bool satisfied = false;
  /// Satisfied, but some inequality is within tolerance of its bound.
  bool boundary = false;
  /// min over the 8 inequalities of the slack to the nearer bound, in C units.
  /// Negative when violated.
  double margin = 0;

  double max_s() const noexcept;
  /// Slack of "0 <= C" (lower) and "C <= 1" (upper) for a variant.
  double lower_slack(CVariant v) const noexcept { return c_values[static_cast<int>(v)]; }
  double upper_slack(CVariant v) const noexcept { return 1 - c_values[static_cast<int>(v)]; }
};

struct CorrelationFormResult {
  std::array<double, 4> values{};
  bool satisfied = false;
};

/// Raised when the four EPR experiments admit no joint distribution.
class ChshViolation : public Error {
 public:
  explicit ChshViolation(ChshReport report);
  ExitCode exit_code() const noexcept override { return ExitCode::chsh_violation; }
  const ChshReport& report() const noexcept { return report_; }

 private:
  ChshReport report_;
};

/// Signed combination <XY> + <XY'> - <X'Y> + <X'Y'> under the variant's roles.
double signed_chsh_combination(const CorrelationSet& corrs, CVariant v) noexcept;

/// The four |CHSH| combinations (one per sign pattern with a single minus) and
/// whether all are <= 2 + tolerance.
CorrelationFormResult chsh_correlation_form(const CorrelationSet& corrs,
                                            double tolerance = kChshTolerance);

/// C(XX'YY') = P(X) + P(Y') - [P(XY) + P(XY') - P(X'Y) + P(X'Y')].
double c_function(const ExperimentalProbs& probs, CVariant v) noexcept;

/// The eight inequalities 0 <= C <= 1 over all four variants.
ChshReport chsh_probability_form(const ExperimentalProbs& probs,
                                 double tolerance = kChshTolerance);

}  // namespace bellquad
