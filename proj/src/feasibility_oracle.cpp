#include "bellquad/feasibility_oracle.hpp"

#include <algorithm>
#include <vector>

#include "bellquad/simplex.hpp"

namespace bellquad {

namespace {

// Four-character marginal patterns for the nine rows.
constexpr std::array<const char*, 9> kRowPatterns{"....", "+...", ".+..", "..+.", "...+",
                                                  "+.+.", "+..+", ".++.", ".+.+"};

bool matches(const char* pattern, int index) {
  const std::string label = QuadDistribution::label(index);
  for (int k = 0; k < 4; ++k)
    if (pattern[k] != '.' && pattern[k] != label[k]) return false;
  return true;
}

// max s subject to A (w + s 1) = b, w >= 0, with s = s_plus - s_minus.
template <class T>
LpResult<T> solve_max_min(const BasicMarginalSystem<T>& sys) {
  std::vector<std::vector<T>> a(9, std::vector<T>(18, T{}));
  for (int i = 0; i < 9; ++i) {
    int row_sum = 0;
    for (int j = 0; j < 16; ++j) {
      a[i][j] = T(sys.coefficients[i][j]);
      row_sum += sys.coefficients[i][j];
    }
    a[i][16] = T(row_sum);
    a[i][17] = T(-row_sum);
  }
  std::vector<T> c(18, T{});
  c[16] = T(1);
  c[17] = T(-1);
  return maximize(a, std::vector<T>(sys.rhs.begin(), sys.rhs.end()), c);
}

}  // namespace

std::array<std::array<int, 16>, 9> marginal_coefficients() {
  std::array<std::array<int, 16>, 9> rows{};
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 16; ++j) rows[i][j] = matches(kRowPatterns[i], j) ? 1 : 0;
  return rows;
}

MarginalSystem build_system(const ExperimentalProbs& probs) {
  MarginalSystem sys;
  sys.coefficients = marginal_coefficients();
  const Singles& s = probs.singles();
  const Doubles& d = probs.doubles();
  sys.rhs = {1.0, s.a, s.a_prime, s.b, s.b_prime, d.ab, d.ab_prime, d.a_prime_b, d.a_prime_b_prime};
  return sys;
}

ExactMarginalSystem build_exact_system(const std::array<Rational, 8>& probs) {
  ExactMarginalSystem sys;
  sys.coefficients = marginal_coefficients();
  sys.rhs[0] = Rational(1);
  std::copy(probs.begin(), probs.end(), sys.rhs.begin() + 1);
  return sys;
}

FeasibilityResult feasible(const MarginalSystem& system, double lp_tolerance) {
  const LpResult<double> lp = solve_max_min(system);
  if (lp.status != LpStatus::optimal) throw InternalError("max-min LP did not reach an optimum");

  FeasibilityResult out;
  out.max_min_entry = lp.objective;
  const double s = lp.x[16] - lp.x[17];
  for (int j = 0; j < 16; ++j) out.solution[j] = lp.x[j] + s;
  std::copy(lp.duals.begin(), lp.duals.end(), out.certificate.begin());
  out.feasible = out.max_min_entry >= -lp_tolerance;
  // Every entry is >= max_min_entry >= -lp_tolerance.
  if (out.feasible) out.witness = QuadDistribution::clamped(out.solution, std::max(lp_tolerance, 0.0));
  return out;
}

double max_min_entry(const MarginalSystem& system) { return feasible(system).max_min_entry; }

std::optional<QuadDistribution> vertex_witness(const MarginalSystem& system,
                                               const std::array<double, 16>& objective) {
  std::vector<std::vector<double>> a(9, std::vector<double>(16));
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 16; ++j) a[i][j] = system.coefficients[i][j];
  const LpResult<double> lp = maximize(
      a, std::vector<double>(system.rhs.begin(), system.rhs.end()),
      std::vector<double>(objective.begin(), objective.end()));
  if (lp.status != LpStatus::optimal) return std::nullopt;
  QuadDistribution::Entries q{};
  for (int j = 0; j < 16; ++j) q[j] = std::max(lp.x[j], 0.0);
  return QuadDistribution(q, 0, kNormalizationTolerance);
}

ExactFeasibilityResult feasible_exact(const ExactMarginalSystem& system) {
  const LpResult<Rational> lp = solve_max_min(system);
  if (lp.status != LpStatus::optimal) throw InternalError("exact max-min LP did not reach an optimum");
  ExactFeasibilityResult out;
  out.max_min_entry = lp.objective;
  out.feasible = lp.objective.sign() >= 0;
  const Rational s = lp.x[16] - lp.x[17];
  for (int j = 0; j < 16; ++j) out.solution[j] = lp.x[j] + s;
  std::copy(lp.duals.begin(), lp.duals.end(), out.certificate.begin());
  return out;
}

}  // namespace bellquad
