#pragma once

#include <array>
#include <optional>

#include "bellquad/experiment_model.hpp"
#include "bellquad/quad_distribution.hpp"
#include "bellquad/rational.hpp"

namespace bellquad {

inline constexpr double kLpTolerance = 1e-9;

/// The nine linear equalities a quadruple distribution must satisfy to
/// reproduce eight experimental probabilities. Row order: normalisation,
/// P(A), P(A'), P(B), P(B'), P(AB), P(AB'), P(A'B), P(A'B'). Column order is
/// QuadDistribution's entry order.
template <class T>
struct BasicMarginalSystem {
  static constexpr int variable_count = 16;
  static constexpr int row_count = 9;
  std::array<std::array<int, 16>, 9> coefficients{};
  std::array<T, 9> rhs{};
};

using MarginalSystem = BasicMarginalSystem<double>;
using ExactMarginalSystem = BasicMarginalSystem<Rational>;

/// Coefficient rows shared by every system (entries are 0 or 1).
std::array<std::array<int, 16>, 9> marginal_coefficients();

MarginalSystem build_system(const ExperimentalProbs& probs);

/// Exact system from the eight probabilities in ExperimentalProbs order:
/// P(A), P(A'), P(B), P(B'), P(AB), P(AB'), P(A'B), P(A'B').
ExactMarginalSystem build_exact_system(const std::array<Rational, 8>& probs);

struct FeasibilityResult {
  bool feasible = false;
  /// Optimal value of: maximise min_i q_i subject to the nine equalities.
  double max_min_entry = 0;
  /// The maximising q (may have negative entries when infeasible).
  std::array<double, 16> solution{};
  /// Present iff feasible.
  std::optional<QuadDistribution> witness;
  /// Dual multipliers y of the nine equalities. y.A_j >= 0 for every column,
  /// y.(sum_j A_j) = 1, and y.rhs = max_min_entry; when infeasible this is a
  /// Farkas certificate.
  std::array<double, 9> certificate{};
};

/// Decides whether a nonnegative quadruple distribution satisfies the system
/// (feasible iff max_min_entry >= -lp_tolerance). Deterministic.
FeasibilityResult feasible(const MarginalSystem& system, double lp_tolerance = kLpTolerance);

double max_min_entry(const MarginalSystem& system);

/// A vertex of the feasible polytope maximising objective.q, or nullopt when
/// the system is infeasible.
std::optional<QuadDistribution> vertex_witness(const MarginalSystem& system,
                                               const std::array<double, 16>& objective);

struct ExactFeasibilityResult {
  bool feasible = false;
  Rational max_min_entry;
  std::array<Rational, 16> solution{};
  std::array<Rational, 9> certificate{};
};

/// Same decision in exact rational arithmetic (no tolerance).
ExactFeasibilityResult feasible_exact(const ExactMarginalSystem& system);

}  // namespace bellquad
