#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bellquad/errors.hpp"
#include "bellquad/rational.hpp"

namespace bellquad {

// Comparison policy for the simplex scalar type.
template <class T>
struct SimplexTraits;

template <>
struct SimplexTraits<double> {
  static constexpr double pivot_tolerance = 1e-12;
  static constexpr double feasibility_tolerance = 1e-9;
  static bool positive(double x) noexcept { return x > pivot_tolerance; }
  static bool nonzero(double x) noexcept { return std::abs(x) > pivot_tolerance; }
  static bool ties(double a, double b) noexcept { return std::abs(a - b) <= pivot_tolerance; }
  static bool infeasible(double phase1_objective) noexcept {
    return phase1_objective < -feasibility_tolerance;
  }
};

template <>
struct SimplexTraits<Rational> {
  static bool positive(const Rational& x) noexcept { return x.sign() > 0; }
  static bool nonzero(const Rational& x) noexcept { return x.sign() != 0; }
  static bool ties(const Rational& a, const Rational& b) noexcept { return a == b; }
  static bool infeasible(const Rational& phase1_objective) noexcept {
    return phase1_objective.sign() < 0;
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

template <class T>
struct LpResult {
  LpStatus status = LpStatus::infeasible;
  T objective{};
  std::vector<T> x;      // primal solution, one entry per column
  std::vector<T> duals;  // one multiplier per equality row
  std::vector<std::size_t> basis;
};

/// maximize c.x subject to A x = b, x >= 0, by a dense two-phase tableau
/// simplex with Bland's smallest-index rule. `a` is row-major (rows x cols).
///
/// Duals y satisfy y.A_j >= c_j for every column at optimality, and
/// y.b equals the optimal objective.
template <class T>
LpResult<T> maximize(const std::vector<std::vector<T>>& a, const std::vector<T>& b,
                     const std::vector<T>& c) {
  using Tr = SimplexTraits<T>;
  const std::size_t m = b.size();
  const std::size_t n = c.size();
  const std::size_t rhs = n + m;
  const T zero{};
  const T one{1};

  // Tableau [A | I | b] with rows negated where b < 0.
  std::vector<std::vector<T>> t(m, std::vector<T>(n + m + 1, zero));
  std::vector<int> row_sign(m, 1);
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < zero) row_sign[i] = -1;
    for (std::size_t j = 0; j < n; ++j) t[i][j] = row_sign[i] > 0 ? a[i][j] : -a[i][j];
    t[i][n + i] = one;
    t[i][rhs] = row_sign[i] > 0 ? b[i] : -b[i];
    basis[i] = n + i;
  }

  auto pivot = [&](std::size_t r, std::size_t col) {
    const T p = t[r][col];
    for (auto& v : t[r]) v /= p;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == r || !Tr::nonzero(t[i][col])) continue;
      const T f = t[i][col];
      for (std::size_t j = 0; j <= rhs; ++j) t[i][j] -= f * t[r][j];
      t[i][col] = zero;
    }
    basis[r] = col;
  };

  // Runs Bland iterations for `cost` over columns [0, allowed).
  auto run = [&](const std::vector<T>& cost, std::size_t allowed) -> LpStatus {
    for (int iter = 0; iter < 100000; ++iter) {
      std::size_t entering = allowed;
      for (std::size_t j = 0; j < allowed && entering == allowed; ++j) {
        T reduced = cost[j];
        for (std::size_t i = 0; i < m; ++i) reduced -= cost[basis[i]] * t[i][j];
        if (Tr::positive(reduced)) entering = j;
      }
      if (entering == allowed) return LpStatus::optimal;

      std::size_t leaving = m;
      T best{};
      for (std::size_t i = 0; i < m; ++i) {
        if (!Tr::positive(t[i][entering])) continue;
        const T ratio = t[i][rhs] / t[i][entering];
        if (leaving == m || (ratio < best && !Tr::ties(ratio, best)) ||
            (Tr::ties(ratio, best) && basis[i] < basis[leaving])) {
          leaving = i;
          best = ratio;
        }
      }
      if (leaving == m) return LpStatus::unbounded;
      pivot(leaving, entering);
    }
    throw InternalError("simplex iteration limit reached");
  };

  auto objective = [&](const std::vector<T>& cost) {
    T v = zero;
    for (std::size_t i = 0; i < m; ++i) v += cost[basis[i]] * t[i][rhs];
    return v;
  };

  LpResult<T> out;

  // Phase 1: maximize -sum(artificials).
  std::vector<T> phase1(n + m, zero);
  for (std::size_t i = 0; i < m; ++i) phase1[n + i] = -one;
  run(phase1, n + m);
  if (Tr::infeasible(objective(phase1))) {
    out.status = LpStatus::infeasible;
    out.objective = objective(phase1);
    return out;
  }
  // Pivot zero-level artificials out of the basis where possible; rows where
  // that fails are redundant and keep their artificial at zero.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (Tr::nonzero(t[i][j])) {
        pivot(i, j);
        break;
      }
    }
  }

  std::vector<T> phase2(n + m, zero);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
  out.status = run(phase2, n);
  out.objective = objective(phase2);
  out.x.assign(n, zero);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) out.x[basis[i]] = t[i][rhs];
  // The artificial block of the final tableau holds B^-1.
  out.duals.assign(m, zero);
  for (std::size_t k = 0; k < m; ++k) {
    T y = zero;
    for (std::size_t i = 0; i < m; ++i) y += phase2[basis[i]] * t[i][n + k];
    out.duals[k] = row_sign[k] > 0 ? y : -y;
  }
  out.basis = basis;
  return out;
}

}  // namespace bellquad
