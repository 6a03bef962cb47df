#pragma once

#include <array>
#include <complex>

#include "bellquad/experiment_model.hpp"

namespace bellquad {

using Complex = std::complex<double>;
using Matrix4 = std::array<std::array<Complex, 4>, 4>;
using Ket4 = std::array<Complex, 4>;

inline constexpr double kValidationTolerance = 1e-9;

/// Real 3-vector of unit Euclidean norm (within tolerance). Used for analyser
/// directions; the stored components are exactly what the caller supplied.
class UnitVector {
 public:
  UnitVector(double x, double y, double z, double tolerance = kValidationTolerance);

  double x() const noexcept { return v_[0]; }
  double y() const noexcept { return v_[1]; }
  double z() const noexcept { return v_[2]; }
  const std::array<double, 3>& components() const noexcept { return v_; }

  double dot(const UnitVector& other) const noexcept;

 private:
  std::array<double, 3> v_;
};

enum class Particle { first, second };

struct Observable {
  Particle particle;
  UnitVector direction;
};

struct AnalyzerSettings {
  UnitVector a;
  UnitVector a_prime;
  UnitVector b;
  UnitVector b_prime;
};

/// Two-qubit density matrix in the basis |00>, |01>, |10>, |11> with the
/// first particle as the most significant qubit.
///
/// Construction validates hermiticity, unit trace and positive
/// semidefiniteness. The PSD test computes all four eigenvalues explicitly:
/// the Hermitian H = X + iY is embedded as the real symmetric 8x8 matrix
/// [[X, -Y], [Y, X]], whose spectrum is that of H with each eigenvalue doubled,
/// and diagonalised with cyclic Jacobi rotations.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix4& entries, double tolerance = kValidationTolerance);

  static DensityMatrix singlet();
  static DensityMatrix product_00();
  static DensityMatrix maximally_mixed();
  /// p * singlet + (1 - p) * I/4, p in [0, 1].
  static DensityMatrix werner(double p);
  /// |psi><psi| for a (not necessarily normalised, nonzero) ket.
  static DensityMatrix pure(const Ket4& ket);

  const Matrix4& entries() const noexcept { return m_; }
  const Complex& operator()(int row, int col) const { return m_[row][col]; }

 private:
  Matrix4 m_;
};

/// Eigenvalues of a Hermitian 4x4 matrix in ascending order. No validation.
std::array<double, 4> hermitian_eigenvalues(const Matrix4& h);

/// (sigma . n) (x) I for the first particle, I (x) (sigma . n) for the second.
Matrix4 observable_matrix(const Observable& obs);

/// tr(rho (sigma1 . nA)(sigma2 . nB)). obs_a must act on the first particle
/// and obs_b on the second.
double correlation(const DensityMatrix& rho, const Observable& obs_a, const Observable& obs_b);

/// tr(rho Pi+) with Pi+ = (I + sigma . n)/2 on the observable's particle.
double single_prob(const DensityMatrix& rho, const Observable& obs);

/// tr(rho Pi+^A Pi+^B), the probability that both observables read +1.
double double_prob(const DensityMatrix& rho, const Observable& obs_a, const Observable& obs_b);

ExperimentalProbs experimental_probs(const DensityMatrix& rho, const AnalyzerSettings& settings);

}  // namespace bellquad
