#include "bellquad/quantum_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bellquad/errors.hpp"

namespace bellquad {

namespace {

using Matrix2 = std::array<std::array<Complex, 2>, 2>;
using Real8 = std::array<std::array<double, 8>, 8>;

constexpr double kImaginaryTolerance = 1e-9;

Matrix2 pauli_dot(const UnitVector& n) {
  return {{{Complex(n.z(), 0), Complex(n.x(), -n.y())},
           {Complex(n.x(), n.y()), Complex(-n.z(), 0)}}};
}

Matrix2 identity2() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

Matrix4 kron(const Matrix2& lhs, const Matrix2& rhs) {
  Matrix4 out{};
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2) out[2 * i1 + i2][2 * j1 + j2] = lhs[i1][j1] * rhs[i2][j2];
  return out;
}

Matrix4 multiply(const Matrix4& lhs, const Matrix4& rhs) {
  Matrix4 out{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k)
      for (int j = 0; j < 4; ++j) out[i][j] += lhs[i][k] * rhs[k][j];
  return out;
}

Complex trace_of_product(const Matrix4& lhs, const Matrix4& rhs) {
  Complex t = 0;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) t += lhs[i][k] * rhs[k][i];
  return t;
}

Matrix4 embed(const Matrix2& op, Particle particle) {
  return particle == Particle::first ? kron(op, identity2()) : kron(identity2(), op);
}

Matrix2 plus_projector(const UnitVector& n) {
  Matrix2 p = pauli_dot(n);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) p[i][j] *= 0.5;
    p[i][i] += 0.5;
  }
  return p;
}

// Returns the real part after checking the imaginary part and the range.
double real_in_range(Complex value, double lo, double hi, const char* what) {
  if (std::abs(value.imag()) > kImaginaryTolerance) {
    std::ostringstream msg;
    msg << what << " has imaginary part " << value.imag();
    throw InternalError(msg.str());
  }
  const double v = value.real();
  if (v < lo - kValidationTolerance || v > hi + kValidationTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << " = " << v << " outside [" << lo << ", " << hi << "]";
    throw InternalError(msg.str());
  }
  return std::clamp(v, lo, hi);
}

void require_pair(const Observable& a, const Observable& b) {
  if (a.particle != Particle::first || b.particle != Particle::second)
    throw UsageError("joint quantities need the first observable on particle 1 and the second on particle 2");
}

// Cyclic Jacobi eigenvalue sweep for a small real symmetric matrix.
std::array<double, 8> symmetric_eigenvalues(Real8 a) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int p = 0; p < 8; ++p)
      for (int q = p + 1; q < 8; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (int p = 0; p < 8; ++p) {
      for (int q = p + 1; q < 8; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1);
        const double s = t * c;
        for (int k = 0; k < 8; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 8; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::array<double, 8> ev{};
  for (int i = 0; i < 8; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace

UnitVector::UnitVector(double x, double y, double z, double tolerance) : v_{x, y, z} {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!std::isfinite(norm) || std::abs(norm - 1) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "direction (" << x << ", " << y << ", " << z << ") has norm " << norm << ", expected 1";
    throw ValidationError(msg.str());
  }
}

double UnitVector::dot(const UnitVector& other) const noexcept {
  return v_[0] * other.v_[0] + v_[1] * other.v_[1] + v_[2] * other.v_[2];
}

std::array<double, 4> hermitian_eigenvalues(const Matrix4& h) {
  Real8 r{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      r[i][j] = r[i + 4][j + 4] = h[i][j].real();
      r[i][j + 4] = -h[i][j].imag();
      r[i + 4][j] = h[i][j].imag();
    }
  }
  const auto doubled = symmetric_eigenvalues(r);
  // Each eigenvalue appears twice; average the pairs.
  return {(doubled[0] + doubled[1]) / 2, (doubled[2] + doubled[3]) / 2,
          (doubled[4] + doubled[5]) / 2, (doubled[6] + doubled[7]) / 2};
}

DensityMatrix::DensityMatrix(const Matrix4& entries, double tolerance) : m_(entries) {
  Complex trace = 0;
  for (int i = 0; i < 4; ++i) {
    trace += m_[i][i];
    for (int j = 0; j < 4; ++j) {
      if (!std::isfinite(m_[i][j].real()) || !std::isfinite(m_[i][j].imag()))
        throw ValidationError("density matrix has a non-finite entry");
      if (std::abs(m_[i][j] - std::conj(m_[j][i])) > tolerance) {
        std::ostringstream msg;
        msg << "density matrix is not Hermitian at (" << i << ", " << j << ")";
        throw ValidationError(msg.str());
      }
    }
  }
  if (std::abs(trace - Complex(1, 0)) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "density matrix trace is " << trace.real() << (trace.imag() < 0 ? " - " : " + ")
        << std::abs(trace.imag()) << "i, expected 1";
    throw ValidationError(msg.str());
  }
  const double smallest = hermitian_eigenvalues(m_)[0];
  if (smallest < -tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "density matrix is not positive semidefinite (smallest eigenvalue " << smallest << ")";
    throw ValidationError(msg.str());
  }
}

DensityMatrix DensityMatrix::pure(const Ket4& ket) {
  double norm2 = 0;
  for (const auto& c : ket) norm2 += std::norm(c);
  if (!(norm2 > 0)) throw ValidationError("ket has zero norm");
  Matrix4 m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = ket[i] * std::conj(ket[j]) / norm2;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::singlet() {
  const double r = 1 / std::sqrt(2.0);
  return pure({0.0, r, -r, 0.0});
}

DensityMatrix DensityMatrix::product_00() { return pure({1.0, 0.0, 0.0, 0.0}); }

DensityMatrix DensityMatrix::maximally_mixed() {
  Matrix4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = 0.25;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::werner(double p) {
  if (!(p >= 0 && p <= 1)) {
    std::ostringstream msg;
    msg << "Werner weight " << p << " outside [0, 1]";
    throw ValidationError(msg.str());
  }
  const Matrix4& s = singlet().entries();
  Matrix4 m{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m[i][j] = p * s[i][j];
    m[i][i] += (1 - p) * 0.25;
  }
  return DensityMatrix(m);
}

Matrix4 observable_matrix(const Observable& obs) {
  return embed(pauli_dot(obs.direction), obs.particle);
}

double correlation(const DensityMatrix& rho, const Observable& obs_a, const Observable& obs_b) {
  require_pair(obs_a, obs_b);
  const Matrix4 ab = multiply(observable_matrix(obs_a), observable_matrix(obs_b));
  return real_in_range(trace_of_product(rho.entries(), ab), -1, 1, "correlation");
}

double single_prob(const DensityMatrix& rho, const Observable& obs) {
  const Matrix4 proj = embed(plus_projector(obs.direction), obs.particle);
  return real_in_range(trace_of_product(rho.entries(), proj), 0, 1, "single probability");
}

double double_prob(const DensityMatrix& rho, const Observable& obs_a, const Observable& obs_b) {
  require_pair(obs_a, obs_b);
  const Matrix4 proj = kron(plus_projector(obs_a.direction), plus_projector(obs_b.direction));
  return real_in_range(trace_of_product(rho.entries(), proj), 0, 1, "double probability");
}

ExperimentalProbs experimental_probs(const DensityMatrix& rho, const AnalyzerSettings& settings) {
  const Observable a{Particle::first, settings.a};
  const Observable ap{Particle::first, settings.a_prime};
  const Observable b{Particle::second, settings.b};
  const Observable bp{Particle::second, settings.b_prime};
  const Singles singles{single_prob(rho, a), single_prob(rho, ap), single_prob(rho, b),
                        single_prob(rho, bp)};
  const Doubles doubles{double_prob(rho, a, b), double_prob(rho, a, bp), double_prob(rho, ap, b),
                        double_prob(rho, ap, bp)};
  return ExperimentalProbs(singles, doubles);
}

}  // namespace bellquad
