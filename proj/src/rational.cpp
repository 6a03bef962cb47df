#include "bellquad/rational.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace bellquad {

namespace {

WideInt gcd128(WideInt a, WideInt b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const WideInt t = a % b;
    a = b;
    b = t;
  }
  return a;
}

constexpr WideInt kMax = std::numeric_limits<std::int64_t>::max();

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(WideInt num, WideInt den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const WideInt g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num > kMax || num < -kMax || den > kMax) throw std::overflow_error("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

Rational Rational::from_double(double value, int max_exponent) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite value has no rational form");
  double scaled = value;
  std::int64_t den = 1;
  for (int e = 0; e <= max_exponent; ++e) {
    if (scaled == std::trunc(scaled) && std::abs(scaled) < 9.0e18)
      return Rational(static_cast<std::int64_t>(scaled), den);
    scaled *= 2;
    den *= 2;
  }
  throw std::invalid_argument("value is not a dyadic fraction with small denominator");
}

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  std::size_t used = 0;
  if (slash == std::string::npos) {
    const long long n = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument("bad rational: " + text);
    return Rational(n);
  }
  const std::string n = text.substr(0, slash);
  const std::string d = text.substr(slash + 1);
  std::size_t used_d = 0;
  const long long nv = std::stoll(n, &used);
  const long long dv = std::stoll(d, &used_d);
  if (used != n.size() || used_d != d.size()) throw std::invalid_argument("bad rational: " + text);
  return Rational(nv, dv);
}

Rational Rational::operator-() const { return from_wide(-static_cast<WideInt>(num_), den_); }

Rational& Rational::operator+=(const Rational& o) {
  return *this = from_wide(static_cast<WideInt>(num_) * o.den_ + static_cast<WideInt>(o.num_) * den_,
                           static_cast<WideInt>(den_) * o.den_);
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  return *this = from_wide(static_cast<WideInt>(num_) * o.num_, static_cast<WideInt>(den_) * o.den_);
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("rational division by zero");
  return *this = from_wide(static_cast<WideInt>(num_) * o.den_, static_cast<WideInt>(den_) * o.num_);
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<WideInt>(a.num_) * b.den_ < static_cast<WideInt>(b.num_) * a.den_;
}

std::string Rational::str() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace bellquad
