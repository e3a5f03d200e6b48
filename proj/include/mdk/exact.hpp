#pragma once

// Overflow-checked 64-bit integers and reduced rationals. Every lattice
// computation goes through these; an overflow throws instead of wrapping.

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>

#include "mdk/error.hpp"

namespace mdk {

using Int = std::int64_t;

inline Int checked_add(Int a, Int b) {
  Int r;
  if (__builtin_add_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "integer addition");
  return r;
}

inline Int checked_sub(Int a, Int b) {
  Int r;
  if (__builtin_sub_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "integer subtraction");
  return r;
}

inline Int checked_mul(Int a, Int b) {
  Int r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error(ErrorCode::Overflow, "integer multiplication");
  return r;
}

inline Int int_abs(Int a) {
  if (a == INT64_MIN) throw Error(ErrorCode::Overflow, "abs of INT64_MIN");
  return a < 0 ? -a : a;
}

inline Int gcd(Int a, Int b) { return std::gcd(int_abs(a), int_abs(b)); }

/// Floor division for b > 0.
inline Int floor_div(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct Bezout {
  Int g, x, y;  // g = gcd(a,b) >= 0, g = a*x + b*y
};

inline Bezout extended_gcd(Int a, Int b) {
  Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Int q = old_r / r;
    std::tie(old_r, r) = std::make_tuple(r, checked_sub(old_r, checked_mul(q, r)));
    std::tie(old_s, s) = std::make_tuple(s, checked_sub(old_s, checked_mul(q, s)));
    std::tie(old_t, t) = std::make_tuple(t, checked_sub(old_t, checked_mul(q, t)));
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

class Rational {
 public:
  Rational() = default;
  Rational(Int n) : num_(n), den_(1) {}  // NOLINT(implicit)
  Rational(Int n, Int d) : num_(n), den_(d) {
    if (d == 0) throw Error(ErrorCode::Overflow, "zero denominator");
    normalize();
  }

  Int num() const { return num_; }
  Int den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }

  /// Representative in [0, 1).
  Rational mod1() const { return Rational(checked_sub(num_, checked_mul(floor_div(num_, den_), den_)), den_); }
  Int floor() const { return floor_div(num_, den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    Int g = gcd(a.den_, b.den_);
    Int l = checked_mul(a.den_ / g, b.den_);
    return Rational(checked_add(checked_mul(a.num_, l / a.den_), checked_mul(b.num_, l / b.den_)), l);
  }
  friend Rational operator-(const Rational& a) { return Rational(checked_sub(0, a.num_), a.den_); }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    Int g1 = gcd(a.num_, b.den_), g2 = gcd(b.num_, a.den_);
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    return Rational(checked_mul(a.num_ / g1, b.num_ / g2), checked_mul(a.den_ / g2, b.den_ / g1));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error(ErrorCode::Overflow, "division by zero");
    return a * Rational(b.den_, b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend auto operator<=>(const Rational& a, const Rational& b) {
    // denominators positive
    return checked_mul(a.num_, b.den_) <=> checked_mul(b.num_, a.den_);
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  void normalize() {
    if (den_ < 0) {
      num_ = checked_sub(0, num_);
      den_ = checked_sub(0, den_);
    }
    Int g = gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  Int num_ = 0;
  Int den_ = 1;
};

}  // namespace mdk
