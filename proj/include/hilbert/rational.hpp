#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hilbert {

/// Exact rational number with 64-bit numerator and denominator.
///
/// Every operation goes through 128-bit intermediates and throws
/// std::overflow_error if the reduced result does not fit back into 64 bits.
/// The representation is canonical: gcd(num, den) == 1 and den > 0.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design of the number tower
  Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  friend Rational operator+(const Rational& x, const Rational& y) {
    return from_wide(static_cast<__int128>(x.num_) * y.den_ + static_cast<__int128>(y.num_) * x.den_,
                     static_cast<__int128>(x.den_) * y.den_);
  }
  friend Rational operator-(const Rational& x, const Rational& y) {
    return from_wide(static_cast<__int128>(x.num_) * y.den_ - static_cast<__int128>(y.num_) * x.den_,
                     static_cast<__int128>(x.den_) * y.den_);
  }
  friend Rational operator*(const Rational& x, const Rational& y) {
    return from_wide(static_cast<__int128>(x.num_) * y.num_, static_cast<__int128>(x.den_) * y.den_);
  }
  friend Rational operator/(const Rational& x, const Rational& y) {
    if (y.num_ == 0) throw std::domain_error("Rational: division by zero");
    return from_wide(static_cast<__int128>(x.num_) * y.den_, static_cast<__int128>(x.den_) * y.num_);
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  friend bool operator==(const Rational& x, const Rational& y) = default;
  friend int compare(const Rational& x, const Rational& y) {
    const __int128 l = static_cast<__int128>(x.num_) * y.den_;
    const __int128 r = static_cast<__int128>(y.num_) * x.den_;
    return (l > r) - (l < r);
  }
  friend bool operator<(const Rational& x, const Rational& y) { return compare(x, y) < 0; }
  friend bool operator>(const Rational& x, const Rational& y) { return compare(x, y) > 0; }
  friend bool operator<=(const Rational& x, const Rational& y) { return compare(x, y) <= 0; }
  friend bool operator>=(const Rational& x, const Rational& y) { return compare(x, y) >= 0; }

  /// Largest integer not exceeding the value.
  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if ((num_ % den_ != 0) && (num_ < 0)) --q;
    return q;
  }
  /// Fractional part in [0, 1).
  Rational frac() const { return *this - Rational(floor()); }

  template <class T = double>
  T to() const {
    return static_cast<T>(num_) / static_cast<T>(den_);
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }
  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  static __int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const __int128 g = d == 1 ? 1 : gcd128(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lim = INT64_MAX;
    if (n > lim || n < -lim || d > lim) throw std::overflow_error("Rational: 64-bit overflow");
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
  }

  void assign(std::int64_t n, std::int64_t d) { *this = from_wide(n, d); }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace hilbert
