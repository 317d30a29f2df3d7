#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gictk {

// Exact rational over int64, reduced, denominator > 0. The multi-cadence
// region geometry is checked with these so boundary membership is not a
// floating-point judgement call. Magnitudes stay tiny (nanosecond counts
// divided by single-digit denominators), so int64 with __int128 cross
// multiplication is plenty.
class Ratio {
 public:
  constexpr Ratio() : num_(0), den_(1) {}
  constexpr Ratio(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(google-explicit-constructor)
  Ratio(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den_ == 0) throw std::invalid_argument("Ratio denominator is zero");
    normalize();
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  friend Ratio operator+(const Ratio& a, const Ratio& b) {
    return Ratio(checked(i128(a.num_) * b.den_ + i128(b.num_) * a.den_),
                 checked(i128(a.den_) * b.den_));
  }
  friend Ratio operator-(const Ratio& a, const Ratio& b) {
    return Ratio(checked(i128(a.num_) * b.den_ - i128(b.num_) * a.den_),
                 checked(i128(a.den_) * b.den_));
  }
  friend Ratio operator*(const Ratio& a, const Ratio& b) {
    return Ratio(checked(i128(a.num_) * b.num_), checked(i128(a.den_) * b.den_));
  }
  friend Ratio operator/(const Ratio& a, const Ratio& b) {
    if (b.num_ == 0) throw std::invalid_argument("Ratio division by zero");
    return Ratio(checked(i128(a.num_) * b.den_), checked(i128(a.den_) * b.num_));
  }
  Ratio operator-() const { return Ratio(-num_, den_); }

  friend bool operator==(const Ratio& a, const Ratio& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Ratio& a, const Ratio& b) { return !(a == b); }
  friend bool operator<(const Ratio& a, const Ratio& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator<=(const Ratio& a, const Ratio& b) { return !(b < a); }
  friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
  friend bool operator>=(const Ratio& a, const Ratio& b) { return !(a < b); }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  using i128 = __int128;

  static std::int64_t checked(i128 v) {
    if (v > i128(INT64_MAX) || v < i128(INT64_MIN)) {
      throw std::overflow_error("Ratio arithmetic overflow");
    }
    return static_cast<std::int64_t>(v);
  }

  void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace gictk
