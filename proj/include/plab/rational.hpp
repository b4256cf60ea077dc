#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace plab {

// Exact rational with 64-bit numerator and positive denominator, always reduced.
// Intermediate products are formed in 128 bits; results that do not fit throw
// OverflowError. Used for exponents and small parameters, not for big sums.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num);  // NOLINT(google-explicit-constructor)
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  // Accepts "p", "p/q", "-p/q" and finite decimals such as "0.625" or "-1.5".
  static Rational parse(std::string_view text);

  std::string str() const;
  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::int64_t floor() const noexcept;
  std::int64_t ceil() const noexcept;
  bool is_integer() const noexcept { return den_ == 1; }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }

  friend bool operator==(const Rational& a, const Rational& b) noexcept {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept;

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational abs(const Rational& r);

}  // namespace plab
