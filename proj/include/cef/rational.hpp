#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace cef {

/// Raised when an exact integer computation leaves the 64-bit range.
class ArithmeticOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

int64_t checked_add(int64_t a, int64_t b);
int64_t checked_sub(int64_t a, int64_t b);
int64_t checked_mul(int64_t a, int64_t b);
int64_t gcd64(int64_t a, int64_t b);
int64_t lcm64(int64_t a, int64_t b);
int64_t floor_div(int64_t a, int64_t b);
int64_t ceil_div(int64_t a, int64_t b);
int64_t mod_floor(int64_t a, int64_t b);

/// Exact rational number with a positive, reduced denominator.
/// Overflow of the 64-bit components throws ArithmeticOverflow.
class Rational {
 public:
  Rational() = default;
  Rational(int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
  Rational(int64_t n, int64_t d);

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return (num_ > 0) - (num_ < 0); }

  int64_t floor() const { return floor_div(num_, den_); }
  int64_t ceil() const { return ceil_div(num_, den_); }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  Rational abs() const { return num_ < 0 ? -*this : *this; }
  Rational inverse() const;

  std::string str() const;
  static Rational parse(const std::string& s);

 private:
  int64_t num_ = 0;
  int64_t den_ = 1;
};

}  // namespace cef

template <>
struct std::hash<cef::Rational> {
  size_t operator()(const cef::Rational& r) const noexcept {
    return std::hash<int64_t>{}(r.num()) * 1000003u ^ std::hash<int64_t>{}(r.den());
  }
};
