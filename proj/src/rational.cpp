#include "cef/rational.hpp"

#include <limits>

namespace cef {

namespace {

int64_t narrow(__int128 v) {
  if (v > std::numeric_limits<int64_t>::max() || v < std::numeric_limits<int64_t>::min())
    throw ArithmeticOverflow("64-bit overflow in exact arithmetic");
  return static_cast<int64_t>(v);
}

}  // namespace

int64_t checked_add(int64_t a, int64_t b) { return narrow(static_cast<__int128>(a) + b); }
int64_t checked_sub(int64_t a, int64_t b) { return narrow(static_cast<__int128>(a) - b); }
int64_t checked_mul(int64_t a, int64_t b) { return narrow(static_cast<__int128>(a) * b); }

int64_t gcd64(int64_t a, int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int64_t lcm64(int64_t a, int64_t b) {
  if (a == 0 || b == 0) return 0;
  return checked_mul(a / gcd64(a, b), b < 0 ? -b : b);
}

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t ceil_div(int64_t a, int64_t b) { return -floor_div(-a, b); }

int64_t mod_floor(int64_t a, int64_t b) {
  int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

Rational::Rational(int64_t n, int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  if (d < 0) {
    n = checked_mul(n, -1);
    d = checked_mul(d, -1);
  }
  int64_t g = gcd64(n, d);
  if (g == 0) g = 1;
  num_ = n / g;
  den_ = d / g;
}

Rational Rational::operator-() const { return Rational(checked_mul(num_, -1), den_); }

Rational& Rational::operator+=(const Rational& o) {
  if (den_ == o.den_) {
    *this = Rational(checked_add(num_, o.num_), den_);
    return *this;
  }
  int64_t g = gcd64(den_, o.den_);
  int64_t n = checked_add(checked_mul(num_, o.den_ / g), checked_mul(o.num_, den_ / g));
  int64_t d = checked_mul(den_, o.den_ / g);
  *this = Rational(n, d);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) { return *this += -o; }

Rational& Rational::operator*=(const Rational& o) {
  int64_t g1 = gcd64(num_, o.den_);
  int64_t g2 = gcd64(o.num_, den_);
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  *this = Rational(checked_mul(num_ / g1, o.num_ / g2), checked_mul(den_ / g2, o.den_ / g1));
  return *this;
}

Rational& Rational::operator/=(const Rational& o) { return *this *= o.inverse(); }

Rational Rational::inverse() const {
  if (num_ == 0) throw std::domain_error("inverse of zero rational");
  return Rational(den_, num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  __int128 l = static_cast<__int128>(a.num_) * b.den_;
  __int128 r = static_cast<__int128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::logic_error&) {
    throw std::invalid_argument("not a rational literal: " + s);
  }
}

}  // namespace cef
