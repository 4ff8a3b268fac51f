#pragma once

// Exact arithmetic in A = Z[L, L^-1, 1/(1 - L^-i)], extended by integer
// constants in denominators, with specialization L -> q.

#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cef/rational.hpp"

namespace cef {

class NonAdmissibleDenominator : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Integer Laurent polynomial in L, keyed by exponent. Zero coefficients are
/// never stored.
using LaurentPoly = std::map<int, int64_t>;

/// A denominator factor of an unreduced fraction: either a positive integer
/// constant or (1 - L^-i)^mult.
struct DenFactor {
  int64_t constant = 1;  // used when index == 0
  int index = 0;         // i > 0 for (1 - L^-i)
  int mult = 1;
};

/// Element of A in canonical form.
///
/// The value is num / (const_den * prod_i (1 - L^-i)^{den[i]}). Canonical form
/// is computed through the cyclotomic factorization of the denominator, so two
/// elements are equal as ring elements iff their representations are
/// identical.
class LRat {
 public:
  LRat() = default;
  LRat(int64_t c);  // NOLINT(google-explicit-constructor)
  LRat(const Rational& c);  // NOLINT(google-explicit-constructor)

  static LRat L(int k = 1);
  static LRat monomial(const Rational& c, int k);
  /// 1 / (1 - L^-i)^mult.
  static LRat geometric(int i, int mult = 1);
  /// Canonicalizes num / prod(den). Throws NonAdmissibleDenominator for
  /// nonpositive constants or factors with i <= 0.
  static LRat normalize(const LaurentPoly& num, const std::vector<DenFactor>& den);

  const LaurentPoly& num() const { return num_; }
  const std::map<int, int>& den() const { return den_; }
  int64_t const_den() const { return const_den_; }

  bool is_zero() const { return num_.empty(); }
  bool is_one() const;
  /// True if the element is c * L^k for a rational c.
  bool is_monomial() const;
  std::optional<Rational> as_rational() const;

  LRat operator-() const;
  friend LRat operator+(const LRat& a, const LRat& b);
  friend LRat operator-(const LRat& a, const LRat& b);
  friend LRat operator*(const LRat& a, const LRat& b);
  LRat& operator+=(const LRat& b) { return *this = *this + b; }
  LRat& operator-=(const LRat& b) { return *this = *this - b; }
  LRat& operator*=(const LRat& b) { return *this = *this * b; }
  LRat pow(int n) const;
  LRat shift(int k) const;  // multiply by L^k

  /// Inverse in A when it exists (numerator a unit times cyclotomic factors).
  std::optional<LRat> try_inverse() const;

  friend bool operator==(const LRat& a, const LRat& b) = default;
  friend bool operator<(const LRat& a, const LRat& b) { return a.key() < b.key(); }

  /// Exact value at L = q (q > 1). Throws ArithmeticOverflow if the 64-bit
  /// rational range is exceeded.
  Rational specialize(const Rational& q) const;
  long double specialize_approx(long double q) const;
  /// Value at L = l in Z/(2^61 - 1); requires the denominators to be
  /// invertible there.
  uint64_t specialize_mod(uint64_t l) const;

  /// Textual form: "(c*L^k + ...)/(const*(1-L^-i)^m*...)", e.g. "(-1*L^-1)/1".
  std::string str() const;
  /// Form embeddable in the expression language, e.g. "L^(-1)/(1-L^(-1))".
  std::string dsl() const;
  std::string key() const { return str(); }
  static LRat parse(const std::string& text);

 private:
  LaurentPoly num_;
  std::map<int, int> den_;
  int64_t const_den_ = 1;
};

inline void PrintTo(const LRat& x, std::ostream* os) { *os << x.str(); }

/// Arithmetic modulo the Mersenne prime 2^61 - 1.
namespace modp {
inline constexpr uint64_t kPrime = (uint64_t{1} << 61) - 1;
uint64_t add(uint64_t a, uint64_t b);
uint64_t sub(uint64_t a, uint64_t b);
uint64_t mul(uint64_t a, uint64_t b);
uint64_t pow(uint64_t a, int64_t e);
uint64_t inv(uint64_t a);
uint64_t from_int(int64_t v);
}  // namespace modp

}  // namespace cef
