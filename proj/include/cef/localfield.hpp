#pragma once

// Q_p and F_p((t)) at finite precision.

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cef/rational.hpp"

namespace cef {

class InsufficientPrecision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroAtPrecision : public InsufficientPrecision {
 public:
  using InsufficientPrecision::InsufficientPrecision;
};

class HenselCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FieldKind { PadicQ, LaurentF };

struct LocalField {
  FieldKind kind = FieldKind::PadicQ;
  int64_t p = 5;
  /// Relative digits kept for exactly known constants.
  int exact_digits = 24;

  LocalField() = default;
  LocalField(FieldKind k, int64_t prime);
  std::string name() const;
};

bool is_prime(int64_t n);

/// An element known modulo w^prec, with w = p or t. Nonzero elements carry
/// their valuation and leading digits; an element that is zero at its
/// precision only records prec (its ord is at least prec).
class Element {
 public:
  Element() = default;
  static Element zero(const LocalField& K, int64_t prec);
  static Element from_int(const LocalField& K, int64_t n);
  /// Throws std::domain_error if the rational is not defined in K (a
  /// denominator divisible by p in F_p((t))).
  static Element from_rational(const LocalField& K, const Rational& r);
  static Element uniformizer(const LocalField& K, int64_t k = 1);
  /// w^v * (d0 + d1 w + ...), known modulo w^(v + digits.size()).
  static Element from_digits(const LocalField& K, int64_t v, const std::vector<int64_t>& digits);
  /// "v=2 digits=[3,0,1]".
  static Element parse(const LocalField& K, const std::string& text);

  const LocalField& field() const { return K_; }
  bool is_zero() const { return d_.empty(); }
  int64_t prec() const { return v_ + static_cast<int64_t>(d_.size()); }
  const std::vector<int64_t>& digits() const { return d_; }
  /// Valuation; throws ZeroAtPrecision.
  int64_t ord() const;
  /// Leading digit; throws ZeroAtPrecision.
  int64_t ac() const;
  /// Lower bound for ord (the precision for zero elements).
  int64_t ord_lower() const { return v_; }
  /// Coefficient of w^i; throws InsufficientPrecision beyond prec.
  int64_t digit_at(int64_t i) const;
  /// Same element known only modulo w^prec.
  Element truncated(int64_t prec) const;

  Element operator-() const;
  friend Element operator+(const Element& a, const Element& b);
  friend Element operator-(const Element& a, const Element& b);
  friend Element operator*(const Element& a, const Element& b);
  Element inverse() const;
  Element pow(int64_t n) const;

  std::string str() const;

 private:
  LocalField K_;
  int64_t v_ = 0;
  std::vector<int64_t> d_;

  static Element normalized(const LocalField& K, int64_t lo, std::vector<int64_t> digits, int64_t prec);
};

/// psi_c(x) = psi_can(x) * psi_0(c x); psi_can restricted to the valuation
/// ring is exp(2 pi i xbar / p), psi_0 is trivial on the valuation ring.
struct Character {
  LocalField K;
  Element twist;  // ord >= 0; zero means the canonical character

  explicit Character(const LocalField& field) : K(field), twist(Element::zero(field, 1 << 20)) {}
  Character(const LocalField& field, const Element& c);
};

std::complex<double> psi(const Character& ch, const Element& x);

/// All twists c mod w^depth (p^depth characters), canonical first.
std::vector<Character> character_family(const LocalField& K, int depth);

/// Residue exp(2 pi i r / p).
std::complex<double> res_char(int64_t r, int64_t p);

/// Smallest e with 1 + w^e R contained in the m-th powers; throws
/// HenselCapExceeded when no such e exists below the cap.
int hensel_exponent(const LocalField& K, int64_t m, int cap = 8);
/// x in lambda * P_m (nonzero m-th powers).
bool in_coset(const Element& x, const Element& lambda, int64_t m);

}  // namespace cef
