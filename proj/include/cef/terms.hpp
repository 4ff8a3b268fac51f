#pragma once

// Polynomial terms of the valued-field sort (VTerm) and of the residue sort
// (RTerm).

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "cef/presburger.hpp"
#include "cef/rational.hpp"

namespace cef {

class NonAffineSubstitution : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxVarDegree = 6;

/// w^k * prod x^e. Exponents may be negative.
struct Monomial {
  int w = 0;
  std::map<std::string, int> vars;

  int exponent(const std::string& v) const;
  bool is_one() const { return w == 0 && vars.empty(); }
  friend bool operator==(const Monomial&, const Monomial&) = default;
  friend bool operator<(const Monomial& a, const Monomial& b);
  friend Monomial operator*(const Monomial& a, const Monomial& b);
  Monomial pow(int n) const;
  /// ord(monomial) = w + sum e * ord(x).
  LinForm ord() const;
  std::string str() const;
};

/// Polynomial over valued-field variables with coefficients in Q[w, 1/w].
/// Nonzero rational constants are units: ord 0, angular component equal to
/// the constant reduced modulo p.
class VTerm {
 public:
  VTerm() = default;
  VTerm(const Rational& c);  // NOLINT(google-explicit-constructor)
  static VTerm var(const std::string& name);
  static VTerm uniformizer(int k = 1);
  static VTerm monomial(const Rational& c, const Monomial& m);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::optional<std::pair<Rational, Monomial>> as_monomial() const;
  std::optional<Rational> as_constant() const;
  bool mentions(const std::string& v) const;
  std::set<std::string> vars() const;
  int degree(const std::string& v) const;
  int min_exponent(const std::string& v) const;

  VTerm operator-() const;
  friend VTerm operator+(const VTerm& a, const VTerm& b);
  friend VTerm operator-(const VTerm& a, const VTerm& b);
  friend VTerm operator*(const VTerm& a, const VTerm& b);
  VTerm& operator+=(const VTerm& b) { return *this = *this + b; }
  /// Negative powers only for monomials.
  VTerm pow(int n) const;

  /// Coefficients of the polynomial in v; throws for negative exponents of v.
  std::map<int, VTerm> coeffs_in(const std::string& v) const;
  VTerm substitute(const std::string& v, const VTerm& repl) const;
  VTerm rename(const std::string& from, const std::string& to) const;

  friend bool operator==(const VTerm&, const VTerm&) = default;
  friend bool operator<(const VTerm& a, const VTerm& b) { return a.terms_ < b.terms_; }
  std::string str() const;

 private:
  std::map<Monomial, Rational> terms_;
};

/// Atom of a residue polynomial: a residue variable, ac(x) for a valued
/// variable x, or ac(v) for a non-monomial VTerm v (opaque).
struct RAtom {
  enum class Kind { Var, AcVar, AcOpaque };
  Kind kind = Kind::Var;
  std::string name;
  VTerm arg;

  static RAtom var(const std::string& n) { return {Kind::Var, n, {}}; }
  static RAtom ac_var(const std::string& n) { return {Kind::AcVar, n, {}}; }
  static RAtom ac_opaque(const VTerm& v) { return {Kind::AcOpaque, "", v}; }
  bool mentions_vf(const std::string& x) const;
  friend bool operator==(const RAtom&, const RAtom&) = default;
  friend bool operator<(const RAtom& a, const RAtom& b);
  std::string str() const;
};

using RMonomial = std::map<RAtom, int>;

/// Polynomial over residue atoms with rational coefficients read modulo p.
class RTerm {
 public:
  RTerm() = default;
  RTerm(const Rational& c);  // NOLINT(google-explicit-constructor)
  static RTerm var(const std::string& name);
  static RTerm atom(const RAtom& a, int e = 1);
  /// ac of a valued term: multiplicative on monomials, opaque otherwise.
  static RTerm ac(const VTerm& v);
  /// ac(v)^e.
  static RTerm ac_pow(const VTerm& v, int e);

  const std::map<RMonomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::optional<Rational> as_constant() const;
  std::optional<std::pair<Rational, RMonomial>> as_monomial() const;
  bool mentions(const std::string& res_var) const;
  bool mentions_vf(const std::string& x) const;
  std::set<std::string> res_vars() const;
  std::set<std::string> vf_vars() const;
  int degree(const std::string& res_var) const;
  bool has_negative_exponent(const std::string& res_var) const;

  RTerm operator-() const;
  friend RTerm operator+(const RTerm& a, const RTerm& b);
  friend RTerm operator-(const RTerm& a, const RTerm& b);
  friend RTerm operator*(const RTerm& a, const RTerm& b);
  RTerm& operator+=(const RTerm& b) { return *this = *this + b; }
  /// Negative powers only for monomials.
  RTerm pow(int n) const;
  /// Multiplies by the inverse of the leading coefficient (zero stays zero).
  RTerm monic() const;
  Rational leading_coeff() const;

  /// Coefficients as a polynomial in a residue variable (nonnegative exponents).
  std::map<int, RTerm> coeffs_in(const std::string& res_var) const;
  RTerm substitute(const std::string& res_var, const RTerm& repl) const;
  /// Rewrites ac atoms after the valued substitution x -> repl.
  RTerm substitute_vf(const std::string& x, const VTerm& repl) const;
  RTerm rename(const std::string& from, const std::string& to) const;
  RTerm rename_vf(const std::string& from, const std::string& to) const;

  /// Evaluates modulo p; atom values are supplied by the callback.
  int64_t eval_mod(int64_t p, const std::function<int64_t(const RAtom&)>& atom_value) const;

  friend bool operator==(const RTerm&, const RTerm&) = default;
  friend bool operator<(const RTerm& a, const RTerm& b) { return a.terms_ < b.terms_; }
  std::string str() const;

 private:
  std::map<RMonomial, Rational> terms_;
};

/// Rational constant reduced modulo p (denominator must be prime to p).
int64_t rational_mod(const Rational& c, int64_t p);
int64_t pow_mod(int64_t b, int64_t e, int64_t p);

}  // namespace cef
