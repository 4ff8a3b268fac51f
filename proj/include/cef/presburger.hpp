#pragma once

// Linear forms over integer variables, quantifier-free Presburger conditions,
// and closed-form summation of j^s * L^(a*j+b) over one-variable domains.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cef/lring.hpp"
#include "cef/rational.hpp"

namespace cef {

class FractionalExponent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for sums outside the supported class (polynomial degree above the
/// cap, or polynomial factors with symbolic bounds).
class UnsupportedSum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxPolyDegree = 4;

/// Symbol name used for ord of a valued variable inside linear forms.
std::string ord_symbol(const std::string& var);
/// Inverse of ord_symbol; nullopt if the name is not an ord symbol.
std::optional<std::string> ord_symbol_var(const std::string& name);

struct LinForm {
  std::map<std::string, Rational> coef;  // never stores zero
  Rational constant;

  LinForm() = default;
  LinForm(const Rational& c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  static LinForm var(const std::string& name, const Rational& c = Rational(1));

  bool is_constant() const { return coef.empty(); }
  Rational coeff(const std::string& name) const;
  bool mentions(const std::string& name) const { return coef.count(name) > 0; }
  LinForm without(const std::string& name) const;
  LinForm substitute(const std::string& name, const LinForm& value) const;
  LinForm rename(const std::string& from, const std::string& to) const;
  /// Integer-valued evaluation; throws if a variable is unassigned.
  Rational eval(const std::map<std::string, int64_t>& env) const;
  /// True if coefficients and constant are integers.
  bool is_integral() const;

  LinForm operator-() const;
  friend LinForm operator+(const LinForm& a, const LinForm& b);
  friend LinForm operator-(const LinForm& a, const LinForm& b);
  friend LinForm operator*(const Rational& k, const LinForm& a);
  LinForm& operator+=(const LinForm& b) { return *this = *this + b; }

  friend bool operator==(const LinForm&, const LinForm&) = default;
  friend bool operator<(const LinForm& a, const LinForm& b);

  std::string str() const;
};

enum class PresOp { Le, Lt, Eq, Ne, Cong };

/// f <op> 0, or f == residue (mod modulus) for Cong.
struct PresAtom {
  LinForm f;
  PresOp op = PresOp::Le;
  int64_t modulus = 0;
  int64_t residue = 0;

  static PresAtom le(const LinForm& f) { return {f, PresOp::Le}; }
  static PresAtom lt(const LinForm& f) { return {f, PresOp::Lt}; }
  static PresAtom eq(const LinForm& f) { return {f, PresOp::Eq}; }
  static PresAtom ne(const LinForm& f) { return {f, PresOp::Ne}; }
  static PresAtom cong(const LinForm& f, int64_t r, int64_t n);

  bool mentions(const std::string& name) const { return f.mentions(name); }
  bool eval(const std::map<std::string, int64_t>& env) const;
  std::string str() const;

  friend bool operator==(const PresAtom&, const PresAtom&) = default;
  friend bool operator<(const PresAtom& a, const PresAtom& b);
};

enum class Truth { True, False, Open };

/// Rewrites an atom to integer coefficients with gcd tightening; strict
/// inequalities become non-strict. Returns True/False for trivial atoms.
Truth normalize_atom(PresAtom& a);

using PresConj = std::vector<PresAtom>;

/// Disjunction of conjunctions.
struct PresCond {
  std::vector<PresConj> branches;
  bool eval(const std::map<std::string, int64_t>& env) const;
};

/// Normalizes every atom, drops trivially true ones, sorts and dedups.
/// Returns nullopt if some atom is trivially false.
std::optional<PresConj> normalize_conj(const PresConj& c);

/// False only if the conjunction certainly has no integer solution
/// (Fourier-Motzkin with integer tightening plus congruence consistency).
bool maybe_satisfiable(const PresConj& c);
/// True only if every integer solution of c satisfies a.
bool implies(const PresConj& c, const PresAtom& a);

/// Negation of an atom as a disjunction of atoms.
std::vector<PresAtom> negate(const PresAtom& a);

struct DomainPiece {
  PresConj guard;  // atoms on parameters only
  int64_t modulus = 1;
  int64_t residue = 0;
  std::optional<LinForm> lo;  // nullopt = -infinity; otherwise lo == residue mod modulus
  std::optional<LinForm> hi;  // nullopt = +infinity; otherwise hi == residue mod modulus
};

/// Splits the solution set of c in var into disjoint progressions with
/// parameter guards.
std::vector<DomainPiece> normalize_domain(const PresConj& c, const std::string& var);

struct LSumTerm {
  LRat coeff;
  LinForm exp;
  friend bool operator==(const LSumTerm&, const LSumTerm&) = default;
};
/// Sum of coeff * L^exp with exponents linear in parameters.
using LSum = std::vector<LSumTerm>;

/// Merges equal exponents and drops zero coefficients; canonical order.
LSum canonical(LSum s);

struct SumSpec {
  std::string var;
  PresConj domain;
  LinForm exponent;  // may mention var and parameters
  int s = 0;
};

struct SeriesBranch {
  PresConj guard;
  std::optional<LSum> value;  // nullopt = Divergent
};
using SeriesResult = std::vector<SeriesBranch>;

SeriesResult sum_series(const SumSpec& spec);

/// Evaluates an LSum at L = q for integer parameter values.
Rational specialize(const LSum& s, const std::map<std::string, int64_t>& env, const Rational& q);
long double specialize_approx(const LSum& s, const std::map<std::string, int64_t>& env, long double q);

struct BoxVar {
  std::string name;
  int64_t lo;
  int64_t hi;
};
/// All solutions inside the box, lexicographic in the given variable order.
std::vector<std::vector<int64_t>> enumerate(const PresCond& c, const std::vector<BoxVar>& box);

std::string str(const PresConj& c);

}  // namespace cef
