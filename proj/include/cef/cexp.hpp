#pragma once

// Constructible exponential functions: sums of
//   coeff * L^lexp * [conds] * E(expArg) * e(resExpArg)
// with optional residue summation variables.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cef/lring.hpp"
#include "cef/presburger.hpp"
#include "cef/terms.hpp"

namespace cef {

class SortError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class VariableCapture : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Sort { VF, Res, Int };
std::string sort_name(Sort s);

/// Placeholder symbol for ord(v) inside an OrdCmp atom.
inline const std::string kOrdSlot = "@";

/// A Presburger atom about ord(v) for a non-monomial valued term v. The atom
/// mentions ord(v) through the symbol kOrdSlot.
struct OrdCmp {
  VTerm v;
  PresAtom atom;
};

/// r == 0 (neq = false) or r != 0.
struct ResCmp {
  RTerm r;
  bool neq = false;
};

/// v in lambda * P_m, P_m the nonzero m-th powers.
struct CosetIn {
  VTerm v;
  VTerm lambda;
  int64_t m = 1;
};

/// r is a nonzero m-th power in the residue field.
struct PowRes {
  RTerm r;
  int64_t m = 1;
};

using CondAtom = std::variant<OrdCmp, ResCmp, PresAtom, CosetIn, PowRes>;

enum class CmpOp { Eq, Ne, Le, Ge, Lt, Gt };

/// ord(v) op rhs. Monomial v becomes a Presburger atom over ord symbols.
/// Throws std::invalid_argument for v = 0.
CondAtom ord_cmp(const VTerm& v, CmpOp op, const LinForm& rhs);
/// Presburger atom lhs op rhs.
PresAtom pres_cmp(const LinForm& lhs, CmpOp op, const LinForm& rhs);
/// ac(v) == r or ac(v) != r.
CondAtom ac_eq(const VTerm& v, const RTerm& r, bool neq = false);
CondAtom res_cmp(const RTerm& r, bool neq = false);

std::string cond_str(const CondAtom& c);

struct CExpTerm {
  LRat coeff{1};
  LinForm lexp;
  std::vector<CondAtom> conds;
  std::vector<std::string> sums;  // residue variables summed over the residue field
  VTerm expArg;
  RTerm resExpArg;
};

struct CExp {
  std::vector<CExpTerm> terms;
  std::map<std::string, Sort> ctx;

  static CExp constant(const LRat& c);
  static CExp from_term(CExpTerm t, std::map<std::string, Sort> ctx = {});
  bool is_zero() const { return terms.empty(); }
};

/// Structural key of a term without its coefficient.
std::string term_key(const CExpTerm& t);

/// term_key up to renaming of the bound residue variables.
std::string alpha_key(const CExpTerm& t);

/// Canonical structural form: atoms normalized, trivially false terms
/// removed, identical terms merged, terms sorted.
CExp normalize(const CExp& e);
/// normalize, with bound residue variables renamed canonically (_b1, _b2, ...), so
/// alpha-equivalent expressions print identically.
CExp canonical_form(const CExp& e);
/// Per-term canonicalization; nullopt when the term is certainly zero.
std::optional<CExpTerm> normalize_term(CExpTerm t);

CExp add(const CExp& a, const CExp& b);
CExp scale(const CExp& a, const LRat& c);
CExp negate(const CExp& a);
/// Product; bound residue variables of b are renamed on collision unless
/// rename is false, in which case VariableCapture is raised.
CExp mul(const CExp& a, const CExp& b, bool rename = true);

/// Pull-back along x -> repl for a valued variable x.
CExp substitute(const CExp& e, const std::string& x, const VTerm& repl);
CExpTerm substitute_term(const CExpTerm& t, const std::string& x, const VTerm& repl);
/// Replaces a residue variable by a residue term.
CExpTerm substitute_res(const CExpTerm& t, const std::string& r, const RTerm& repl);
/// Replaces an integer variable by a linear form.
CExpTerm substitute_int(const CExpTerm& t, const std::string& j, const LinForm& repl);
CExp rename(const CExp& e, const std::string& from, const std::string& to);

/// Names occurring free in a term, by sort.
std::set<std::string> free_vf(const CExpTerm& t);
std::set<std::string> free_res(const CExpTerm& t);
std::set<std::string> free_int(const CExpTerm& t);
std::set<std::string> all_names(const CExpTerm& t);

/// Smallest prefix+N not in used.
std::string fresh_name(const std::string& prefix, const std::set<std::string>& used);

/// Presburger atoms of a term (ord-symbol and integer constraints).
PresConj pres_part(const CExpTerm& t);

}  // namespace cef
