#pragma once

// Grothendieck-ring relations applied as rewrite rules.

#include <vector>

#include "cef/cexp.hpp"

namespace cef {

enum class Rule {
  Shift,     // E(g + h) = e(ac h) E(g) when ord h = 0 is forced; drop h when ord h >= 1
  Kill,      // sum over a free residue line of a nontrivial character is 0
  Line,      // a summed residue variable occurring nowhere contributes L
  ResEq,     // eliminate a summed variable fixed by a linear residue equation
  ResNeq,    // [r != 0] = 1 - [r == 0] for r linear in a summed variable
};

inline const std::vector<Rule> kDefaultRuleOrder = {Rule::Shift, Rule::ResEq, Rule::ResNeq, Rule::Kill, Rule::Line};

struct RewriteOptions {
  std::vector<Rule> order = kDefaultRuleOrder;
  int max_rounds = 200;
};

/// Applies the rules until nothing changes, normalizing after each step.
CExp rewrite(const CExp& e, const RewriteOptions& opt = {});

/// One application of a rule to every term; terms not matched are kept.
CExp apply_rule(const CExp& e, Rule r);

/// Piecewise normal form in one order or integer symbol at a time: terms that
/// differ only in their coefficient, the symbol's slope in the L exponent and
/// bounds on the symbol alone are re-split at the critical points of the
/// symbol, summed per slope, and adjacent equal pieces merged.
CExp consolidate(const CExp& e);

/// Splits terms whose L exponent depends on ord(var) into one term per value
/// when ord(var) is confined to at most max_points values.
CExp pin_orders(const CExp& e, const std::string& var, int64_t max_points = 64);

/// Rewrites E(h), h a monomial of the argument, as 1 where ord(h) >= 1 and as
/// e(ac(h)) where ord(h) == 0, splitting terms that force ord(h) >= 0.
CExp split_characters(const CExp& e);

/// True if the conditions of t force v != 0.
bool forces_nonzero(const CExpTerm& t, const VTerm& v);

}  // namespace cef
