#pragma once

// Cell decomposition in one valued variable t for terms that factor as
// u * prod (t - c_i)^a_i over explicit centers c_i.
//
// A cell belongs to one center c and fixes, for every other center, how t
// sits relative to it (the closest-center partition with ties going to the
// lowest index). On a cell, t - c has ord j and ac xi (fresh integer and
// residue names) and every factor t - c_i has ord and ac given by a linear
// form in j and an RTerm in xi.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cef/cexp.hpp"

namespace cef {

class UnsupportedShape : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateCenters : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotAffine : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f = unit * prod (t - centers[i])^exponent.
struct Factorization {
  VTerm unit;
  std::vector<std::pair<size_t, int>> factors;
};

struct Cell {
  size_t center = 0;
  std::string order_var;  // j = ord(t - center)
  std::string ac_var;     // xi = ac(t - center), nonzero
  /// Case conditions plus the translated input conditions.
  std::vector<CondAtom> conds;
  /// ord and ac of t - c_i for every center i.
  std::vector<LinForm> factor_ord;
  std::vector<RTerm> factor_ac;
};

struct PreparedTerm {
  VTerm target;
  LinForm ord;
  std::optional<RTerm> ac;  // absent when a negative power of a non-monomial ac would be needed
};

struct Decomposition {
  std::string var;
  std::vector<VTerm> centers;
  std::vector<Cell> cells;
  /// prepared[k][i]: target i on cell k.
  std::vector<std::vector<PreparedTerm>> prepared;

  /// ord and ac of a valued term on a cell (the term must factor over the
  /// centers).
  LinForm ord_on(size_t cell, const VTerm& f) const;
  std::optional<RTerm> ac_on(size_t cell, const VTerm& f) const;
  Factorization factor(const VTerm& f) const;
};

/// conds: conditions mentioning var (others may be passed as base conditions
/// to separate centers). used: names to avoid for fresh variables.
Decomposition decompose(const std::vector<CondAtom>& conds, const std::vector<VTerm>& targets, const std::string& var,
                        const std::vector<CondAtom>& base = {}, const std::set<std::string>& used = {});

/// Centers and factorizations needed for the targets.
std::vector<VTerm> find_centers(const std::vector<VTerm>& targets, const std::string& var);

/// Conditions of a cell with every var-dependent atom rewritten through j
/// and xi. Throws UnsupportedShape for atoms outside the fragment.
std::vector<CondAtom> translate_conds(const Decomposition& d, size_t cell, const std::vector<CondAtom>& conds);
LinForm translate_linform(const Decomposition& d, size_t cell, const LinForm& f);
RTerm translate_rterm(const Decomposition& d, size_t cell, const RTerm& r);

/// g = u * (t - center) + w with u, w free of t.
std::pair<VTerm, VTerm> prepare_affine(const VTerm& g, const std::string& var, const VTerm& center);

/// VTerms whose ord or ac a term uses through var (E argument excluded).
std::vector<VTerm> targets_of(const CExpTerm& t, const std::string& var);

}  // namespace cef
