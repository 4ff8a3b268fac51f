#pragma once

// Pointwise values of constructible exponential functions over a local field.

#include <complex>
#include <map>
#include <string>

#include "cef/cexp.hpp"
#include "cef/localfield.hpp"

namespace cef {

struct Point {
  std::map<std::string, Element> vf;
  std::map<std::string, int64_t> res;
  std::map<std::string, int64_t> ints;
};

Element eval_vterm(const VTerm& v, const LocalField& K, const Point& pt);
int64_t eval_rterm(const RTerm& r, const LocalField& K, const Point& pt);
/// Throws InsufficientPrecision when the atom is not decided at the point's
/// precision.
bool eval_cond(const CondAtom& c, const LocalField& K, const Point& pt);

/// All conditions of the term; false wins over undecided.
bool conds_hold(const CExpTerm& t, const LocalField& K, const Point& pt);

/// Value of one term (summing its residue variables over F_p).
std::complex<double> interpret_term(const CExpTerm& t, const Character& ch, const Point& pt);
std::complex<double> interpret(const CExp& e, const Character& ch, const Point& pt);

/// L -> p, with ord and integer symbols read from the point.
double specialize_coeff(const CExpTerm& t, const LocalField& K, const Point& pt);

}  // namespace cef
