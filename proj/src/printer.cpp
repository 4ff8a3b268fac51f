#include <sstream>

#include "cef/dsl.hpp"

namespace cef {

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

// Prints f op 0 as "g op' c" with the variable part on the left and a
// positive leading coefficient.
std::string pres_str(const PresAtom& a) {
  LinForm g = a.f;
  Rational c = -g.constant;
  g.constant = Rational(0);
  if (g.coef.empty()) return a.str();
  if (a.op == PresOp::Cong) {
    LinForm f = a.f;
    return f.str() + " == " + std::to_string(a.residue) + " mod " + std::to_string(a.modulus);
  }
  bool flip = g.coef.begin()->second.sign() < 0;
  if (flip) {
    g = -g;
    c = -c;
  }
  std::string op;
  switch (a.op) {
    case PresOp::Le: op = flip ? ">=" : "<="; break;
    case PresOp::Lt: op = flip ? ">" : "<"; break;
    case PresOp::Eq: op = "=="; break;
    case PresOp::Ne: op = "!="; break;
    default: break;
  }
  return g.str() + " " + op + " " + c.str();
}

}  // namespace

std::string cond_str(const CondAtom& c) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, OrdCmp>) {
          return replace_all(pres_str(a.atom), kOrdSlot, "ord(" + a.v.str() + ")");
        } else if constexpr (std::is_same_v<T, PresAtom>) {
          return pres_str(a);
        } else if constexpr (std::is_same_v<T, ResCmp>) {
          return a.r.str() + (a.neq ? " != 0" : " == 0");
        } else if constexpr (std::is_same_v<T, CosetIn>) {
          return a.v.str() + " in " + a.lambda.str() + " P " + std::to_string(a.m);
        } else {
          return a.r.str() + " in P " + std::to_string(a.m);
        }
      },
      c);
}

std::string print_term(const CExpTerm& t) {
  std::vector<std::string> f;
  bool other = !t.lexp.coef.empty() || !t.lexp.constant.is_zero() || !t.conds.empty() || !t.expArg.is_zero() ||
               !t.resExpArg.is_zero();
  if (!t.coeff.is_one() || !other) f.push_back(t.coeff.dsl());
  if (!t.lexp.coef.empty() || !t.lexp.constant.is_zero()) f.push_back("L^(" + t.lexp.str() + ")");
  if (!t.conds.empty()) {
    std::string s = "[";
    for (size_t i = 0; i < t.conds.size(); ++i) {
      if (i) s += ", ";
      s += cond_str(t.conds[i]);
    }
    f.push_back(s + "]");
  }
  if (!t.expArg.is_zero()) f.push_back("E(" + t.expArg.str() + ")");
  if (!t.resExpArg.is_zero()) f.push_back("e(" + t.resExpArg.str() + ")");
  std::string body;
  for (size_t i = 0; i < f.size(); ++i) {
    if (i) body += " * ";
    body += f[i];
  }
  if (t.sums.empty()) return body;
  std::string head = "sum ";
  for (size_t i = 0; i < t.sums.size(); ++i) {
    if (i) head += ", ";
    head += t.sums[i];
  }
  return head + " : " + body;
}

std::string print_expr(const CExp& e) {
  if (e.terms.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < e.terms.size(); ++i) {
    if (i) s += " + ";
    s += print_term(e.terms[i]);
  }
  return s;
}

std::string print(const CExp& e) {
  std::ostringstream os;
  for (Sort s : {Sort::VF, Sort::Res, Sort::Int}) {
    bool first = true;
    for (auto& [n, so] : e.ctx) {
      if (so != s) continue;
      os << (first ? sort_name(s) + " " : ", ") << n;
      first = false;
    }
    if (!first) os << "; ";
  }
  os << print_expr(e);
  return os.str();
}

}  // namespace cef
