#include "cef/rewrite.hpp"

#include <algorithm>

#include "cef/dsl.hpp"

namespace cef {

namespace {

bool in_conds(const CExpTerm& t, const std::string& res_var) {
  for (const auto& c : t.conds) {
    if (auto* r = std::get_if<ResCmp>(&c); r && r->r.mentions(res_var)) return true;
    if (auto* p = std::get_if<PowRes>(&c); p && p->r.mentions(res_var)) return true;
  }
  return false;
}

// An atom about ord symbols that is false once ord(x) is +infinity, whatever
// the other symbols are.
bool false_at_infinity(const PresAtom& a, const std::string& sym) {
  Rational c = a.f.coeff(sym);
  if (c.is_zero()) return false;
  switch (a.op) {
    case PresOp::Eq:
    case PresOp::Cong: return true;
    case PresOp::Le:
    case PresOp::Lt:
      if (c.sign() < 0) return false;
      for (auto& [k, v] : a.f.coef)
        if (ord_symbol_var(k) && v.sign() < 0) return false;
      return true;
    case PresOp::Ne: return false;
  }
  return false;
}

bool var_nonzero(const CExpTerm& t, const std::string& x) {
  std::string sym = ord_symbol(x);
  for (const auto& c : t.conds) {
    if (auto* p = std::get_if<PresAtom>(&c); p && false_at_infinity(*p, sym)) return true;
    if (auto* r = std::get_if<ResCmp>(&c); r && r->r.mentions_vf(x)) {
      RTerm at_zero = r->r.substitute_vf(x, VTerm());
      auto k = at_zero.as_constant();
      // ac(x) = 0 would make the equation read k = 0.
      if (!r->neq && k && !k->is_zero()) return true;
      if (r->neq && r->r.as_monomial() && r->r.terms().begin()->first.size() == 1) {
        auto& atom = r->r.terms().begin()->first.begin()->first;
        if (atom.kind == RAtom::Kind::AcVar && atom.name == x) return true;
      }
    }
    if (auto* s = std::get_if<CosetIn>(&c); s && s->v == VTerm::var(x)) return true;
  }
  return false;
}

bool res_var_nonzero(const CExpTerm& t, const std::string& v) {
  if (std::find(t.sums.begin(), t.sums.end(), v) != t.sums.end()) return false;
  for (const auto& c : t.conds)
    if (auto* r = std::get_if<ResCmp>(&c); r && r->neq && r->r == RTerm::var(v)) return true;
  return false;
}

bool atom_nonzero(const CExpTerm& t, const RAtom& a) {
  switch (a.kind) {
    case RAtom::Kind::Var: return res_var_nonzero(t, a.name);
    case RAtom::Kind::AcVar: return var_nonzero(t, a.name);
    case RAtom::Kind::AcOpaque: return forces_nonzero(t, a.arg);
  }
  return false;
}

std::vector<CExpTerm> shift(const CExpTerm& t, bool* fired) {
  PresConj conj = pres_part(t);
  CExpTerm r = t;
  r.expArg = VTerm();
  for (auto& [m, c] : t.expArg.terms()) {
    VTerm h = VTerm::monomial(c, m);
    LinForm o = m.ord();
    if (implies(conj, PresAtom::le(LinForm(Rational(1)) - o))) {
      *fired = true;
    } else if (implies(conj, PresAtom::eq(o))) {
      r.resExpArg += RTerm::ac(h);
      *fired = true;
    } else {
      r.expArg += h;
    }
  }
  return {r};
}

// A bound variable occurring linearly with a constant coefficient in r.
std::optional<std::pair<std::string, Rational>> linear_bound(const CExpTerm& t, const RTerm& r) {
  for (const auto& s : t.sums) {
    if (r.degree(s) != 1 || r.has_negative_exponent(s)) continue;
    auto cs = r.coeffs_in(s);
    auto a = cs.at(1).as_constant();
    if (a && !a->is_zero()) return std::make_pair(s, *a);
  }
  return std::nullopt;
}

std::vector<CExpTerm> res_eq(const CExpTerm& t, bool* fired) {
  for (size_t i = 0; i < t.conds.size(); ++i) {
    auto* rc = std::get_if<ResCmp>(&t.conds[i]);
    if (!rc || rc->neq) continue;
    auto lb = linear_bound(t, rc->r);
    if (!lb) continue;
    auto [s, a] = *lb;
    auto cs = rc->r.coeffs_in(s);
    RTerm rest = cs.count(0) ? cs.at(0) : RTerm();
    RTerm value = rest * RTerm(-Rational(1) / a);
    CExpTerm r = t;
    r.conds.erase(r.conds.begin() + static_cast<long>(i));
    r = substitute_res(r, s, value);
    r.sums.erase(std::find(r.sums.begin(), r.sums.end(), s));
    *fired = true;
    return {r};
  }
  return {t};
}

std::vector<CExpTerm> res_neq(const CExpTerm& t, bool* fired) {
  for (size_t i = 0; i < t.conds.size(); ++i) {
    auto* rc = std::get_if<ResCmp>(&t.conds[i]);
    if (!rc || !rc->neq || !linear_bound(t, rc->r)) continue;
    CExpTerm whole = t, eq = t;
    whole.conds.erase(whole.conds.begin() + static_cast<long>(i));
    std::get<ResCmp>(eq.conds[i]).neq = false;
    eq.coeff = -eq.coeff;
    *fired = true;
    return {whole, eq};
  }
  return {t};
}

std::vector<CExpTerm> kill(const CExpTerm& t, bool* fired) {
  for (const auto& s : t.sums) {
    if (in_conds(t, s) || t.resExpArg.degree(s) != 1 || t.resExpArg.has_negative_exponent(s)) continue;
    RTerm a = t.resExpArg.coeffs_in(s).at(1);
    bool nonzero = false;
    if (auto k = a.as_constant()) {
      nonzero = !k->is_zero();
    } else if (auto m = a.as_monomial()) {
      nonzero = true;
      for (auto& [atom, e] : m->second) nonzero = nonzero && e > 0 && atom_nonzero(t, atom);
    }
    if (nonzero) {
      *fired = true;
      return {};
    }
  }
  return {t};
}

std::vector<CExpTerm> line(const CExpTerm& t, bool* fired) {
  CExpTerm r = t;
  for (const auto& s : t.sums) {
    if (in_conds(t, s) || t.resExpArg.mentions(s)) continue;
    r.sums.erase(std::find(r.sums.begin(), r.sums.end(), s));
    r.coeff = r.coeff * LRat::L();
    *fired = true;
  }
  return {r};
}

CExp apply(const CExp& e, Rule rule, bool* fired) {
  CExp out;
  out.ctx = e.ctx;
  for (const auto& t : e.terms) {
    std::vector<CExpTerm> ts;
    switch (rule) {
      case Rule::Shift: ts = shift(t, fired); break;
      case Rule::Kill: ts = kill(t, fired); break;
      case Rule::Line: ts = line(t, fired); break;
      case Rule::ResEq: ts = res_eq(t, fired); break;
      case Rule::ResNeq: ts = res_neq(t, fired); break;
    }
    out.terms.insert(out.terms.end(), ts.begin(), ts.end());
  }
  return normalize(out);
}

}  // namespace

bool forces_nonzero(const CExpTerm& t, const VTerm& v) {
  if (v.is_zero()) return false;
  if (v.as_constant()) return true;
  if (auto m = v.as_monomial()) {
    for (auto& [x, e] : m->second.vars)
      if (!var_nonzero(t, x)) return false;
    return true;
  }
  // OrdCmp stores its term scaled to leading coefficient one.
  VTerm monic = VTerm(v.terms().rbegin()->second.inverse()) * v;
  for (const auto& c : t.conds) {
    if (auto* o = std::get_if<OrdCmp>(&c); o && o->v == monic && false_at_infinity(o->atom, kOrdSlot)) return true;
    if (auto* s = std::get_if<CosetIn>(&c); s && s->v == v) return true;
  }
  return false;
}

CExp apply_rule(const CExp& e, Rule r) {
  bool fired = false;
  return apply(e, r, &fired);
}

CExp rewrite(const CExp& e, const RewriteOptions& opt) {
  CExp cur = normalize(e);
  for (int round = 0; round < opt.max_rounds; ++round) {
    bool any = false;
    for (Rule r : opt.order) {
      bool fired = false;
      cur = apply(cur, r, &fired);
      any = any || fired;
    }
    if (!any) break;
  }
  return cur;
}

}  // namespace cef
