#include "cef/cexp.hpp"

#include <algorithm>

namespace cef {

std::string sort_name(Sort s) {
  switch (s) {
    case Sort::VF: return "vf";
    case Sort::Res: return "res";
    case Sort::Int: return "int";
  }
  return "";
}

PresAtom pres_cmp(const LinForm& lhs, CmpOp op, const LinForm& rhs) {
  LinForm d = lhs - rhs;
  switch (op) {
    case CmpOp::Eq: return PresAtom::eq(d);
    case CmpOp::Ne: return PresAtom::ne(d);
    case CmpOp::Le: return PresAtom::le(d);
    case CmpOp::Lt: return PresAtom::lt(d);
    case CmpOp::Ge: return PresAtom::le(-d);
    case CmpOp::Gt: return PresAtom::lt(-d);
  }
  return PresAtom::eq(d);
}

CondAtom ord_cmp(const VTerm& v, CmpOp op, const LinForm& rhs) {
  if (v.is_zero()) throw std::invalid_argument("ord of the zero term");
  if (auto m = v.as_monomial()) return pres_cmp(m->second.ord(), op, rhs);
  return OrdCmp{v, pres_cmp(LinForm::var(kOrdSlot), op, rhs)};
}

CondAtom ac_eq(const VTerm& v, const RTerm& r, bool neq) { return ResCmp{RTerm::ac(v) - r, neq}; }

CondAtom res_cmp(const RTerm& r, bool neq) { return ResCmp{r, neq}; }

CExp CExp::constant(const LRat& c) {
  CExp e;
  if (!c.is_zero()) {
    CExpTerm t;
    t.coeff = c;
    e.terms.push_back(t);
  }
  return e;
}

CExp CExp::from_term(CExpTerm t, std::map<std::string, Sort> ctx) {
  CExp e;
  e.terms.push_back(std::move(t));
  e.ctx = std::move(ctx);
  return e;
}

namespace {

struct CondResult {
  Truth truth = Truth::Open;
  CondAtom atom;
};

// Value of an atom about ord(0) = +infinity.
Truth ord_infinite(const PresAtom& a) {
  Rational c = a.f.coeff(kOrdSlot);
  switch (a.op) {
    case PresOp::Le:
    case PresOp::Lt: return c.sign() > 0 ? Truth::False : Truth::True;
    case PresOp::Eq:
    case PresOp::Cong: return Truth::False;
    case PresOp::Ne: return Truth::True;
  }
  return Truth::Open;
}

CondResult normalize_cond(const CondAtom& c) {
  return std::visit(
      [](const auto& a) -> CondResult {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, OrdCmp>) {
          if (a.v.is_zero()) return {ord_infinite(a.atom), a};
          if (auto m = a.v.as_monomial()) {
            PresAtom p = a.atom;
            p.f = p.f.substitute(kOrdSlot, m->second.ord());
            Truth t = normalize_atom(p);
            return {t, p};
          }
          OrdCmp o = a;
          // ord is invariant under unit scaling; fix the leading coefficient.
          o.v = VTerm(o.v.terms().rbegin()->second.inverse()) * o.v;
          Truth t = normalize_atom(o.atom);
          if (t == Truth::Open && !o.atom.mentions(kOrdSlot)) return {t, o.atom};
          return {t, o};
        } else if constexpr (std::is_same_v<T, PresAtom>) {
          PresAtom p = a;
          Truth t = normalize_atom(p);
          return {t, p};
        } else if constexpr (std::is_same_v<T, ResCmp>) {
          if (auto k = a.r.as_constant()) {
            // Nonzero rational constants are units.
            bool zero = k->is_zero();
            return {(zero != a.neq) ? Truth::True : Truth::False, a};
          }
          return {Truth::Open, ResCmp{a.r.monic(), a.neq}};
        } else if constexpr (std::is_same_v<T, CosetIn>) {
          if (a.v.is_zero() || a.lambda.is_zero()) return {Truth::False, a};
          if (a.m == 1) return {Truth::True, a};
          return {Truth::Open, a};
        } else {
          if (a.m == 1) return {Truth::Open, ResCmp{a.r.monic(), true}};
          if (a.r.is_zero()) return {Truth::False, a};
          if (auto k = a.r.as_constant(); k && *k == Rational(1)) return {Truth::True, a};
          return {Truth::Open, a};
        }
      },
      c);
}

}  // namespace

std::optional<CExpTerm> normalize_term(CExpTerm t) {
  if (t.coeff.is_zero()) return std::nullopt;
  if (t.lexp.constant.is_integer() && !t.lexp.constant.is_zero()) {
    t.coeff = t.coeff.shift(static_cast<int>(t.lexp.constant.num()));
    t.lexp.constant = Rational(0);
  }
  std::vector<std::pair<std::string, CondAtom>> keyed;
  for (const auto& c : t.conds) {
    auto r = normalize_cond(c);
    if (r.truth == Truth::False) return std::nullopt;
    if (r.truth == Truth::True) continue;
    keyed.emplace_back(cond_str(r.atom), r.atom);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  t.conds.clear();
  for (size_t i = 0; i < keyed.size(); ++i)
    if (i == 0 || keyed[i].first != keyed[i - 1].first) t.conds.push_back(keyed[i].second);
  std::sort(t.sums.begin(), t.sums.end());
  t.sums.erase(std::unique(t.sums.begin(), t.sums.end()), t.sums.end());
  if (!maybe_satisfiable(pres_part(t))) return std::nullopt;
  return t;
}

namespace {

constexpr size_t kMaxPermutedSums = 6;

CExpTerm rename_sums(const CExpTerm& t, const std::vector<std::string>& order, const std::vector<std::string>& to) {
  CExpTerm r = t;
  // Two passes so that a target name equal to another source name is safe.
  std::vector<std::string> mid;
  for (size_t i = 0; i < order.size(); ++i) {
    mid.push_back("\x01" + std::to_string(i));
    r = substitute_res(r, order[i], RTerm::var(mid.back()));
  }
  for (size_t i = 0; i < order.size(); ++i) r = substitute_res(r, mid[i], RTerm::var(to[i]));
  r.sums = to;
  return r;
}

// The bound-variable order giving the least key, with the key.
std::pair<std::vector<std::string>, std::string> alpha_order(const CExpTerm& t, const std::vector<std::string>& to) {
  std::vector<std::string> order = t.sums;
  std::sort(order.begin(), order.end());
  std::pair<std::vector<std::string>, std::string> best;
  bool first = true;
  do {
    auto n = normalize_term(rename_sums(t, order, to));
    std::string k = n ? term_key(*n) : "";
    if (first || k < best.second) best = {order, k};
    first = false;
  } while (order.size() <= kMaxPermutedSums && std::next_permutation(order.begin(), order.end()));
  return best;
}

std::vector<std::string> placeholder_names(size_t n) {
  std::vector<std::string> v;
  for (size_t i = 0; i < n; ++i) v.push_back("\x02" + std::to_string(i));
  return v;
}

}  // namespace

std::string alpha_key(const CExpTerm& t) {
  if (t.sums.empty()) return term_key(t);
  return alpha_order(t, placeholder_names(t.sums.size())).second;
}

CExp canonical_form(const CExp& e) {
  CExp n = normalize(e);
  std::set<std::string> used;
  for (auto& t : n.terms)
    for (auto& s : all_names(t)) used.insert(s);
  for (auto& [k, s] : n.ctx) used.insert(k);
  for (auto& t : n.terms) {
    if (t.sums.empty()) continue;
    std::vector<std::string> to;
    std::set<std::string> free_names = all_names(t);
    for (auto& s : t.sums) free_names.erase(s);
    for (size_t i = 0; i < t.sums.size(); ++i) {
      std::string f = fresh_name("_b", free_names);
      free_names.insert(f);
      to.push_back(f);
    }
    auto order = alpha_order(t, placeholder_names(t.sums.size())).first;
    t = *normalize_term(rename_sums(t, order, to));
  }
  return normalize(n);
}

std::string term_key(const CExpTerm& t) {
  std::string k = "L^(" + t.lexp.str() + ")|";
  for (auto& c : t.conds) k += cond_str(c) + ";";
  k += "|";
  for (auto& s : t.sums) k += s + ",";
  k += "|E(" + t.expArg.str() + ")|e(" + t.resExpArg.str() + ")";
  return k;
}

CExp normalize(const CExp& e) {
  std::map<std::string, CExpTerm> merged;
  for (const auto& t : e.terms) {
    auto n = normalize_term(t);
    if (!n) continue;
    std::string k = alpha_key(*n);
    auto it = merged.find(k);
    if (it == merged.end()) merged.emplace(k, *n);
    else it->second.coeff += n->coeff;
  }
  CExp out;
  out.ctx = e.ctx;
  for (auto& [k, t] : merged)
    if (!t.coeff.is_zero()) out.terms.push_back(t);
  return out;
}

namespace {

std::map<std::string, Sort> merge_ctx(const std::map<std::string, Sort>& a, const std::map<std::string, Sort>& b) {
  auto r = a;
  for (auto& [n, s] : b) {
    auto it = r.find(n);
    if (it != r.end() && it->second != s)
      throw SortError("variable " + n + " declared as both " + sort_name(it->second) + " and " + sort_name(s));
    r[n] = s;
  }
  return r;
}

}  // namespace

CExp add(const CExp& a, const CExp& b) {
  CExp r;
  r.ctx = merge_ctx(a.ctx, b.ctx);
  r.terms = a.terms;
  r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
  return normalize(r);
}

CExp scale(const CExp& a, const LRat& c) {
  CExp r = a;
  for (auto& t : r.terms) t.coeff *= c;
  return normalize(r);
}

CExp negate(const CExp& a) { return scale(a, LRat(-1)); }

CExp mul(const CExp& a, const CExp& b, bool rename) {
  CExp r;
  r.ctx = merge_ctx(a.ctx, b.ctx);
  for (const auto& ta : a.terms)
    for (const auto& tb0 : b.terms) {
      CExpTerm tb = tb0;
      std::set<std::string> used = all_names(ta);
      for (auto& n : all_names(tb)) used.insert(n);
      for (auto& n : r.ctx) used.insert(n.first);
      std::set<std::string> a_names = all_names(ta);
      std::set<std::string> b_free = all_names(tb);
      for (auto& s : tb.sums) b_free.erase(s);
      for (auto& s : tb0.sums) {
        bool clash = a_names.count(s) > 0;
        if (!clash) continue;
        if (!rename) throw VariableCapture("bound residue variable " + s + " collides");
        std::string f = fresh_name("_h", used);
        used.insert(f);
        tb = substitute_res(tb, s, RTerm::var(f));
        std::replace(tb.sums.begin(), tb.sums.end(), s, f);
      }
      CExpTerm ta2 = ta;
      for (auto& s : ta.sums) {
        if (!b_free.count(s)) continue;
        if (!rename) throw VariableCapture("bound residue variable " + s + " collides");
        std::string f = fresh_name("_h", used);
        used.insert(f);
        ta2 = substitute_res(ta2, s, RTerm::var(f));
        std::replace(ta2.sums.begin(), ta2.sums.end(), s, f);
      }
      CExpTerm t;
      t.coeff = ta2.coeff * tb.coeff;
      t.lexp = ta2.lexp + tb.lexp;
      t.conds = ta2.conds;
      t.conds.insert(t.conds.end(), tb.conds.begin(), tb.conds.end());
      t.sums = ta2.sums;
      t.sums.insert(t.sums.end(), tb.sums.begin(), tb.sums.end());
      t.expArg = ta2.expArg + tb.expArg;
      t.resExpArg = ta2.resExpArg + tb.resExpArg;
      r.terms.push_back(std::move(t));
    }
  return normalize(r);
}

namespace {

// ord(x) inside a linear form, after x -> repl.
LinForm subst_ord_linform(const LinForm& f, const std::string& x, const VTerm& repl) {
  std::string sym = ord_symbol(x);
  if (!f.mentions(sym)) return f;
  if (auto m = repl.as_monomial()) return f.substitute(sym, m->second.ord());
  throw NonAffineSubstitution("ord(" + x + ") occurs in a linear form and is replaced by the non-monomial " +
                              repl.str());
}

}  // namespace

CExpTerm substitute_term(const CExpTerm& t, const std::string& x, const VTerm& repl) {
  CExpTerm r = t;
  r.expArg = t.expArg.substitute(x, repl);
  r.resExpArg = t.resExpArg.substitute_vf(x, repl);
  r.lexp = subst_ord_linform(t.lexp, x, repl);
  std::string sym = ord_symbol(x);
  r.conds.clear();
  for (const auto& c : t.conds) {
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, OrdCmp>) {
            OrdCmp o{a.v.substitute(x, repl), a.atom};
            o.atom.f = subst_ord_linform(o.atom.f, x, repl);
            r.conds.push_back(o);
          } else if constexpr (std::is_same_v<T, PresAtom>) {
            if (!a.mentions(sym)) {
              r.conds.push_back(a);
            } else if (repl.as_monomial()) {
              PresAtom p = a;
              p.f = subst_ord_linform(p.f, x, repl);
              r.conds.push_back(p);
            } else {
              PresAtom p = a;
              p.f = p.f.rename(sym, kOrdSlot);
              r.conds.push_back(OrdCmp{repl, p});
            }
          } else if constexpr (std::is_same_v<T, ResCmp>) {
            r.conds.push_back(ResCmp{a.r.substitute_vf(x, repl), a.neq});
          } else if constexpr (std::is_same_v<T, CosetIn>) {
            r.conds.push_back(CosetIn{a.v.substitute(x, repl), a.lambda.substitute(x, repl), a.m});
          } else {
            r.conds.push_back(PowRes{a.r.substitute_vf(x, repl), a.m});
          }
        },
        c);
  }
  return r;
}

CExp substitute(const CExp& e, const std::string& x, const VTerm& repl) {
  CExp r;
  r.ctx = e.ctx;
  for (auto& v : repl.vars())
    if (!r.ctx.count(v)) r.ctx[v] = Sort::VF;
  for (const auto& t : e.terms) r.terms.push_back(substitute_term(t, x, repl));
  if (!repl.mentions(x)) r.ctx.erase(x);
  return normalize(r);
}

CExpTerm substitute_res(const CExpTerm& t, const std::string& name, const RTerm& repl) {
  CExpTerm r = t;
  r.resExpArg = t.resExpArg.substitute(name, repl);
  for (auto& c : r.conds) {
    if (auto* rc = std::get_if<ResCmp>(&c)) rc->r = rc->r.substitute(name, repl);
    if (auto* pr = std::get_if<PowRes>(&c)) pr->r = pr->r.substitute(name, repl);
  }
  return r;
}

CExpTerm substitute_int(const CExpTerm& t, const std::string& j, const LinForm& repl) {
  CExpTerm r = t;
  r.lexp = t.lexp.substitute(j, repl);
  for (auto& c : r.conds) {
    if (auto* p = std::get_if<PresAtom>(&c)) p->f = p->f.substitute(j, repl);
    if (auto* o = std::get_if<OrdCmp>(&c)) o->atom.f = o->atom.f.substitute(j, repl);
  }
  return r;
}

CExp rename(const CExp& e, const std::string& from, const std::string& to) {
  auto it = e.ctx.find(from);
  if (it == e.ctx.end()) return e;
  Sort s = it->second;
  CExp r;
  r.ctx = e.ctx;
  r.ctx.erase(from);
  r.ctx[to] = s;
  for (const auto& t : e.terms) {
    switch (s) {
      case Sort::VF: r.terms.push_back(substitute_term(t, from, VTerm::var(to))); break;
      case Sort::Res: r.terms.push_back(substitute_res(t, from, RTerm::var(to))); break;
      case Sort::Int: r.terms.push_back(substitute_int(t, from, LinForm::var(to))); break;
    }
  }
  return normalize(r);
}

namespace {

void linform_names(const LinForm& f, std::set<std::string>* vf, std::set<std::string>* in) {
  for (auto& [k, c] : f.coef) {
    if (k == kOrdSlot) continue;
    if (auto v = ord_symbol_var(k)) {
      if (vf) vf->insert(*v);
    } else if (in) {
      in->insert(k);
    }
  }
}

void collect(const CExpTerm& t, std::set<std::string>* vf, std::set<std::string>* res, std::set<std::string>* in) {
  auto add_all = [](std::set<std::string>* s, const std::set<std::string>& x) {
    if (s) s->insert(x.begin(), x.end());
  };
  add_all(vf, t.expArg.vars());
  add_all(vf, t.resExpArg.vf_vars());
  add_all(res, t.resExpArg.res_vars());
  linform_names(t.lexp, vf, in);
  for (const auto& c : t.conds) {
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, OrdCmp>) {
            add_all(vf, a.v.vars());
            linform_names(a.atom.f, vf, in);
          } else if constexpr (std::is_same_v<T, PresAtom>) {
            linform_names(a.f, vf, in);
          } else if constexpr (std::is_same_v<T, CosetIn>) {
            add_all(vf, a.v.vars());
            add_all(vf, a.lambda.vars());
          } else {
            add_all(vf, a.r.vf_vars());
            add_all(res, a.r.res_vars());
          }
        },
        c);
  }
  if (res)
    for (auto& s : t.sums) res->erase(s);
}

}  // namespace

std::set<std::string> free_vf(const CExpTerm& t) {
  std::set<std::string> s;
  collect(t, &s, nullptr, nullptr);
  return s;
}

std::set<std::string> free_res(const CExpTerm& t) {
  std::set<std::string> s;
  collect(t, nullptr, &s, nullptr);
  return s;
}

std::set<std::string> free_int(const CExpTerm& t) {
  std::set<std::string> s;
  collect(t, nullptr, nullptr, &s);
  return s;
}

std::set<std::string> all_names(const CExpTerm& t) {
  std::set<std::string> s;
  collect(t, &s, &s, &s);
  s.insert(t.sums.begin(), t.sums.end());
  return s;
}

std::string fresh_name(const std::string& prefix, const std::set<std::string>& used) {
  for (int i = 1;; ++i) {
    std::string n = prefix + std::to_string(i);
    if (!used.count(n)) return n;
  }
}

PresConj pres_part(const CExpTerm& t) {
  PresConj c;
  for (const auto& a : t.conds)
    if (auto* p = std::get_if<PresAtom>(&a)) c.push_back(*p);
  return c;
}

}  // namespace cef
