#include "cef/integrate.hpp"

#include <algorithm>

#include "cef/cells.hpp"
#include "cef/dsl.hpp"
#include "cef/rewrite.hpp"

namespace cef {

namespace {

bool cond_mentions(const CondAtom& c, const std::string& var) {
  const std::string s = ord_symbol(var);
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, PresAtom>) {
          return a.f.mentions(s);
        } else if constexpr (std::is_same_v<T, OrdCmp>) {
          return a.v.mentions(var) || a.atom.f.mentions(s);
        } else if constexpr (std::is_same_v<T, CosetIn>) {
          return a.v.mentions(var) || a.lambda.mentions(var);
        } else {
          return a.r.mentions_vf(var);
        }
      },
      c);
}

bool cond_mentions_int(const CondAtom& c, const std::string& j) {
  if (auto* p = std::get_if<PresAtom>(&c)) return p->f.mentions(j);
  if (auto* o = std::get_if<OrdCmp>(&c)) return o->atom.f.mentions(j);
  return false;
}

LinForm unit_order(const VTerm& u) {
  auto m = u.as_monomial();
  if (!m) throw UndeterminedUnitOrder("ord(" + u.str() + ") is not a linear form; split on it first");
  return m->second.ord();
}

CExpTerm guarded(CExpTerm t, const PresAtom& a) {
  t.conds.push_back(a);
  return t;
}

std::set<std::string> names_of(const CExp& e) {
  std::set<std::string> used;
  for (auto& [n, s] : e.ctx) used.insert(n);
  for (const auto& t : e.terms) {
    auto a = all_names(t);
    used.insert(a.begin(), a.end());
    used.insert(t.sums.begin(), t.sums.end());
  }
  return used;
}

bool has_res_cond(const CExpTerm& t, const std::string& r) {
  for (const auto& c : t.conds)
    if (auto* rc = std::get_if<ResCmp>(&c); rc && rc->neq && rc->r.monic() == RTerm::var(r)) return true;
  return false;
}

bool surely_nonzero(const CExpTerm& t, const RTerm& r) {
  if (auto k = r.as_constant()) return !k->is_zero();
  auto m = r.as_monomial();
  if (!m) return false;
  for (auto& [atom, e] : m->second) {
    bool ok = false;
    switch (atom.kind) {
      case RAtom::Kind::Var: ok = has_res_cond(t, atom.name); break;
      case RAtom::Kind::AcVar: ok = forces_nonzero(t, VTerm::var(atom.name)); break;
      case RAtom::Kind::AcOpaque: ok = forces_nonzero(t, atom.arg); break;
    }
    if (!ok) return false;
  }
  return true;
}

bool in_conds(const CExpTerm& t, const std::string& s) {
  for (const auto& c : t.conds) {
    if (auto* r = std::get_if<ResCmp>(&c); r && r->r.mentions(s)) return true;
    if (auto* q = std::get_if<PowRes>(&c); q && q->r.mentions(s)) return true;
  }
  return false;
}

// Sum over a free residue line of e(c*s + d) is L*e(d)*[c == 0]. Also drops
// terms requiring a certainly nonzero residue term to vanish.
CExp split_lines(const CExp& e, bool* changed) {
  CExp out;
  out.ctx = e.ctx;
  for (auto t : e.terms) {
    bool dead = false;
    for (const auto& c : t.conds)
      if (auto* rc = std::get_if<ResCmp>(&c); rc && !rc->neq && surely_nonzero(t, rc->r)) dead = true;
    if (dead) {
      *changed = true;
      continue;
    }
    for (const auto& s : t.sums) {
      if (in_conds(t, s) || t.resExpArg.degree(s) != 1 || t.resExpArg.has_negative_exponent(s)) continue;
      auto cs = t.resExpArg.coeffs_in(s);
      if (cs.at(1).as_constant()) continue;  // the kill rule handles it
      t.conds.push_back(ResCmp{cs.at(1), false});
      t.resExpArg = cs.count(0) ? cs.at(0) : RTerm();
      t.sums.erase(std::find(t.sums.begin(), t.sums.end(), s));
      t.coeff = t.coeff * LRat::L();
      *changed = true;
      break;
    }
    out.terms.push_back(t);
  }
  return out;
}

// Paired bounds become an equality; an equality with a unit coefficient on
// an exponent symbol fixes that symbol in the exponent.
CExpTerm tidy_term(CExpTerm t) {
  for (size_t i = 0; i < t.conds.size(); ++i) {
    auto* a = std::get_if<PresAtom>(&t.conds[i]);
    if (!a || a->op != PresOp::Le) continue;
    for (size_t j = i + 1; j < t.conds.size(); ++j) {
      auto* b = std::get_if<PresAtom>(&t.conds[j]);
      if (b && b->op == PresOp::Le && b->f == -a->f) {
        t.conds[i] = PresAtom::eq(a->f);
        t.conds.erase(t.conds.begin() + static_cast<long>(j));
        break;
      }
    }
  }
  for (const auto& c : t.conds) {
    auto* a = std::get_if<PresAtom>(&c);
    if (!a || a->op != PresOp::Eq) continue;
    for (auto& [s, k] : t.lexp.coef) {
      Rational c1 = a->f.coeff(s);
      if (c1 != Rational(1) && c1 != Rational(-1)) continue;
      LinForm sol = (-Rational(1) / c1) * a->f.without(s);
      t.lexp = t.lexp.substitute(s, sol);
      break;
    }
  }
  return t;
}

std::vector<std::string> cond_keys(const CExpTerm& t) {
  std::vector<std::string> k;
  for (const auto& c : t.conds) k.push_back(cond_str(c));
  return k;
}

// Two terms equal up to one Presburger atom each:
//   k[h <= c] - k[h <= c - m] = k[c - m < h <= c]
//   k[f <= 0] + k[f - 1 == 0] = k[f - 1 <= 0]
std::optional<CExpTerm> merge_pair(const CExpTerm& a, const CExpTerm& b) {
  if (a.conds.size() != b.conds.size() || !(a.lexp == b.lexp) || a.sums != b.sums || !(a.expArg == b.expArg) ||
      !(a.resExpArg == b.resExpArg))
    return std::nullopt;
  auto ka = cond_keys(a), kb = cond_keys(b);
  std::vector<size_t> only_a, only_b;
  for (size_t i = 0; i < ka.size(); ++i)
    if (std::find(kb.begin(), kb.end(), ka[i]) == kb.end()) only_a.push_back(i);
  for (size_t i = 0; i < kb.size(); ++i)
    if (std::find(ka.begin(), ka.end(), kb[i]) == ka.end()) only_b.push_back(i);
  if (only_a.size() != 1 || only_b.size() != 1) return std::nullopt;
  auto* x = std::get_if<PresAtom>(&a.conds[only_a[0]]);
  auto* y = std::get_if<PresAtom>(&b.conds[only_b[0]]);
  if (!x || !y) return std::nullopt;
  CExpTerm r = a;
  PresAtom& slot = std::get<PresAtom>(r.conds[only_a[0]]);
  if (x->op == PresOp::Le && y->op == PresOp::Le && b.coeff == -a.coeff) {
    LinForm d = y->f - x->f;
    if (!d.is_constant() || d.constant.is_zero()) return std::nullopt;
    // The looser bound keeps its coefficient.
    const PresAtom& loose = d.constant.sign() > 0 ? *x : *y;
    const PresAtom& tight = d.constant.sign() > 0 ? *y : *x;
    r.coeff = d.constant.sign() > 0 ? a.coeff : b.coeff;
    slot = loose;
    r.conds.push_back(PresAtom::le(LinForm(Rational(1)) - tight.f));
    return r;
  }
  if (a.coeff == b.coeff) {
    const PresAtom* le = x->op == PresOp::Le ? x : y->op == PresOp::Le ? y : nullptr;
    const PresAtom* eq = x->op == PresOp::Eq ? x : y->op == PresOp::Eq ? y : nullptr;
    if (!le || !eq) return std::nullopt;
    LinForm shifted = le->f - LinForm(Rational(1));
    if (!(eq->f == shifted) && !(eq->f == -shifted)) return std::nullopt;
    slot = PresAtom::le(shifted);
    return r;
  }
  return std::nullopt;
}

CExp tidy(const CExp& e) {
  CExp cur = e;
  for (auto& t : cur.terms) t = tidy_term(t);
  cur = normalize(cur);
  bool again = true;
  while (again) {
    again = false;
    for (size_t i = 0; i < cur.terms.size() && !again; ++i)
      for (size_t j = i + 1; j < cur.terms.size() && !again; ++j)
        if (auto m = merge_pair(cur.terms[i], cur.terms[j])) {
          cur.terms[i] = tidy_term(*m);
          cur.terms.erase(cur.terms.begin() + static_cast<long>(j));
          cur = normalize(cur);
          for (auto& t : cur.terms) t = tidy_term(t);
          cur = normalize(cur);
          again = true;
        }
  }
  return cur;
}

// Sums every term over the integer variable j.
void sum_terms_over(const std::vector<CExpTerm>& in, const std::string& j, std::vector<CExpTerm>& out,
                    IntegrationResult& res) {
  for (const auto& t0 : in) {
    // j pinned by an equality with unit coefficient: substitute, no sum.
    CExpTerm t = t0;
    bool pinned = false;
    for (size_t i = 0; i < t.conds.size() && !pinned; ++i) {
      auto* a = std::get_if<PresAtom>(&t.conds[i]);
      if (!a || a->op != PresOp::Eq) continue;
      Rational c = a->f.coeff(j);
      if (c != Rational(1) && c != Rational(-1)) continue;
      LinForm sol = (-Rational(1) / c) * a->f.without(j);
      if (!sol.is_integral()) continue;
      t.conds.erase(t.conds.begin() + static_cast<long>(i));
      t = substitute_int(t, j, sol);
      pinned = true;
    }
    if (pinned) {
      out.push_back(t);
      continue;
    }
    PresConj domain;
    std::vector<CondAtom> rest;
    for (const auto& c : t.conds) {
      if (!cond_mentions_int(c, j)) {
        rest.push_back(c);
        continue;
      }
      auto* p = std::get_if<PresAtom>(&c);
      if (!p) throw UnsupportedIntegrand("condition " + cond_str(c) + " ties " + j + " to a non-monomial order");
      domain.push_back(*p);
    }
    CExpTerm others;
    others.conds = rest;
    PresConj rest_pres = pres_part(others);
    for (const auto& b : sum_series({j, domain, t.lexp, 0})) {
      if (!b.value) {
        PresConj g = b.guard;
        g.insert(g.end(), rest_pres.begin(), rest_pres.end());
        if (maybe_satisfiable(g)) res.divergent.push_back(g);
        continue;
      }
      for (const auto& lt : *b.value) {
        CExpTerm n = t;
        n.conds = rest;
        n.conds.insert(n.conds.end(), b.guard.begin(), b.guard.end());
        n.lexp = lt.exp;
        n.coeff = t.coeff * lt.coeff;
        out.push_back(n);
      }
    }
  }
}

void finish(IntegrationResult& r) {
  r.value = simplify(r.value);
  if (!r.divergent.empty()) {
    r.status = IntegrationStatus::NonIntegrable;
    return;
  }
  r.opaque.clear();
  for (const auto& t : r.value.terms)
    if (!t.sums.empty()) r.opaque.push_back(print_term(t));
  r.status = r.opaque.empty() ? IntegrationStatus::Integrable : IntegrationStatus::PartiallySymbolic;
}

}  // namespace

CExp simplify(const CExp& e) {
  CExp cur = rewrite(e);
  for (int round = 0; round < 50; ++round) {
    bool changed = false;
    CExp next = split_lines(cur, &changed);
    if (!changed) break;
    cur = rewrite(next);
  }
  return consolidate(tidy(cur));
}

std::string status_name(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::Integrable: return "Integrable";
    case IntegrationStatus::NonIntegrable: return "NonIntegrable";
    case IntegrationStatus::PartiallySymbolic: return "PartiallySymbolic";
  }
  return "?";
}

CExp model_integral(const LinForm& j, const std::optional<RTerm>& ac_value, const VTerm& u, const VTerm& w) {
  CExpTerm base;
  base.lexp = -j - LinForm(Rational(1));
  base.expArg = w;
  if (!ac_value) base.coeff = LRat::L() - LRat(1);
  CExp out;
  if (u.is_zero()) {
    out.terms.push_back(base);
    return normalize(out);
  }
  LinForm gamma = j + unit_order(u);
  out.terms.push_back(guarded(base, pres_cmp(gamma, CmpOp::Ge, LinForm(Rational(1)))));
  CExpTerm z = guarded(base, pres_cmp(gamma, CmpOp::Eq, LinForm()));
  if (ac_value) {
    z.resExpArg = *ac_value * RTerm::ac(u);
  } else {
    // Sum of e(xi * ac u) over nonzero xi.
    z.coeff = LRat(-1);
  }
  out.terms.push_back(z);
  return normalize(out);
}

namespace {

// Thrown inside integrate_term when a parameter term d (free of the
// integration variable) must have a determined order: a non-monomial unit of
// the E argument, or a non-monomial difference of centers.
struct NeedsShift {
  VTerm d;
};

// d = a * x + c for one valued parameter x and constants a (a monomial) and c.
std::optional<std::tuple<std::string, VTerm, VTerm>> shift_of(const VTerm& d) {
  auto vs = d.vars();
  if (vs.size() != 1) return std::nullopt;
  const std::string x = *vs.begin();
  if (d.degree(x) != 1 || d.min_exponent(x) < 0) return std::nullopt;
  auto cs = d.coeffs_in(x);
  VTerm a = cs.at(1), c = cs.count(0) ? cs.at(0) : VTerm();
  if (!a.vars().empty() || !a.as_monomial() || !c.vars().empty() || c.is_zero()) return std::nullopt;
  return std::make_tuple(x, a, c);
}

void integrate_term(const CExpTerm& t, const std::string& var, const std::set<std::string>& used,
                    IntegrationResult& res) {
  std::vector<CondAtom> mine, base;
  for (const auto& c : t.conds) (cond_mentions(c, var) ? mine : base).push_back(c);
  // Affine part of the E argument and the higher-order remainder.
  VTerm affine, rest;
  for (auto& [m, c] : t.expArg.terms()) {
    int k = m.exponent(var);
    (k == 0 || k == 1 ? affine : rest) += VTerm::monomial(c, m);
  }
  std::vector<VTerm> targets = targets_of(t, var);
  if (!rest.is_zero()) targets.push_back(VTerm::var(var));
  Decomposition d;
  try {
    d = decompose(mine, targets, var, base, used);
  } catch (const UnsupportedShape& ex) {
    throw UnsupportedIntegrand(ex.what());
  } catch (const DegenerateCenters& ex) {
    auto centers = find_centers(targets, var);
    for (size_t a = 0; a < centers.size(); ++a)
      for (size_t b = a + 1; b < centers.size(); ++b) {
        VTerm diff = centers[a] - centers[b];
        if (!diff.as_monomial() && shift_of(diff)) throw NeedsShift{diff};
      }
    throw UnsupportedIntegrand(ex.what());
  }
  if (d.cells.empty()) return;
  CExp cells;
  cells.ctx = res.value.ctx;
  for (size_t k = 0; k < d.cells.size(); ++k) {
    const Cell& cell = d.cells[k];
    CExpTerm n;
    n.coeff = t.coeff;
    n.conds = base;
    n.conds.insert(n.conds.end(), cell.conds.begin(), cell.conds.end());
    n.sums = t.sums;
    n.sums.push_back(cell.ac_var);
    try {
      n.lexp = translate_linform(d, k, t.lexp);
      n.resExpArg = translate_rterm(d, k, t.resExpArg);
    } catch (const UnsupportedShape& ex) {
      throw UnsupportedIntegrand(ex.what());
    }
    // Monomials of order >= 1 on the cell do not change E; order 0 ones
    // move into the residue character.
    PresConj cp = pres_part(n);
    for (auto& [m, c] : rest.terms()) {
      VTerm h = VTerm::monomial(c, m);
      LinForm o;
      std::optional<RTerm> a;
      try {
        o = d.ord_on(k, h);
        a = d.ac_on(k, h);
      } catch (const UnsupportedShape&) {
        throw UnsupportedIntegrand("E(" + t.expArg.str() + ") is not affine in " + var);
      }
      if (implies(cp, PresAtom::le(LinForm(Rational(1)) - o))) continue;
      if (a && implies(cp, PresAtom::eq(o))) {
        n.resExpArg += *a;
        continue;
      }
      throw UnsupportedIntegrand("E(" + t.expArg.str() + ") is not affine in " + var);
    }
    auto [u, w] = prepare_affine(affine, var, d.centers[cell.center]);
    if (!u.is_zero() && !u.as_monomial() && shift_of(u)) throw NeedsShift{u};
    CExp part = model_integral(LinForm::var(cell.order_var), RTerm::var(cell.ac_var), u, w);
    for (auto pt : part.terms) {
      CExpTerm m = n;
      m.coeff = m.coeff * pt.coeff;
      m.lexp += pt.lexp;
      m.conds.insert(m.conds.end(), pt.conds.begin(), pt.conds.end());
      m.expArg = pt.expArg;
      m.resExpArg += pt.resExpArg;
      cells.terms.push_back(m);
    }
  }
  cells = simplify(cells);
  sum_terms_over(cells.terms, d.cells[0].order_var, res.value.terms, res);
}

// Integrates one term; when a parameter term a*x + c needs a determined
// order, integrates in x' = a*x + c instead and substitutes back.
void integrate_term_shifted(const CExpTerm& t, const std::string& var, std::set<std::string> used,
                            IntegrationResult& res, int depth = 0) {
  IntegrationResult part;
  part.value.ctx = res.value.ctx;
  try {
    integrate_term(t, var, used, part);
  } catch (const NeedsShift& need) {
    if (depth >= 3) throw UnsupportedIntegrand("ord(" + need.d.str() + ") is not determined");
    auto [x, a, c] = *shift_of(need.d);
    const std::string xp = fresh_name("_s", used);
    used.insert(xp);
    CExpTerm moved = substitute_term(t, x, (VTerm::var(xp) - c) * a.pow(-1));
    IntegrationResult inner;
    inner.value.ctx = res.value.ctx;
    integrate_term_shifted(moved, var, used, inner, depth + 1);
    try {
      part.value = substitute(simplify(inner.value), xp, need.d);
    } catch (const std::invalid_argument& ex) {
      throw UnsupportedIntegrand(std::string("shifting back ") + xp + " -> " + need.d.str() + ": " + ex.what());
    }
    const std::string sym = ord_symbol(xp);
    for (auto conj : inner.divergent) {
      // The guard is kept as a superset of the divergence locus.
      conj.erase(std::remove_if(conj.begin(), conj.end(), [&](const PresAtom& at) { return at.mentions(sym); }),
                 conj.end());
      part.divergent.push_back(conj);
    }
  }
  res.value.terms.insert(res.value.terms.end(), part.value.terms.begin(), part.value.terms.end());
  res.divergent.insert(res.divergent.end(), part.divergent.begin(), part.divergent.end());
}

}  // namespace

IntegrationResult integrate_vf(const CExp& e0, const std::string& var) {
  CExp e = simplify(e0);
  IntegrationResult res;
  res.value.ctx = e.ctx;
  res.value.ctx.erase(var);
  const std::set<std::string> used = names_of(e);
  for (const auto& t : e.terms) integrate_term_shifted(t, var, used, res);
  finish(res);
  return res;
}

CExp sum_res(const CExp& e, const std::string& var) {
  CExp out;
  out.ctx = e.ctx;
  out.ctx.erase(var);
  std::set<std::string> used = names_of(e);
  for (auto t : e.terms) {
    std::string name = var;
    if (std::find(t.sums.begin(), t.sums.end(), var) != t.sums.end()) {
      // var is shadowed here, so the term does not depend on it.
      name = fresh_name("_eta", used);
      used.insert(name);
    }
    if (t.resExpArg.degree(name) > 1 || t.resExpArg.has_negative_exponent(name))
      throw NonAffineResidueArgument("e(" + t.resExpArg.str() + ") is not affine in " + var);
    t.sums.push_back(name);
    out.terms.push_back(t);
  }
  return simplify(out);
}

IntegrationResult sum_int(const CExp& e0, const std::string& var) {
  CExp e = simplify(e0);
  IntegrationResult res;
  res.value.ctx = e.ctx;
  res.value.ctx.erase(var);
  sum_terms_over(e.terms, var, res.value.terms, res);
  finish(res);
  return res;
}

std::optional<Sort> sort_of(const CExp& e, const std::string& name) {
  if (auto it = e.ctx.find(name); it != e.ctx.end()) return it->second;
  for (const auto& t : e.terms) {
    if (free_vf(t).count(name)) return Sort::VF;
    if (free_res(t).count(name)) return Sort::Res;
    if (free_int(t).count(name)) return Sort::Int;
  }
  return std::nullopt;
}

IntegrationResult integrate_all(const CExp& e, const std::vector<std::string>& order) {
  IntegrationResult res;
  res.value = e;
  for (const auto& v : order) {
    auto s = sort_of(res.value, v);
    // A name that occurs nowhere is integrated as a valued variable.
    switch (s.value_or(Sort::VF)) {
      case Sort::VF: {
        auto r = integrate_vf(res.value, v);
        res.value = r.value;
        res.divergent.insert(res.divergent.end(), r.divergent.begin(), r.divergent.end());
        break;
      }
      case Sort::Res: res.value = sum_res(res.value, v); break;
      case Sort::Int: {
        auto r = sum_int(res.value, v);
        res.value = r.value;
        res.divergent.insert(res.divergent.end(), r.divergent.begin(), r.divergent.end());
        break;
      }
    }
    if (!res.divergent.empty()) break;
  }
  finish(res);
  return res;
}

CExp change_of_variables_affine(const CExp& e, const std::string& t, const std::string& s, const VTerm& u,
                                const VTerm& c, const VTerm& w) {
  LinForm ou = unit_order(u);
  CExp r = substitute(e, t, u * (VTerm::var(s) - c) + w);
  for (auto& term : r.terms) term.lexp = term.lexp - ou;
  r.ctx.erase(t);
  r.ctx[s] = Sort::VF;
  return normalize(r);
}

}  // namespace cef
