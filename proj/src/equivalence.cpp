#include "cef/equivalence.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <random>
#include <sstream>

#include "cef/integrate.hpp"
#include "cef/interpret.hpp"
#include "cef/rewrite.hpp"

namespace cef {

namespace {

constexpr uint64_t kMod = (uint64_t{1} << 61) - 1;

// [ac(m) != 0] for a monomial m holds wherever the order symbols are finite,
// which is every point the box visits.
bool nonzero_on_box(const CondAtom& c) {
  auto* r = std::get_if<ResCmp>(&c);
  if (!r || !r->neq) return false;
  auto m = r->r.as_monomial();
  if (!m) return false;
  for (auto& [a, e] : m->second) {
    if (a.kind == RAtom::Kind::Var) return false;
    if (a.kind == RAtom::Kind::AcOpaque && !a.arg.as_monomial()) return false;
  }
  return true;
}

RTerm replace_atom(const RTerm& r, const RAtom& a, const RTerm& v) {
  RTerm out;
  for (auto& [m, c] : r.terms()) {
    RTerm prod(c);
    for (auto& [atom, e] : m) prod = prod * (atom == a ? v.pow(e) : RTerm::atom(atom, e));
    out += prod;
  }
  return out;
}

bool mentions_atom(const RTerm& r, const RAtom& a) {
  for (auto& [m, c] : r.terms())
    if (m.count(a)) return true;
  return false;
}

// r = k * a + rest with k constant and a absent from rest.
std::optional<std::pair<RAtom, RTerm>> linear_atom(const RTerm& r, const std::vector<std::string>& bound) {
  std::set<RAtom> atoms;
  for (auto& [m, c] : r.terms())
    for (auto& [a, e] : m) atoms.insert(a);
  for (const auto& a : atoms) {
    if (a.kind == RAtom::Kind::Var && std::find(bound.begin(), bound.end(), a.name) != bound.end()) continue;
    Rational k(0);
    bool ok = true;
    for (auto& [m, c] : r.terms()) {
      if (!m.count(a)) continue;
      if (m.size() != 1 || m.at(a) != 1) ok = false;
      k = c;
    }
    if (ok && !k.is_zero()) return std::make_pair(a, (RTerm::atom(a) * RTerm(k) - r) * RTerm(k.inverse()));
  }
  return std::nullopt;
}

// Each equation r == 0 linear in a free residue atom eliminates that atom
// from the other residue conditions and from the residue exponent.
CExpTerm eliminate_atoms(CExpTerm t) {
  for (size_t i = 0; i < t.conds.size(); ++i) {
    auto* rc = std::get_if<ResCmp>(&t.conds[i]);
    if (!rc || rc->neq) continue;
    auto la = linear_atom(rc->r, t.sums);
    if (!la) continue;
    auto& [a, v] = *la;
    for (size_t k = 0; k < t.conds.size(); ++k) {
      if (k == i) continue;
      if (auto* o = std::get_if<ResCmp>(&t.conds[k]); o && mentions_atom(o->r, a)) o->r = replace_atom(o->r, a, v);
      if (auto* o = std::get_if<PowRes>(&t.conds[k]); o && mentions_atom(o->r, a)) o->r = replace_atom(o->r, a, v);
    }
    if (mentions_atom(t.resExpArg, a)) t.resExpArg = replace_atom(t.resExpArg, a, v);
  }
  return t;
}

// [r != 0] = 1 - [r == 0], except where r != 0 holds at every finite order.
void expand_neq(const CExpTerm& t, size_t from, std::vector<CExpTerm>& out) {
  for (size_t i = from; i < t.conds.size(); ++i) {
    auto* rc = std::get_if<ResCmp>(&t.conds[i]);
    if (!rc || !rc->neq || nonzero_on_box(t.conds[i])) continue;
    CExpTerm whole = t, eq = t;
    whole.conds.erase(whole.conds.begin() + static_cast<long>(i));
    std::get<ResCmp>(eq.conds[i]).neq = false;
    eq.coeff = -eq.coeff;
    expand_neq(whole, i, out);
    expand_neq(eq, i + 1, out);
    return;
  }
  out.push_back(t);
}

// Lower bound k when the atom says exactly ord >= k.
std::optional<int64_t> lower_bound_only(const PresAtom& a) {
  if (a.f.coef.size() != 1 || !a.f.mentions(kOrdSlot)) return std::nullopt;
  std::optional<int64_t> k;
  for (int64_t v = -8; v <= 8; ++v) {
    bool in = a.eval({{kOrdSlot, v}});
    if (in && !k) k = v;
    if (!in && k) return std::nullopt;
  }
  if (!k || *k == -8) return std::nullopt;
  return k;
}

// [ord(h + c) >= k] for a monomial h and a nonzero constant c: for k <= 0 it
// is [ord(h) >= k], for k = 1 it is [ord(h) == 0, ac(h) + c == 0].
CExpTerm expand_translates(CExpTerm t) {
  std::vector<CondAtom> conds;
  for (const auto& c : t.conds) {
    auto* oc = std::get_if<OrdCmp>(&c);
    std::optional<int64_t> k = oc ? lower_bound_only(oc->atom) : std::nullopt;
    if (!k || oc->v.terms().size() != 2) {
      conds.push_back(c);
      continue;
    }
    auto it = oc->v.terms().begin();
    Monomial m0 = it->first, m1 = std::next(it)->first;
    Rational c0 = it->second, c1 = std::next(it)->second;
    if (!m1.is_one()) std::swap(m0, m1), std::swap(c0, c1);
    if (!m1.is_one() || m0.is_one() || *k > 1) {
      conds.push_back(c);
      continue;
    }
    LinForm o = m0.ord();
    if (*k <= 0) {
      conds.push_back(PresAtom::le(LinForm(Rational(*k)) - o));
    } else {
      conds.push_back(PresAtom::eq(o));
      conds.push_back(ResCmp{RTerm::ac(VTerm::monomial(c0, m0)) + RTerm(c1), false});
    }
  }
  t.conds = conds;
  return t;
}

CExp residue_normal_form(const CExp& d) {
  CExp out;
  out.ctx = d.ctx;
  for (const auto& t : d.terms) {
    std::vector<CExpTerm> parts;
    CExp one = split_characters(CExp::from_term(expand_translates(t)));
    for (const auto& u : one.terms) expand_neq(u, 0, parts);
    for (auto& p : parts) out.terms.push_back(eliminate_atoms(p));
  }
  return canonical_form(out);
}

std::string shape_key(const CExpTerm& t) {
  std::vector<std::string> cs;
  for (const auto& c : t.conds)
    if (!std::holds_alternative<PresAtom>(c) && !nonzero_on_box(c)) cs.push_back(cond_str(c));
  std::sort(cs.begin(), cs.end());
  std::ostringstream os;
  for (const auto& c : cs) os << c << ";";
  os << "|";
  for (const auto& s : t.sums) os << s << ",";
  os << "|" << t.expArg.str() << "|" << t.resExpArg.str();
  return os.str();
}

struct Group {
  std::vector<const CExpTerm*> terms;
  std::vector<std::string> symbols;
};

// Sum of the group modulo kMod at an assignment; nullopt if some exponent is
// not an integer there.
std::optional<uint64_t> group_value(const Group& g, const std::map<std::string, int64_t>& env, uint64_t l) {
  uint64_t acc = 0;
  for (const CExpTerm* t : g.terms) {
    bool in = true;
    for (const auto& c : t->conds)
      if (auto* p = std::get_if<PresAtom>(&c); p && !p->eval(env)) {
        in = false;
        break;
      }
    if (!in) continue;
    Rational k = t->lexp.eval(env);
    if (!k.is_integer()) return std::nullopt;
    LRat v = t->coeff * LRat::L(static_cast<int>(k.num()));
    acc = (acc + v.specialize_mod(l)) % kMod;
  }
  return acc;
}

Element random_unit_element(std::mt19937_64& rng, const LocalField& K, int64_t ord) {
  std::vector<int64_t> d(6);
  for (auto& x : d) x = static_cast<int64_t>(rng() % static_cast<uint64_t>(K.p));
  d[0] = 1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(K.p - 1));
  return Element::from_digits(K, ord, d);
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Syntactic: return "syntactically-equal";
    case Verdict::Piecewise: return "piecewise-equal";
    case Verdict::Oracle: return "semantically-equal-by-oracle";
    case Verdict::Different: return "different";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

bool vanishes_piecewise(const CExp& d, const EquivalenceOptions& opt, std::string* detail) {
  std::map<std::string, Group> groups;
  for (const auto& t : d.terms) groups[shape_key(t)].terms.push_back(&t);
  std::mt19937_64 rng(opt.seed);
  const uint64_t l = 2 + rng() % (kMod - 4);
  for (auto& [key, g] : groups) {
    std::set<std::string> syms;
    for (const CExpTerm* t : g.terms) {
      for (auto& [n, c] : t->lexp.coef) syms.insert(n);
      for (const auto& c : t->conds)
        if (auto* p = std::get_if<PresAtom>(&c))
          for (auto& [n, k] : p->f.coef) syms.insert(n);
    }
    g.symbols.assign(syms.begin(), syms.end());
    const size_t n = g.symbols.size();
    const int64_t width = 2 * opt.box + 1;
    double total = 1;
    for (size_t i = 0; i < n; ++i) total *= static_cast<double>(width);
    const bool exhaustive = total <= static_cast<double>(opt.max_box_points);
    const int64_t count = exhaustive ? static_cast<int64_t>(total) : opt.max_box_points;
    std::map<std::string, int64_t> env;
    for (int64_t s = 0; s < count; ++s) {
      int64_t code = s;
      for (size_t i = 0; i < n; ++i) {
        int64_t v = exhaustive ? code % width : static_cast<int64_t>(rng() % static_cast<uint64_t>(width));
        code /= width;
        env[g.symbols[i]] = v - opt.box;
      }
      auto v = group_value(g, env, l);
      if (v && *v != 0) {
        if (detail) {
          std::ostringstream os;
          os << "shape " << key << " does not cancel at";
          for (auto& [k, x] : env) os << " " << k << "=" << x;
          *detail = os.str();
        }
        return false;
      }
    }
  }
  return true;
}

EquivalenceReport check_equal(const CExp& a, const CExp& b, const EquivalenceOptions& opt) {
  EquivalenceReport rep;
  CExp d = simplify(add(a, negate(b)));
  if (d.is_zero()) {
    rep.verdict = Verdict::Syntactic;
    return rep;
  }
  d = residue_normal_form(d);
  std::string why;
  if (vanishes_piecewise(d, opt, &why)) {
    rep.verdict = Verdict::Piecewise;
    return rep;
  }

  std::set<std::string> vf, res, ints;
  for (const CExp* e : {&a, &b}) {
    for (auto& [n, s] : e->ctx) (s == Sort::VF ? vf : s == Sort::Res ? res : ints).insert(n);
    for (const auto& t : e->terms) {
      for (auto& x : free_vf(t)) vf.insert(x);
      for (auto& x : free_res(t)) res.insert(x);
      for (auto& x : free_int(t)) ints.insert(x);
    }
  }
  std::mt19937_64 rng(opt.seed + 1);
  int checked = 0;
  for (int64_t p : opt.primes) {
    LocalField K(FieldKind::PadicQ, p);
    Character ch(K);
    for (int s = 0; s < opt.oracle_samples; ++s) {
      Point pt;
      auto rnd = [&](int64_t lo, int64_t hi) { return lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1)); };
      for (const auto& x : vf) pt.vf[x] = random_unit_element(rng, K, rnd(-opt.box, opt.box));
      for (const auto& x : res) pt.res[x] = rnd(0, p - 1);
      for (const auto& x : ints) pt.ints[x] = rnd(-opt.box, opt.box);
      std::complex<double> va, vb;
      try {
        va = interpret(a, ch, pt);
        vb = interpret(b, ch, pt);
      } catch (const InsufficientPrecision&) {
        continue;
      }
      ++checked;
      if (std::abs(va - vb) > 1e-9 * std::max(1.0, std::abs(va))) {
        std::ostringstream os;
        os << "p=" << p << ":";
        for (auto& [x, e] : pt.vf) os << " " << x << "=" << e.str();
        for (auto& [x, v] : pt.res) os << " " << x << "=" << v;
        for (auto& [x, v] : pt.ints) os << " " << x << "=" << v;
        os << " values " << va.real() << "+" << va.imag() << "i vs " << vb.real() << "+" << vb.imag() << "i";
        rep.verdict = Verdict::Different;
        rep.detail = os.str();
        return rep;
      }
    }
  }
  rep.detail = why;
  rep.verdict = checked * 2 >= opt.oracle_samples ? Verdict::Oracle : Verdict::Unknown;
  return rep;
}

}  // namespace cef
