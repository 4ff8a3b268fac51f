#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "cef/rewrite.hpp"

namespace cef {

namespace {

constexpr int64_t kNegInf = INT64_MIN;
constexpr int64_t kPosInf = INT64_MAX;

// Solution set of the atoms on one symbol: [lo, hi] minus holes.
struct Range {
  int64_t lo = kNegInf;
  int64_t hi = kPosInf;
  std::set<int64_t> holes;
  bool empty = false;

  bool contains(int64_t v) const { return !empty && v >= lo && v <= hi && !holes.count(v); }
};

bool only_mentions(const PresAtom& a, const std::string& s) { return a.f.coef.size() == 1 && a.f.mentions(s); }

// [ac(x)^k * c != 0] with s = ord(x): true wherever ord(x) is finite, so it is
// dropped when consolidating in s (the functions then agree off x = 0).
bool finite_order_cond(const CondAtom& c, const std::string& s) {
  auto* r = std::get_if<ResCmp>(&c);
  auto x = ord_symbol_var(s);
  if (!r || !r->neq || !x) return false;
  auto m = r->r.as_monomial();
  if (!m || m->second.size() != 1) return false;
  const RAtom& a = m->second.begin()->first;
  return a.kind == RAtom::Kind::AcVar && a.name == *x;
}

bool on_symbol(const CondAtom& c, const std::string& s) {
  if (auto* a = std::get_if<PresAtom>(&c)) return a->mentions(s);
  return finite_order_cond(c, s);
}

// nullopt when an atom on s is not a bound, equation or exclusion in s alone.
std::optional<Range> range_of(const CExpTerm& t, const std::string& s) {
  Range r;
  for (const auto& c : t.conds) {
    auto* a = std::get_if<PresAtom>(&c);
    if (!a || !a->mentions(s)) continue;
    if (!only_mentions(*a, s) || a->op == PresOp::Cong) return std::nullopt;
    Rational k = a->f.coeff(s), c0 = a->f.constant;
    Rational x = -c0 / k;  // a: k*s + c0 op 0, root x
    switch (a->op) {
      case PresOp::Le:
      case PresOp::Lt: {
        bool strict = a->op == PresOp::Lt;
        if (k.sign() > 0) {
          int64_t h = strict && x.is_integer() ? x.num() - 1 : x.floor();
          r.hi = std::min(r.hi, h);
        } else {
          int64_t l = strict && x.is_integer() ? x.num() + 1 : x.ceil();
          r.lo = std::max(r.lo, l);
        }
        break;
      }
      case PresOp::Eq:
        if (!x.is_integer()) r.empty = true;
        else {
          r.lo = std::max(r.lo, x.num());
          r.hi = std::min(r.hi, x.num());
        }
        break;
      case PresOp::Ne:
        if (x.is_integer()) r.holes.insert(x.num());
        break;
      case PresOp::Cong: break;
    }
  }
  if (r.lo != kNegInf && r.hi != kPosInf && r.lo > r.hi) r.empty = true;
  return r;
}

std::string group_key(const CExpTerm& t, const std::string& s) {
  std::vector<std::string> cs;
  for (const auto& c : t.conds)
    if (!on_symbol(c, s)) cs.push_back(cond_str(c));
  std::sort(cs.begin(), cs.end());
  std::ostringstream os;
  for (const auto& c : cs) os << c << ";";
  os << "|";
  for (const auto& x : t.sums) os << x << ",";
  os << "|" << t.expArg.str() << "|" << t.resExpArg.str() << "|" << t.lexp.without(s).str();
  return os.str();
}

using SlopeMap = std::map<Rational, LRat>;

struct Piece {
  int64_t lo, hi;
  SlopeMap sums;
};

CExp consolidate_symbol(const CExp& e, const std::string& s) {
  std::map<std::string, std::vector<size_t>> groups;
  std::vector<std::optional<Range>> ranges(e.terms.size());
  std::vector<bool> keep(e.terms.size(), true);
  for (size_t i = 0; i < e.terms.size(); ++i) {
    ranges[i] = range_of(e.terms[i], s);
    if (ranges[i]) groups[group_key(e.terms[i], s)].push_back(i);
  }
  CExp out;
  out.ctx = e.ctx;
  for (auto& [key, idx] : groups) {
    bool uses = false;
    std::set<int64_t> crit;
    for (size_t i : idx) {
      const Range& r = *ranges[i];
      for (const auto& c : e.terms[i].conds) uses = uses || finite_order_cond(c, s);
      uses = uses || e.terms[i].lexp.mentions(s) || r.lo != kNegInf || r.hi != kPosInf || !r.holes.empty() || r.empty;
      if (r.empty) continue;
      if (r.lo != kNegInf) crit.insert(r.lo);
      if (r.hi != kPosInf) crit.insert(r.hi);
      crit.insert(r.holes.begin(), r.holes.end());
    }
    if (!uses) continue;
    if (idx.size() == 1) {
      // A lone term is only rebuilt to drop redundant atoms on s.
      const Range& r = *ranges[idx[0]];
      size_t atoms = 0, needed = r.holes.size() + (r.lo != kNegInf) + (r.hi != kPosInf);
      if (r.lo == r.hi) needed = 1;
      for (const auto& c : e.terms[idx[0]].conds) {
        if (finite_order_cond(c, s)) atoms += 100;
        if (auto* a = std::get_if<PresAtom>(&c); a && a->mentions(s)) ++atoms;
      }
      if (r.empty || atoms <= needed || atoms >= 100) continue;
    }
    for (size_t i : idx) keep[i] = false;

    std::vector<Piece> pieces;
    auto add_piece = [&](int64_t lo, int64_t hi, int64_t rep) {
      Piece p{lo, hi, {}};
      for (size_t i : idx) {
        if (!ranges[i]->contains(rep)) continue;
        const CExpTerm& t = e.terms[i];
        LRat& slot = p.sums[t.lexp.coeff(s)];
        slot += t.coeff;
      }
      if (lo == hi) {
        // At a point every slope folds into the constant part.
        SlopeMap folded;
        for (auto& [slope, c] : p.sums) {
          Rational k = slope * Rational(lo);
          if (k.is_integer())
            folded[Rational(0)] += c * LRat::L(static_cast<int>(k.num()));
          else
            folded[slope] += c;
        }
        p.sums = folded;
      }
      for (auto it = p.sums.begin(); it != p.sums.end();)
        it = it->second.is_zero() ? p.sums.erase(it) : std::next(it);
      if (!pieces.empty() && pieces.back().sums == p.sums && pieces.back().hi != kPosInf)
        pieces.back().hi = hi;
      else
        pieces.push_back(p);
    };
    if (crit.empty()) {
      add_piece(kNegInf, kPosInf, 0);
    } else {
      std::vector<int64_t> pts(crit.begin(), crit.end());
      add_piece(kNegInf, pts.front() - 1, pts.front() - 1);
      for (size_t k = 0; k < pts.size(); ++k) {
        add_piece(pts[k], pts[k], pts[k]);
        int64_t next = k + 1 < pts.size() ? pts[k + 1] - 1 : kPosInf;
        if (k + 1 < pts.size() && pts[k] + 1 > next) continue;
        add_piece(pts[k] + 1, next, pts[k] + 1);
      }
    }

    const CExpTerm& tmpl = e.terms[idx.front()];
    for (const auto& p : pieces)
      for (const auto& [slope, coeff] : p.sums) {
        CExpTerm t = tmpl;
        t.coeff = coeff;
        t.conds.clear();
        for (const auto& c : tmpl.conds)
          if (!on_symbol(c, s)) t.conds.push_back(c);
        t.lexp = tmpl.lexp.without(s) + slope * LinForm::var(s);
        LinForm sym = LinForm::var(s);
        if (p.lo == p.hi) {
          t.conds.push_back(PresAtom::eq(sym - LinForm(Rational(p.lo))));
          t.lexp = t.lexp.substitute(s, LinForm(Rational(p.lo)));
        } else {
          if (p.lo != kNegInf) t.conds.push_back(PresAtom::le(LinForm(Rational(p.lo)) - sym));
          if (p.hi != kPosInf) t.conds.push_back(PresAtom::le(sym - LinForm(Rational(p.hi))));
        }
        out.terms.push_back(t);
      }
  }
  for (size_t i = 0; i < e.terms.size(); ++i)
    if (keep[i]) out.terms.push_back(e.terms[i]);
  return normalize(out);
}

// E(h) for a monomial h of the argument is 1 where ord(h) >= 1 and e(ac(h))
// where ord(h) == 0; terms whose conditions force ord(h) >= 0 are split so.
void split_term_characters(const CExpTerm& t, std::vector<CExpTerm>& out) {
  PresConj cp = pres_part(t);
  for (auto& [m, c] : t.expArg.terms()) {
    VTerm h = VTerm::monomial(c, m);
    LinForm o = m.ord();
    bool above = implies(cp, PresAtom::le(LinForm(Rational(1)) - o));
    if (!above && !implies(cp, PresAtom::le(-o))) continue;
    CExpTerm rest = t;
    rest.expArg = t.expArg - h;
    if (above) {
      split_term_characters(rest, out);
      return;
    }
    CExpTerm zero = rest;
    zero.conds.push_back(PresAtom::eq(o));
    zero.resExpArg += RTerm::ac(h);
    rest.conds.push_back(PresAtom::le(LinForm(Rational(1)) - o));
    split_term_characters(zero, out);
    split_term_characters(rest, out);
    return;
  }
  out.push_back(t);
}

}  // namespace

CExp split_characters(const CExp& e) {
  CExp out;
  out.ctx = e.ctx;
  for (const auto& t : e.terms) split_term_characters(t, out.terms);
  return normalize(out);
}

CExp pin_orders(const CExp& e, const std::string& var, int64_t max_points) {
  const std::string s = ord_symbol(var);
  CExp out;
  out.ctx = e.ctx;
  for (const auto& t : e.terms) {
    auto r = t.lexp.mentions(s) ? range_of(t, s) : std::nullopt;
    if (!r || r->lo == kNegInf || r->hi == kPosInf || r->hi - r->lo >= max_points) {
      out.terms.push_back(t);
      continue;
    }
    for (int64_t v = r->lo; v <= r->hi; ++v) {
      if (!r->contains(v)) continue;
      CExpTerm n = t;
      n.conds.clear();
      for (const auto& c : t.conds)
        if (auto* a = std::get_if<PresAtom>(&c); !a || !a->mentions(s)) n.conds.push_back(c);
      n.conds.push_back(PresAtom::eq(LinForm::var(s) - LinForm(Rational(v))));
      n.lexp = t.lexp.substitute(s, LinForm(Rational(v)));
      out.terms.push_back(n);
    }
  }
  return normalize(out);
}

CExp consolidate(const CExp& e) {
  std::set<std::string> syms;
  for (const auto& t : e.terms) {
    for (auto& [n, c] : t.lexp.coef) syms.insert(n);
    for (const auto& c : t.conds)
      if (auto* a = std::get_if<PresAtom>(&c))
        for (auto& [n, k] : a->f.coef) syms.insert(n);
  }
  CExp cur = e;
  for (const auto& s : syms) cur = consolidate_symbol(cur, s);
  return cur;
}

}  // namespace cef
