#include "cef/oracle.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <sstream>

namespace cef {

namespace {

// Walks the coset tree of the valued variables. A coset is handed to leaf
// whole; leaf throws InsufficientPrecision when the integrand is not constant
// on it, and the coset is split along its least refined variable. Children
// are visited in increasing digit order, so the summation order is fixed.
template <class Leaf>
bool walk_cosets(const LocalField& K, const std::vector<int64_t>& vmin, int depth, const Leaf& leaf) {
  const size_t n = vmin.size();
  std::vector<std::vector<int64_t>> digits(n);
  std::vector<Element> elems(n);
  bool undecided = false;
  auto rec = [&](auto&& self) -> void {
    int64_t prec_sum = 0;
    for (size_t i = 0; i < n; ++i) {
      elems[i] = Element::from_digits(K, vmin[i], digits[i]);
      prec_sum += vmin[i] + static_cast<int64_t>(digits[i].size());
    }
    try {
      leaf(elems, prec_sum);
      return;
    } catch (const InsufficientPrecision&) {
    }
    size_t pick = n;
    for (size_t i = 0; i < n; ++i)
      if (static_cast<int>(digits[i].size()) < depth && (pick == n || digits[i].size() < digits[pick].size())) pick = i;
    if (pick == n) {
      undecided = true;
      return;
    }
    digits[pick].push_back(0);
    for (int64_t a = 0; a < K.p; ++a) {
      digits[pick].back() = a;
      self(self);
    }
    digits[pick].pop_back();
  };
  rec(rec);
  return undecided;
}

double volume(int64_t p, int64_t prec_sum) { return std::pow(static_cast<double>(p), -static_cast<double>(prec_sum)); }

Rational exact_volume(int64_t p, int64_t prec_sum) {
  Rational r(1);
  Rational base = prec_sum >= 0 ? Rational(1, p) : Rational(p);
  for (int64_t i = 0; i < std::abs(prec_sum); ++i) r *= base;
  return r;
}

// Outer enumeration over integer and residue variables of the box.
template <class F>
void for_each_discrete(const IntegrationBox& box, int64_t p, Point& pt, const F& f) {
  auto rec = [&](auto&& self, size_t k) -> void {
    if (k < box.ints.size()) {
      const auto& r = box.ints[k];
      for (int64_t v = r.lo; v <= r.hi; ++v) {
        pt.ints[r.var] = v;
        self(self, k + 1);
      }
      return;
    }
    size_t j = k - box.ints.size();
    if (j < box.res.size()) {
      for (int64_t v = 0; v < p; ++v) {
        pt.res[box.res[j]] = v;
        self(self, k + 1);
      }
      return;
    }
    f();
  };
  rec(rec, 0);
}

// Lower bound k with ord(v) >= k implied by an OrdCmp atom, if any.
std::optional<int64_t> slot_lower_bound(const PresAtom& a) {
  if (a.f.coef.size() != 1 || !a.f.mentions(kOrdSlot)) return std::nullopt;
  Rational c = a.f.coeff(kOrdSlot), k = -a.f.constant / c;  // slot op k
  if (a.op == PresOp::Eq && k.is_integer()) return k.num();
  if ((a.op == PresOp::Le || a.op == PresOp::Lt) && c.sign() < 0)
    return a.op == PresOp::Lt && k.is_integer() ? k.num() + 1 : k.ceil();
  return std::nullopt;
}

// ord(v) >= k with v = +-x + rest: ord x >= min(k, ord rest), where rest is
// bounded below monomial by monomial through variables already known to
// respect their box bounds.
bool ord_cmp_bounds(const OrdCmp& oc, const std::string& x, int64_t vmin, const std::map<std::string, int64_t>& known) {
  auto k = slot_lower_bound(oc.atom);
  if (!k || *k < vmin) return false;
  bool found = false;
  for (auto& [m, c] : oc.v.terms()) {
    if (m.vars.count(x)) {
      if (m.w != 0 || m.vars.size() != 1 || m.vars.at(x) != 1 || c.abs() != Rational(1) || found) return false;
      found = true;
      continue;
    }
    if (!c.is_integer()) return false;
    int64_t lb = m.w;
    for (auto& [y, e] : m.vars) {
      auto it = known.find(y);
      if (it == known.end() || e < 0) return false;
      lb += e * it->second;
    }
    if (lb < vmin) return false;
  }
  return found;
}

// Syntactic support check: every term must bound each box variable.
bool support_in_box(const CExp& e, const IntegrationBox& box) {
  for (const auto& t : e.terms) {
    PresConj c = pres_part(t);
    std::map<std::string, int64_t> known;
    for (const auto& r : box.vf)
      if (implies(c, PresAtom::le(LinForm(r.vmin) - LinForm::var(ord_symbol(r.var))))) known[r.var] = r.vmin;
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& r : box.vf) {
        if (known.count(r.var)) continue;
        for (const auto& a : t.conds)
          if (auto* oc = std::get_if<OrdCmp>(&a); oc && ord_cmp_bounds(*oc, r.var, r.vmin, known)) {
            known[r.var] = r.vmin;
            grew = true;
            break;
          }
      }
    }
    if (known.size() != box.vf.size()) return false;
    for (const auto& r : box.ints) {
      if (!implies(c, PresAtom::le(LinForm(r.lo) - LinForm::var(r.var)))) return false;
      if (!implies(c, PresAtom::le(LinForm::var(r.var) - LinForm(r.hi)))) return false;
    }
  }
  return true;
}

struct Pass {
  std::complex<double> value;
  std::optional<Rational> exact;
  bool undecided = false;
};

Pass run_pass(const CExp& e, const Character& ch, const IntegrationBox& box, const Point& params, int depth,
              bool want_exact) {
  const LocalField& K = ch.K;
  std::vector<int64_t> vmin;
  for (const auto& r : box.vf) vmin.push_back(r.vmin);
  Pass out;
  if (want_exact) out.exact = Rational(0);
  Point pt = params;
  for_each_discrete(box, K.p, pt, [&] {
    bool u = walk_cosets(K, vmin, depth, [&](const std::vector<Element>& xs, int64_t prec_sum) {
      for (size_t i = 0; i < xs.size(); ++i) pt.vf[box.vf[i].var] = xs[i];
      std::complex<double> v = interpret(e, ch, pt);
      std::optional<Rational> q;
      if (out.exact) q = interpret_exact(e, K, pt);
      out.value += v * volume(K.p, prec_sum);
      if (out.exact) {
        try {
          *out.exact += *q * exact_volume(K.p, prec_sum);
        } catch (const ArithmeticOverflow&) {
          out.exact.reset();
        }
      }
    });
    out.undecided = out.undecided || u;
  });
  return out;
}

bool character_free(const CExp& e) {
  for (const auto& t : e.terms)
    if (!t.expArg.is_zero() || !t.resExpArg.is_zero()) return false;
  return true;
}

int64_t residue_eval_mod(int64_t r, int64_t p) { return ((r % p) + p) % p; }

}  // namespace

AdaptiveResult adaptive_integrate(const LocalField& K, const std::vector<int64_t>& vmin, int depth,
                                  const CosetIntegrand& f) {
  AdaptiveResult out;
  out.undecided = walk_cosets(K, vmin, depth, [&](const std::vector<Element>& xs, int64_t prec_sum) {
    std::complex<double> v = f(xs);
    out.value += v * volume(K.p, prec_sum);
  });
  return out;
}

std::optional<Rational> interpret_exact(const CExp& e, const LocalField& K, const Point& pt0) {
  if (!character_free(e)) return std::nullopt;
  Rational acc(0);
  Rational q(K.p);
  Point pt = pt0;
  for (const auto& t : e.terms) {
    Rational ex = t.lexp.constant;
    bool ex_known = false;
    Rational c(0);
    const size_t k = t.sums.size();
    std::vector<int64_t> idx(k, 0);
    while (true) {
      for (size_t i = 0; i < k; ++i) pt.res[t.sums[i]] = idx[i];
      if (conds_hold(t, K, pt)) {
        if (!ex_known) {
          for (auto& [name, m] : t.lexp.coef) {
            int64_t val;
            if (auto x = ord_symbol_var(name)) val = pt.vf.at(*x).ord();
            else val = pt.ints.at(name);
            ex += m * Rational(val);
          }
          if (!ex.is_integer()) return std::nullopt;
          c = t.coeff.specialize(q);
          Rational base = ex.num() >= 0 ? q : q.inverse();
          for (int64_t i = 0; i < std::abs(ex.num()); ++i) c *= base;
          ex_known = true;
        }
        acc += c;
      }
      size_t i = 0;
      while (i < k && ++idx[i] == K.p) idx[i++] = 0;
      if (i == k) break;
    }
  }
  return acc;
}

OracleResult numeric_integrate(const CExp& e, const Character& ch, const IntegrationBox& box, const Point& params) {
  bool exact = character_free(e);
  Pass a = run_pass(e, ch, box, params, box.depth, exact);
  Pass b = run_pass(e, ch, box, params, box.depth + 1, false);
  OracleResult r;
  r.value = a.value;
  r.delta = std::abs(a.value - b.value);
  r.truncated = a.undecided || !support_in_box(e, box);
  if (!r.truncated) r.exact = a.exact;
  return r;
}

int64_t count_points(const std::vector<CondAtom>& conds, const std::vector<std::string>& vars, int64_t p,
                     const Point& params) {
  double total = std::pow(static_cast<double>(p), static_cast<double>(vars.size()));
  if (vars.size() > 4 || total > 1e7) throw TooLarge("point count needs " + std::to_string(total) + " evaluations");
  LocalField K(FieldKind::PadicQ, p);
  Point pt = params;
  std::vector<int64_t> idx(vars.size(), 0);
  int64_t count = 0;
  while (true) {
    for (size_t i = 0; i < vars.size(); ++i) pt.res[vars[i]] = residue_eval_mod(idx[i], p);
    bool ok = true;
    for (const auto& c : conds)
      if (!eval_cond(c, K, pt)) {
        ok = false;
        break;
      }
    if (ok) ++count;
    size_t i = 0;
    while (i < vars.size() && ++idx[i] == p) idx[i++] = 0;
    if (i == vars.size()) break;
  }
  return count;
}

std::complex<double> gauss_G(int64_t j, int64_t m, const Element& lambda, const Character& ch, int depth) {
  if (m < 1) throw std::invalid_argument("power index must be positive");
  const LocalField& K = ch.K;
  int e = hensel_exponent(K, m);
  // Enough digits to read psi (through w^0) and the coset (e digits past the
  // leading one).
  int need = static_cast<int>(std::max<int64_t>(0, 1 - j)) + e + 1;
  int d = std::max(depth, need);
  auto r = adaptive_integrate(K, {j}, d, [&](const std::vector<Element>& xs) -> std::complex<double> {
    const Element& u = xs[0];
    if (u.is_zero()) {
      if (u.ord_lower() > j) return 0;
      throw InsufficientPrecision("shell undecided");
    }
    if (u.ord() != j || !in_coset(u, lambda, m)) return 0;
    return psi(ch, u);
  });
  if (r.undecided) throw InsufficientPrecision("G(j) undecided at depth " + std::to_string(d));
  return r.value;
}

TransferReport transfer_compare(const CExp& e, const std::vector<int64_t>& primes, int twist_depth,
                                const IntegrationBox& box, double tol) {
  TransferReport rep;
  for (int64_t p : primes) {
    std::vector<std::complex<double>> vals[2];
    int side = 0;
    for (FieldKind kind : {FieldKind::PadicQ, FieldKind::LaurentF}) {
      LocalField K(kind, p);
      for (const auto& ch : character_family(K, twist_depth)) {
        OracleResult r = numeric_integrate(e, ch, box);
        std::ostringstream tw;
        tw << "[";
        for (int i = 0; i < twist_depth; ++i) tw << (i ? "," : "") << ch.twist.digit_at(i);
        tw << "]";
        rep.rows.push_back({p, K.name(), tw.str(), r.value, r.delta});
        vals[side].push_back(r.value);
      }
      ++side;
    }
    bool all_zero[2] = {true, true};
    for (int s = 0; s < 2; ++s)
      for (auto v : vals[s]) {
        if (std::abs(v) >= tol) all_zero[s] = false;
        if (std::abs(v - vals[s][0]) > tol) rep.twist_stable = false;
      }
    if (all_zero[0] != all_zero[1]) rep.pattern_agrees = false;
    for (size_t i = 0; i < vals[0].size(); ++i)
      rep.max_discrepancy = std::max(rep.max_discrepancy, std::abs(vals[0][i] - vals[1][i]));
  }
  return rep;
}

}  // namespace cef
