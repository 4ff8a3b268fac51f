#include "cef/interpret.hpp"

#include <cmath>
#include <numeric>
#include <optional>

namespace cef {

namespace {

int64_t lookup_int(const Point& pt, const std::string& name) {
  auto it = pt.ints.find(name);
  if (it == pt.ints.end()) throw std::invalid_argument("integer variable '" + name + "' has no value");
  return it->second;
}

const Element& lookup_vf(const Point& pt, const std::string& name) {
  auto it = pt.vf.find(name);
  if (it == pt.vf.end()) throw std::invalid_argument("valued variable '" + name + "' has no value");
  return it->second;
}

// Value of an ord symbol: known, or only bounded below when the element is
// zero at its precision.
struct OrdValue {
  int64_t value;
  bool exact;
};

OrdValue ord_of(const Element& e) { return {e.ord_lower(), !e.is_zero()}; }

// Truth of a linear atom when some symbols are only known to lie in
// [lower, +infinity).
bool decide(const PresAtom& a, const std::map<std::string, OrdValue>& env) {
  Rational known = a.f.constant;
  std::optional<Rational> inf = Rational(0), sup = Rational(0);
  bool open = false, cong_ok = true;
  for (auto& [name, c] : a.f.coef) {
    auto it = env.find(name);
    if (it == env.end()) throw std::invalid_argument("symbol '" + name + "' has no value");
    Rational contrib = c * Rational(it->second.value);
    known = known + contrib;
    if (it->second.exact) continue;
    open = true;
    if (c.sign() > 0) sup.reset();
    else inf.reset();
    if (!c.is_integer() || (a.op == PresOp::Cong && c.num() % a.modulus != 0)) cong_ok = false;
  }
  if (!open) {
    std::map<std::string, int64_t> vals;
    for (auto& [k, v] : env) vals[k] = v.value;
    return a.eval(vals);
  }
  // With every unknown at its lower bound, f = known; moving one up changes f
  // in the direction of its coefficient without bound.
  auto lo = inf ? std::optional<Rational>(known) : std::nullopt;
  auto hi = sup ? std::optional<Rational>(known) : std::nullopt;
  auto undecided = [&]() -> bool { throw InsufficientPrecision("condition " + a.str() + " undecided at precision"); };
  switch (a.op) {
    case PresOp::Le:
      if (hi && hi->sign() <= 0) return true;
      if (lo && lo->sign() > 0) return false;
      return undecided();
    case PresOp::Lt:
      if (hi && hi->sign() < 0) return true;
      if (lo && lo->sign() >= 0) return false;
      return undecided();
    case PresOp::Eq:
    case PresOp::Ne: {
      bool never = (lo && lo->sign() > 0) || (hi && hi->sign() < 0);
      if (!never) return undecided();
      return a.op == PresOp::Ne;
    }
    case PresOp::Cong:
      if (!cong_ok) return undecided();
      if (!known.is_integer()) return false;
      return ((known.num() - a.residue) % a.modulus + a.modulus) % a.modulus == 0;
  }
  return undecided();
}

std::map<std::string, OrdValue> symbol_env(const LinForm& f, const Point& pt) {
  std::map<std::string, OrdValue> env;
  for (auto& [name, c] : f.coef) {
    if (name == kOrdSlot) continue;
    if (auto x = ord_symbol_var(name)) env[name] = ord_of(lookup_vf(pt, *x));
    else env[name] = {lookup_int(pt, name), true};
  }
  return env;
}

int64_t res_mod(int64_t r, int64_t p) { return ((r % p) + p) % p; }

bool is_res_power(int64_t r, int64_t m, int64_t p) {
  r = res_mod(r, p);
  if (r == 0) return false;
  int64_t g = std::gcd(m, p - 1);
  int64_t e = (p - 1) / g, acc = 1, b = r;
  while (e > 0) {
    if (e & 1) acc = static_cast<int64_t>((__int128)acc * b % p);
    b = static_cast<int64_t>((__int128)b * b % p);
    e >>= 1;
  }
  return acc == 1;
}

}  // namespace

Element eval_vterm(const VTerm& v, const LocalField& K, const Point& pt) {
  Element sum = Element::from_int(K, 0);
  for (auto& [m, c] : v.terms()) {
    Element term = Element::from_rational(K, c);
    if (m.w != 0) term = term * Element::uniformizer(K, m.w);
    for (auto& [x, e] : m.vars) term = term * lookup_vf(pt, x).pow(e);
    sum = sum + term;
  }
  return sum;
}

int64_t eval_rterm(const RTerm& r, const LocalField& K, const Point& pt) {
  return r.eval_mod(K.p, [&](const RAtom& a) -> int64_t {
    switch (a.kind) {
      case RAtom::Kind::Var: {
        auto it = pt.res.find(a.name);
        if (it == pt.res.end()) throw std::invalid_argument("residue variable '" + a.name + "' has no value");
        return res_mod(it->second, K.p);
      }
      case RAtom::Kind::AcVar: return lookup_vf(pt, a.name).ac();
      case RAtom::Kind::AcOpaque: return eval_vterm(a.arg, K, pt).ac();
    }
    return 0;
  });
}

bool eval_cond(const CondAtom& c, const LocalField& K, const Point& pt) {
  return std::visit(
      [&](const auto& a) -> bool {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, OrdCmp>) {
          auto env = symbol_env(a.atom.f, pt);
          env[kOrdSlot] = ord_of(eval_vterm(a.v, K, pt));
          return decide(a.atom, env);
        } else if constexpr (std::is_same_v<T, PresAtom>) {
          return decide(a, symbol_env(a.f, pt));
        } else if constexpr (std::is_same_v<T, ResCmp>) {
          return (eval_rterm(a.r, K, pt) == 0) != a.neq;
        } else if constexpr (std::is_same_v<T, CosetIn>) {
          return in_coset(eval_vterm(a.v, K, pt), eval_vterm(a.lambda, K, pt), a.m);
        } else {
          return is_res_power(eval_rterm(a.r, K, pt), a.m, K.p);
        }
      },
      c);
}

bool conds_hold(const CExpTerm& t, const LocalField& K, const Point& pt) {
  // A false atom settles the product even when another is undecided.
  std::optional<InsufficientPrecision> pending;
  for (const auto& c : t.conds) {
    try {
      if (!eval_cond(c, K, pt)) return false;
    } catch (const InsufficientPrecision& ex) {
      if (!pending) pending = ex;
    }
  }
  if (pending) throw *pending;
  return true;
}

double specialize_coeff(const CExpTerm& t, const LocalField& K, const Point& pt) {
  double q = static_cast<double>(K.p);
  double c = static_cast<double>(t.coeff.specialize_approx(static_cast<long double>(K.p)));
  if (t.lexp.coef.empty() && t.lexp.constant.is_zero()) return c;
  Rational ex = t.lexp.constant;
  for (auto& [name, k] : t.lexp.coef) {
    int64_t val;
    if (auto x = ord_symbol_var(name)) val = lookup_vf(pt, *x).ord();
    else val = lookup_int(pt, name);
    ex = ex + k * Rational(val);
  }
  return c * std::pow(q, static_cast<double>(ex.num()) / static_cast<double>(ex.den()));
}

std::complex<double> interpret_term(const CExpTerm& t, const Character& ch, const Point& pt0) {
  const LocalField& K = ch.K;
  const size_t k = t.sums.size();
  double total_points = std::pow(static_cast<double>(K.p), static_cast<double>(k));
  if (total_points > 1e7) throw std::invalid_argument("residue summation too large");
  Point pt = pt0;
  std::vector<int64_t> idx(k, 0);
  std::complex<double> acc = 0;
  std::optional<double> coeff;
  std::optional<std::complex<double>> big_e;
  while (true) {
    for (size_t i = 0; i < k; ++i) pt.res[t.sums[i]] = idx[i];
    if (conds_hold(t, K, pt)) {
      // The L-power and E factor do not depend on residue variables.
      if (!coeff) coeff = specialize_coeff(t, K, pt);
      if (!big_e) big_e = t.expArg.is_zero() ? std::complex<double>(1) : psi(ch, eval_vterm(t.expArg, K, pt));
      std::complex<double> small = t.resExpArg.is_zero() ? 1 : res_char(eval_rterm(t.resExpArg, K, pt), K.p);
      acc += *coeff * *big_e * small;
    }
    size_t i = 0;
    while (i < k && ++idx[i] == K.p) idx[i++] = 0;
    if (i == k) break;
  }
  return acc;
}

std::complex<double> interpret(const CExp& e, const Character& ch, const Point& pt) {
  std::complex<double> acc = 0;
  for (const auto& t : e.terms) acc += interpret_term(t, ch, pt);
  return acc;
}

}  // namespace cef
