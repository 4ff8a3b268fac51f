#include "cef/presburger.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace cef {

std::string ord_symbol(const std::string& var) { return "ord(" + var + ")"; }

std::optional<std::string> ord_symbol_var(const std::string& name) {
  if (name.size() > 5 && name.compare(0, 4, "ord(") == 0 && name.back() == ')')
    return name.substr(4, name.size() - 5);
  return std::nullopt;
}

// ---------------------------------------------------------------- LinForm

LinForm LinForm::var(const std::string& name, const Rational& c) {
  LinForm f;
  if (!c.is_zero()) f.coef[name] = c;
  return f;
}

Rational LinForm::coeff(const std::string& name) const {
  auto it = coef.find(name);
  return it == coef.end() ? Rational(0) : it->second;
}

LinForm LinForm::without(const std::string& name) const {
  LinForm r = *this;
  r.coef.erase(name);
  return r;
}

LinForm LinForm::substitute(const std::string& name, const LinForm& value) const {
  auto it = coef.find(name);
  if (it == coef.end()) return *this;
  Rational c = it->second;
  return without(name) + c * value;
}

LinForm LinForm::rename(const std::string& from, const std::string& to) const {
  return substitute(from, LinForm::var(to));
}

Rational LinForm::eval(const std::map<std::string, int64_t>& env) const {
  Rational v = constant;
  for (auto& [k, c] : coef) {
    auto it = env.find(k);
    if (it == env.end()) throw std::invalid_argument("unassigned variable " + k);
    v += c * Rational(it->second);
  }
  return v;
}

bool LinForm::is_integral() const {
  if (!constant.is_integer()) return false;
  for (auto& [k, c] : coef)
    if (!c.is_integer()) return false;
  return true;
}

LinForm LinForm::operator-() const { return Rational(-1) * *this; }

LinForm operator+(const LinForm& a, const LinForm& b) {
  LinForm r = a;
  r.constant += b.constant;
  for (auto& [k, c] : b.coef) {
    Rational v = r.coeff(k) + c;
    if (v.is_zero()) r.coef.erase(k);
    else r.coef[k] = v;
  }
  return r;
}

LinForm operator-(const LinForm& a, const LinForm& b) { return a + (-b); }

LinForm operator*(const Rational& k, const LinForm& a) {
  if (k.is_zero()) return LinForm();
  LinForm r;
  r.constant = k * a.constant;
  for (auto& [n, c] : a.coef) r.coef[n] = k * c;
  return r;
}

bool operator<(const LinForm& a, const LinForm& b) {
  return std::tie(a.coef, a.constant) < std::tie(b.coef, b.constant);
}

std::string LinForm::str() const {
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Rational& c, const std::string& name) {
    Rational a = c.abs();
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    first = false;
    if (name.empty()) {
      os << a.str();
    } else {
      if (a != Rational(1)) os << a.str() << "*";
      os << name;
    }
  };
  for (auto& [k, c] : coef) emit(c, k);
  if (!constant.is_zero() || first) {
    if (first && constant.is_zero()) {
      os << "0";
    } else {
      emit(constant, "");
    }
  }
  return os.str();
}

// ---------------------------------------------------------------- atoms

PresAtom PresAtom::cong(const LinForm& f, int64_t r, int64_t n) {
  if (n < 1) throw std::invalid_argument("congruence modulus must be positive");
  PresAtom a{f, PresOp::Cong};
  a.modulus = n;
  a.residue = mod_floor(r, n);
  return a;
}

bool PresAtom::eval(const std::map<std::string, int64_t>& env) const {
  Rational v = f.eval(env);
  switch (op) {
    case PresOp::Le: return v.sign() <= 0;
    case PresOp::Lt: return v.sign() < 0;
    case PresOp::Eq: return v.is_zero();
    case PresOp::Ne: return !v.is_zero();
    case PresOp::Cong:
      if (!v.is_integer()) return false;
      return mod_floor(v.num() - residue, modulus) == 0;
  }
  return false;
}

std::string PresAtom::str() const {
  switch (op) {
    case PresOp::Le: return f.str() + " <= 0";
    case PresOp::Lt: return f.str() + " < 0";
    case PresOp::Eq: return f.str() + " == 0";
    case PresOp::Ne: return f.str() + " != 0";
    case PresOp::Cong: return f.str() + " == " + std::to_string(residue) + " mod " + std::to_string(modulus);
  }
  return "";
}

bool operator<(const PresAtom& a, const PresAtom& b) {
  return std::tie(a.op, a.f, a.modulus, a.residue) < std::tie(b.op, b.f, b.modulus, b.residue);
}

Truth normalize_atom(PresAtom& a) {
  int64_t D = a.f.constant.den();
  for (auto& [k, c] : a.f.coef) D = lcm64(D, c.den());
  if (D != 1) {
    a.f = Rational(D) * a.f;
    if (a.op == PresOp::Cong) {
      a.residue = checked_mul(a.residue, D);
      a.modulus = checked_mul(a.modulus, D);
    }
  }
  int64_t c = a.f.constant.num();
  auto truth = [](bool b) { return b ? Truth::True : Truth::False; };
  if (a.f.coef.empty()) {
    switch (a.op) {
      case PresOp::Le: return truth(c <= 0);
      case PresOp::Lt: return truth(c < 0);
      case PresOp::Eq: return truth(c == 0);
      case PresOp::Ne: return truth(c != 0);
      case PresOp::Cong: return truth(mod_floor(c - a.residue, a.modulus) == 0);
    }
  }
  if (a.op == PresOp::Lt) {
    a.op = PresOp::Le;
    c = checked_add(c, 1);
  }
  int64_t g = 0;
  for (auto& [k, v] : a.f.coef) g = gcd64(g, v.num());
  auto divide_coeffs = [&](int64_t d) {
    for (auto& [k, v] : a.f.coef) v = Rational(v.num() / d);
  };
  switch (a.op) {
    case PresOp::Le: {
      divide_coeffs(g);
      a.f.constant = Rational(ceil_div(c, g));
      return Truth::Open;
    }
    case PresOp::Eq:
    case PresOp::Ne: {
      if (c % g != 0) return a.op == PresOp::Eq ? Truth::False : Truth::True;
      if (a.f.coef.begin()->second.sign() < 0) g = -g;
      divide_coeffs(g);
      a.f.constant = Rational(c / g);
      return Truth::Open;
    }
    case PresOp::Cong: {
      int64_t n = a.modulus;
      int64_t r = mod_floor(a.residue - c, n);
      LinForm f;
      int64_t gg = n;
      for (auto& [k, v] : a.f.coef) {
        int64_t m = mod_floor(v.num(), n);
        if (m != 0) f.coef[k] = Rational(m);
        gg = gcd64(gg, m);
      }
      if (f.coef.empty()) return truth(r == 0);
      if (r % gg != 0) return Truth::False;
      for (auto& [k, v] : f.coef) v = Rational(v.num() / gg);
      n /= gg;
      r /= gg;
      if (n == 1) return Truth::True;
      a.f = f;
      a.modulus = n;
      a.residue = r;
      return Truth::Open;
    }
    default: break;
  }
  return Truth::Open;
}

bool PresCond::eval(const std::map<std::string, int64_t>& env) const {
  for (const auto& b : branches) {
    bool ok = true;
    for (const auto& a : b)
      if (!a.eval(env)) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

std::optional<PresConj> normalize_conj(const PresConj& c) {
  PresConj out;
  for (auto a : c) {
    Truth t = normalize_atom(a);
    if (t == Truth::False) return std::nullopt;
    if (t == Truth::Open) out.push_back(std::move(a));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<PresAtom> negate(const PresAtom& a) {
  switch (a.op) {
    case PresOp::Le: return {PresAtom::lt(-a.f)};
    case PresOp::Lt: return {PresAtom::le(-a.f)};
    case PresOp::Eq: return {PresAtom::lt(a.f), PresAtom::lt(-a.f)};
    case PresOp::Ne: return {PresAtom::eq(a.f)};
    case PresOp::Cong: {
      std::vector<PresAtom> r;
      for (int64_t k = 0; k < a.modulus; ++k)
        if (k != a.residue) r.push_back(PresAtom::cong(a.f, k, a.modulus));
      return r;
    }
  }
  return {};
}

// ---------------------------------------------------------------- satisfiability

namespace {

constexpr size_t kFmCap = 4000;

// Substitutes out equalities with a unit coefficient. Returns false on a
// contradiction.
bool eliminate_unit_equalities(PresConj& c) {
  for (bool progress = true; progress;) {
    progress = false;
    for (size_t i = 0; i < c.size(); ++i) {
      if (c[i].op != PresOp::Eq) continue;
      for (auto& [k, v] : c[i].f.coef) {
        if (v != Rational(1) && v != Rational(-1)) continue;
        std::string name = k;
        LinForm value = Rational(-1) / v * c[i].f.without(name);
        PresConj next;
        for (size_t j = 0; j < c.size(); ++j) {
          if (j == i) continue;
          PresAtom a = c[j];
          a.f = a.f.substitute(name, value);
          next.push_back(a);
        }
        auto n = normalize_conj(next);
        if (!n) return false;
        c = *n;
        progress = true;
        break;
      }
      if (progress) break;
    }
  }
  return true;
}

bool congruences_consistent(const PresConj& c) {
  std::map<std::map<std::string, Rational>, std::vector<std::pair<int64_t, int64_t>>> groups;
  for (const auto& a : c)
    if (a.op == PresOp::Cong) groups[a.f.coef].push_back({a.residue, a.modulus});
  for (auto& [key, list] : groups) {
    int64_t L = 1;
    for (auto& [r, n] : list) {
      L = lcm64(L, n);
      if (L > 1000000) break;
    }
    if (L > 1000000) continue;
    bool found = false;
    for (int64_t v = 0; v < L && !found; ++v) {
      bool ok = true;
      for (auto& [r, n] : list)
        if (mod_floor(v - r, n) != 0) {
          ok = false;
          break;
        }
      found = ok;
    }
    if (!found) return false;
  }
  return true;
}

bool fourier_motzkin(PresConj c) {
  std::vector<LinForm> ineqs;  // f <= 0
  for (const auto& a : c) {
    if (a.op == PresOp::Le) ineqs.push_back(a.f);
    if (a.op == PresOp::Eq) {
      ineqs.push_back(a.f);
      ineqs.push_back(-a.f);
    }
  }
  while (true) {
    std::set<std::string> vars;
    for (auto& f : ineqs)
      for (auto& [k, v] : f.coef) vars.insert(k);
    if (vars.empty()) break;
    std::string best;
    size_t best_cost = SIZE_MAX;
    for (auto& x : vars) {
      size_t p = 0, n = 0;
      for (auto& f : ineqs) {
        int s = f.coeff(x).sign();
        p += s > 0;
        n += s < 0;
      }
      size_t cost = p * n;
      if (cost < best_cost) {
        best_cost = cost;
        best = x;
      }
    }
    std::vector<LinForm> pos, neg, rest;
    for (auto& f : ineqs) {
      int s = f.coeff(best).sign();
      (s > 0 ? pos : s < 0 ? neg : rest).push_back(f);
    }
    if (rest.size() + pos.size() * neg.size() > kFmCap) return true;
    std::set<PresAtom> next;
    auto add = [&](const LinForm& f) -> bool {
      PresAtom a = PresAtom::le(f);
      Truth t = normalize_atom(a);
      if (t == Truth::False) return false;
      if (t == Truth::Open) next.insert(a);
      return true;
    };
    for (auto& f : rest)
      if (!add(f)) return false;
    for (auto& p : pos)
      for (auto& n : neg) {
        Rational a = p.coeff(best), b = n.coeff(best).abs();
        if (!add(b * p + a * n)) return false;
      }
    ineqs.clear();
    for (auto& a : next) ineqs.push_back(a.f);
  }
  for (auto& f : ineqs)
    if (f.constant.sign() > 0) return false;
  return true;
}

}  // namespace

bool maybe_satisfiable(const PresConj& c) {
  try {
    auto n = normalize_conj(c);
    if (!n) return false;
    PresConj conj = *n;
    if (!eliminate_unit_equalities(conj)) return false;
    if (!congruences_consistent(conj)) return false;
    return fourier_motzkin(conj);
  } catch (const ArithmeticOverflow&) {
    return true;
  }
}

bool implies(const PresConj& c, const PresAtom& a) {
  for (const auto& n : negate(a)) {
    PresConj x = c;
    x.push_back(n);
    if (maybe_satisfiable(x)) return false;
  }
  return true;
}

// ---------------------------------------------------------------- domains

namespace {

// floor(F / a) or ceil(F / a) for an integral LinForm F and a > 0.
struct RawBound {
  LinForm F;
  int64_t a;
  bool is_floor;
};

struct Case {
  PresConj guard;
  std::vector<LinForm> lo, hi;
  int64_t modulus = 1;
  int64_t residue = 0;
};

// Resolves a rational bound into integer LinForms under case splits.
std::vector<std::pair<PresConj, LinForm>> resolve_bound(const RawBound& b) {
  std::vector<std::pair<PresConj, LinForm>> out;
  if (b.a == 1 || (b.F.is_integral() && [&] {
        for (auto& [k, v] : b.F.coef)
          if (v.num() % b.a != 0) return false;
        return b.F.constant.num() % b.a == 0;
      }())) {
    out.push_back({{}, Rational(1, b.a) * b.F});
    return out;
  }
  if (b.F.is_constant()) {
    int64_t v = b.is_floor ? floor_div(b.F.constant.num(), b.a) : ceil_div(b.F.constant.num(), b.a);
    out.push_back({{}, LinForm(Rational(v))});
    return out;
  }
  for (int64_t t = 0; t < b.a; ++t) {
    // F == t mod a  =>  floor(F/a) = (F - t)/a, ceil(F/a) = (F - t)/a + [t > 0]
    LinForm v = Rational(1, b.a) * (b.F - LinForm(Rational(t)));
    if (!b.is_floor && t > 0) v = v + LinForm(Rational(1));
    out.push_back({{PresAtom::cong(b.F, t, b.a)}, v});
  }
  return out;
}

// Picks the max (or min) of a bound list by case split.
std::vector<std::pair<PresConj, LinForm>> select_extreme(std::vector<LinForm> bounds, bool want_max) {
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
  // Fold constants.
  std::optional<Rational> cst;
  std::vector<LinForm> sym;
  for (auto& b : bounds) {
    if (b.is_constant()) {
      if (!cst || (want_max ? b.constant > *cst : b.constant < *cst)) cst = b.constant;
    } else {
      sym.push_back(b);
    }
  }
  if (cst) sym.push_back(LinForm(*cst));
  std::vector<std::pair<PresConj, LinForm>> out;
  for (size_t i = 0; i < sym.size(); ++i) {
    PresConj g;
    for (size_t k = 0; k < sym.size(); ++k) {
      if (k == i) continue;
      // want_max: sym[i] > sym[k] for k < i, sym[i] >= sym[k] for k > i
      LinForm d = want_max ? sym[k] - sym[i] : sym[i] - sym[k];
      g.push_back(k < i ? PresAtom::lt(d) : PresAtom::le(d));
    }
    out.push_back({g, sym[i]});
  }
  return out;
}

void append(PresConj& a, const PresConj& b) { a.insert(a.end(), b.begin(), b.end()); }

// Expands atoms var != ... into strict inequalities.
std::vector<PresConj> split_ne(const PresConj& c, const std::string& var) {
  std::vector<PresConj> out{{}};
  for (const auto& a : c) {
    if (a.op == PresOp::Ne && a.mentions(var)) {
      std::vector<PresConj> next;
      for (auto& o : out) {
        PresConj x = o, y = o;
        x.push_back(PresAtom::lt(a.f));
        y.push_back(PresAtom::lt(-a.f));
        next.push_back(x);
        next.push_back(y);
      }
      out = std::move(next);
    } else {
      for (auto& o : out) o.push_back(a);
    }
  }
  return out;
}

int64_t mod_inverse(int64_t a, int64_t n) {
  a = mod_floor(a, n);
  for (int64_t x = 1; x < n; ++x)
    if (mod_floor(a * x, n) == 1) return x;
  return n == 1 ? 0 : -1;
}

void domain_of_conj(const PresConj& input, const std::string& var, std::vector<DomainPiece>& out) {
  auto norm = normalize_conj(input);
  if (!norm) return;
  std::vector<Case> cases{Case{}};
  auto fork = [&](const std::vector<std::pair<PresConj, std::function<void(Case&)>>>& options) {
    std::vector<Case> next;
    for (auto& c : cases)
      for (auto& [g, apply] : options) {
        Case d = c;
        append(d.guard, g);
        apply(d);
        next.push_back(std::move(d));
      }
    cases = std::move(next);
  };
  std::vector<std::pair<int64_t, int64_t>> congruences;  // j == r mod n, parameter free
  for (const auto& a : *norm) {
    if (!a.mentions(var)) {
      for (auto& c : cases) c.guard.push_back(a);
      continue;
    }
    int64_t k = a.f.coeff(var).num();
    LinForm f = a.f.without(var);
    std::vector<std::pair<PresConj, std::function<void(Case&)>>> opts;
    auto add_bound = [&](const RawBound& rb, bool lower) {
      for (auto& [g, v] : resolve_bound(rb)) {
        LinForm val = v;
        opts.push_back({g, [val, lower](Case& c) { (lower ? c.lo : c.hi).push_back(val); }});
      }
      fork(opts);
      opts.clear();
    };
    switch (a.op) {
      case PresOp::Le:
        if (k > 0) add_bound({-f, k, true}, false);
        else add_bound({f, -k, false}, true);
        break;
      case PresOp::Eq: {
        LinForm F = k > 0 ? -f : f;
        int64_t kk = k > 0 ? k : -k;
        add_bound({F, kk, true}, false);
        add_bound({F, kk, false}, true);
        break;
      }
      case PresOp::Cong: {
        int64_t n = a.modulus;
        // k*j + f == r mod n
        auto solve = [&](int64_t rhs) -> std::optional<std::pair<int64_t, int64_t>> {
          int64_t g = gcd64(k, n);
          if (mod_floor(rhs, g) != 0) return std::nullopt;
          int64_t n2 = n / g;
          int64_t inv = mod_inverse(k / g, n2);
          return std::make_pair(mod_floor(inv * mod_floor(rhs / g, n2), n2 == 0 ? 1 : n2), n2);
        };
        if (f.is_constant()) {
          auto s = solve(a.residue - f.constant.num());
          if (!s) return;
          congruences.push_back(*s);
        } else {
          for (int64_t t = 0; t < n; ++t) {
            auto s = solve(a.residue - t);
            if (!s) continue;
            auto sol = *s;
            opts.push_back({{PresAtom::cong(f, t, n)}, [sol](Case& c) {
                              // combine lazily: record as extra congruence
                              int64_t L = lcm64(c.modulus, sol.second);
                              int64_t found = -1;
                              for (int64_t v = 0; v < L; ++v)
                                if (mod_floor(v - c.residue, c.modulus) == 0 && mod_floor(v - sol.first, sol.second) == 0) {
                                  found = v;
                                  break;
                                }
                              if (found < 0) c.modulus = 0;  // empty
                              else {
                                c.modulus = L;
                                c.residue = found;
                              }
                            }});
          }
          fork(opts);
          opts.clear();
        }
        break;
      }
      default:
        break;
    }
  }
  for (auto& [r, n] : congruences) {
    for (auto& c : cases) {
      if (c.modulus == 0) continue;
      int64_t L = lcm64(c.modulus, n);
      int64_t found = -1;
      for (int64_t v = 0; v < L; ++v)
        if (mod_floor(v - c.residue, c.modulus) == 0 && mod_floor(v - r, n) == 0) {
          found = v;
          break;
        }
      if (found < 0) c.modulus = 0;
      else {
        c.modulus = L;
        c.residue = found;
      }
    }
  }
  for (auto& c : cases) {
    if (c.modulus == 0) continue;
    int64_t N = c.modulus, R = c.residue;
    std::vector<std::pair<PresConj, std::optional<LinForm>>> los{{{}, std::nullopt}}, his{{{}, std::nullopt}};
    auto align = [&](const std::vector<std::pair<PresConj, LinForm>>& opts, bool lower) {
      std::vector<std::pair<PresConj, std::optional<LinForm>>> res;
      for (auto& [g, b] : opts) {
        if (b.is_constant()) {
          int64_t v = b.constant.num();
          int64_t aligned = lower ? v + mod_floor(R - v, N) : v - mod_floor(v - R, N);
          res.push_back({g, LinForm(Rational(aligned))});
          continue;
        }
        if (N == 1) {
          res.push_back({g, b});
          continue;
        }
        for (int64_t k = 0; k < N; ++k) {
          PresConj gg = g;
          gg.push_back(PresAtom::cong(b, k, N));
          int64_t delta = lower ? mod_floor(R - k, N) : -mod_floor(k - R, N);
          res.push_back({gg, b + LinForm(Rational(delta))});
        }
      }
      return res;
    };
    if (!c.lo.empty()) los = align(select_extreme(c.lo, true), true);
    if (!c.hi.empty()) his = align(select_extreme(c.hi, false), false);
    for (auto& [gl, lo] : los)
      for (auto& [gh, hi] : his) {
        DomainPiece p;
        p.guard = c.guard;
        append(p.guard, gl);
        append(p.guard, gh);
        p.modulus = N;
        p.residue = R;
        p.lo = lo;
        p.hi = hi;
        if (lo && hi) {
          if (lo->is_constant() && hi->is_constant()) {
            if (lo->constant > hi->constant) continue;
          } else {
            p.guard.push_back(PresAtom::le(*lo - *hi));
          }
        }
        auto g = normalize_conj(p.guard);
        if (!g || !maybe_satisfiable(*g)) continue;
        p.guard = *g;
        out.push_back(std::move(p));
      }
  }
}

}  // namespace

std::vector<DomainPiece> normalize_domain(const PresConj& c, const std::string& var) {
  std::vector<DomainPiece> out;
  for (const auto& branch : split_ne(c, var)) domain_of_conj(branch, var, out);
  return out;
}

// ---------------------------------------------------------------- sums

LSum canonical(LSum s) {
  std::map<LinForm, LRat> acc;
  for (auto& t : s) {
    LinForm e = t.exp;
    LRat c = t.coeff;
    if (e.constant.is_integer()) {
      c = c.shift(static_cast<int>(e.constant.num()));
      e.constant = Rational(0);
    }
    acc[e] += c;
  }
  LSum out;
  for (auto& [e, c] : acc)
    if (!c.is_zero()) out.push_back({c, e});
  return out;
}

namespace {

// sum_{t >= 0} t^k L^(A t), A < 0.
LRat moment(int k, int64_t A) {
  if (k == 0) return LRat::geometric(static_cast<int>(-A));
  std::vector<int64_t> eul{1};  // Eulerian numbers E(1, m)
  for (int n = 2; n <= k; ++n) {
    std::vector<int64_t> next(static_cast<size_t>(n), 0);
    for (int m = 0; m < n; ++m) {
      int64_t v = 0;
      if (m < n - 1) v += (m + 1) * eul[static_cast<size_t>(m)];
      if (m >= 1) v += (n - m) * eul[static_cast<size_t>(m - 1)];
      next[static_cast<size_t>(m)] = v;
    }
    eul = next;
  }
  LaurentPoly num;
  for (size_t m = 0; m < eul.size(); ++m) num[static_cast<int>(A * (static_cast<int64_t>(m) + 1))] = eul[m];
  return LRat::normalize(num, {DenFactor{1, static_cast<int>(-A), k + 1}});
}

int64_t binom(int n, int k) {
  int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// sum_{t >= 0} (c + step t)^s L^(A t), A < 0, c constant.
LRat poly_geometric(int s, int64_t c, int64_t step, int64_t A) {
  LRat total;
  for (int k = 0; k <= s; ++k) {
    int64_t w = binom(s, k);
    for (int i = 0; i < s - k; ++i) w = checked_mul(w, c);
    for (int i = 0; i < k; ++i) w = checked_mul(w, step);
    if (w != 0) total += LRat(w) * moment(k, A);
  }
  return total;
}

int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  for (int i = 0; i < e; ++i) r = checked_mul(r, b);
  return r;
}

constexpr int64_t kDirectCap = 256;

}  // namespace

SeriesResult sum_series(const SumSpec& spec) {
  if (spec.s < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
  if (spec.s > kMaxPolyDegree)
    throw UnsupportedSum("polynomial degree " + std::to_string(spec.s) + " exceeds the supported cap " +
                         std::to_string(kMaxPolyDegree));
  Rational a = spec.exponent.coeff(spec.var);
  LinForm b = spec.exponent.without(spec.var);
  const int s = spec.s;
  SeriesResult out;
  for (auto& piece : normalize_domain(spec.domain, spec.var)) {
    const int64_t N = piece.modulus;
    Rational Ar = a * Rational(N);
    if (!Ar.is_integer() || !(a * Rational(piece.residue)).is_integer())
      throw FractionalExponent("exponent coefficient " + a.str() + " is not integral on the progression mod " +
                               std::to_string(N));
    const int64_t A = Ar.num();
    SeriesBranch br;
    br.guard = piece.guard;
    auto at = [&](const LinForm& j) { return a * j + b; };
    if (!piece.lo && !piece.hi) {
      out.push_back(br);
      continue;
    }
    if (!piece.hi && A >= 0) {
      out.push_back(br);
      continue;
    }
    if (!piece.lo && A <= 0) {
      out.push_back(br);
      continue;
    }
    LSum val;
    auto upward = [&](const LinForm& from, int sign) {
      // sign * sum_{j >= from, j == R mod N}
      if (s == 0) {
        val.push_back({LRat(sign) * LRat::geometric(static_cast<int>(-A)), at(from)});
      } else {
        if (!from.is_constant()) throw UnsupportedSum("polynomial factor with symbolic summation bound");
        val.push_back({LRat(sign) * poly_geometric(s, from.constant.num(), N, A), at(from)});
      }
    };
    auto downward = [&](const LinForm& from, int sign) {
      // sign * sum_{j <= from, j == R mod N}
      if (s == 0) {
        val.push_back({LRat(sign) * LRat::geometric(static_cast<int>(A)), at(from)});
      } else {
        if (!from.is_constant()) throw UnsupportedSum("polynomial factor with symbolic summation bound");
        val.push_back({LRat(sign) * poly_geometric(s, from.constant.num(), -N, -A), at(from)});
      }
    };
    if (piece.lo && !piece.hi) {
      upward(*piece.lo, 1);
    } else if (!piece.lo && piece.hi) {
      downward(*piece.hi, 1);
    } else {
      LinForm lo = *piece.lo, hi = *piece.hi;
      LinForm diff = hi - lo;
      if (diff.is_constant() && diff.constant.num() / N < kDirectCap) {
        int64_t T = diff.constant.num() / N;
        for (int64_t t = 0; t <= T; ++t) {
          LinForm j = lo + LinForm(Rational(t * N));
          LRat c(1);
          if (s > 0) {
            if (!lo.is_constant()) throw UnsupportedSum("polynomial factor with symbolic summation bound");
            c = LRat(ipow(j.constant.num(), s));
          }
          val.push_back({c, at(j)});
        }
      } else if (A < 0) {
        upward(lo, 1);
        upward(hi + LinForm(Rational(N)), -1);
      } else if (A > 0) {
        downward(hi, 1);
        downward(lo - LinForm(Rational(N)), -1);
      } else if (diff.is_constant()) {
        int64_t T = diff.constant.num() / N;
        if (s > 0 && !lo.is_constant()) throw UnsupportedSum("polynomial factor with symbolic summation bound");
        LRat c;
        if (s == 0) {
          c = LRat(T + 1);
        } else {
          int64_t total = 0;
          for (int64_t t = 0; t <= T; ++t) total = checked_add(total, ipow(lo.constant.num() + t * N, s));
          c = LRat(total);
        }
        val.push_back({c, b});
      } else {
        throw UnsupportedSum("constant summand over a range of symbolic length");
      }
    }
    br.value = canonical(val);
    out.push_back(br);
  }
  return out;
}

Rational specialize(const LSum& s, const std::map<std::string, int64_t>& env, const Rational& q) {
  Rational total;
  for (auto& t : s) {
    Rational e = t.exp.eval(env);
    if (!e.is_integer()) throw FractionalExponent("non-integral exponent at evaluation point");
    total += (t.coeff * LRat::L(static_cast<int>(e.num()))).specialize(q);
  }
  return total;
}

long double specialize_approx(const LSum& s, const std::map<std::string, int64_t>& env, long double q) {
  long double total = 0;
  for (auto& t : s) {
    Rational e = t.exp.eval(env);
    total += t.coeff.specialize_approx(q) * std::pow(q, static_cast<long double>(e.to_double()));
  }
  return total;
}

std::vector<std::vector<int64_t>> enumerate(const PresCond& c, const std::vector<BoxVar>& box) {
  std::vector<std::vector<int64_t>> out;
  std::map<std::string, int64_t> env;
  std::vector<int64_t> point(box.size());
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == box.size()) {
      if (c.eval(env)) out.push_back(point);
      return;
    }
    for (int64_t v = box[i].lo; v <= box[i].hi; ++v) {
      env[box[i].name] = v;
      point[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

std::string str(const PresConj& c) {
  std::string s;
  for (size_t i = 0; i < c.size(); ++i) {
    if (i) s += ", ";
    s += c[i].str();
  }
  return s;
}

}  // namespace cef
