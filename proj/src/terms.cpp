#include "cef/terms.hpp"

#include <sstream>
#include <tuple>

namespace cef {

namespace {

template <class Map, class Key>
void accumulate(Map& m, const Key& k, const Rational& c) {
  if (c.is_zero()) return;
  auto it = m.find(k);
  if (it == m.end()) {
    m.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) m.erase(it);
}

std::string pow_suffix(int e) {
  if (e == 1) return "";
  if (e < 0) return "^(" + std::to_string(e) + ")";
  return "^" + std::to_string(e);
}

// Prints sum of c * body with signs folded into the separators.
template <class Map, class BodyFn, class IsOneFn>
std::string print_poly(const Map& terms, BodyFn body, IsOneFn is_one) {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Constant term last reads more naturally.
  auto emit = [&](const auto& m, const Rational& c) {
    Rational a = c.abs();
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    first = false;
    if (is_one(m)) {
      os << a.str();
    } else {
      if (a != Rational(1)) os << a.str() << "*";
      os << body(m);
    }
  };
  for (auto& [m, c] : terms)
    if (!is_one(m)) emit(m, c);
  for (auto& [m, c] : terms)
    if (is_one(m)) emit(m, c);
  return os.str();
}

Rational rpow(const Rational& b, int e) {
  Rational base = e < 0 ? b.inverse() : b;
  Rational r(1);
  for (int i = 0; i < std::abs(e); ++i) r *= base;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- Monomial

int Monomial::exponent(const std::string& v) const {
  auto it = vars.find(v);
  return it == vars.end() ? 0 : it->second;
}

bool operator<(const Monomial& a, const Monomial& b) { return std::tie(a.vars, a.w) < std::tie(b.vars, b.w); }

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r = a;
  r.w += b.w;
  for (auto& [v, e] : b.vars) {
    int n = r.exponent(v) + e;
    if (n == 0) r.vars.erase(v);
    else r.vars[v] = n;
  }
  return r;
}

Monomial Monomial::pow(int n) const {
  Monomial r;
  if (n == 0) return r;
  r.w = w * n;
  for (auto& [v, e] : vars) r.vars[v] = e * n;
  return r;
}

LinForm Monomial::ord() const {
  LinForm f{Rational(w)};
  for (auto& [v, e] : vars) f += LinForm::var(ord_symbol(v), Rational(e));
  return f;
}

std::string Monomial::str() const {
  std::string s;
  auto add = [&](const std::string& part) {
    if (!s.empty()) s += "*";
    s += part;
  };
  if (w != 0) add("w" + pow_suffix(w));
  for (auto& [v, e] : vars) add(v + pow_suffix(e));
  return s.empty() ? "1" : s;
}

// ---------------------------------------------------------------- VTerm

VTerm::VTerm(const Rational& c) {
  if (!c.is_zero()) terms_[Monomial{}] = c;
}

VTerm VTerm::var(const std::string& name) {
  Monomial m;
  m.vars[name] = 1;
  return monomial(Rational(1), m);
}

VTerm VTerm::uniformizer(int k) {
  Monomial m;
  m.w = k;
  return monomial(Rational(1), m);
}

VTerm VTerm::monomial(const Rational& c, const Monomial& m) {
  VTerm r;
  if (!c.is_zero()) r.terms_[m] = c;
  return r;
}

std::optional<std::pair<Rational, Monomial>> VTerm::as_monomial() const {
  if (terms_.size() != 1) return std::nullopt;
  return std::make_pair(terms_.begin()->second, terms_.begin()->first);
}

std::optional<Rational> VTerm::as_constant() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_.begin()->first.is_one()) return terms_.begin()->second;
  return std::nullopt;
}

bool VTerm::mentions(const std::string& v) const {
  for (auto& [m, c] : terms_)
    if (m.vars.count(v)) return true;
  return false;
}

std::set<std::string> VTerm::vars() const {
  std::set<std::string> s;
  for (auto& [m, c] : terms_)
    for (auto& [v, e] : m.vars) s.insert(v);
  return s;
}

int VTerm::degree(const std::string& v) const {
  int d = 0;
  for (auto& [m, c] : terms_) d = std::max(d, m.exponent(v));
  return d;
}

int VTerm::min_exponent(const std::string& v) const {
  int d = 0;
  for (auto& [m, c] : terms_) d = std::min(d, m.exponent(v));
  return d;
}

VTerm VTerm::operator-() const {
  VTerm r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

VTerm operator+(const VTerm& a, const VTerm& b) {
  VTerm r = a;
  for (auto& [m, c] : b.terms_) accumulate(r.terms_, m, c);
  return r;
}

VTerm operator-(const VTerm& a, const VTerm& b) { return a + (-b); }

VTerm operator*(const VTerm& a, const VTerm& b) {
  VTerm r;
  for (auto& [m1, c1] : a.terms_)
    for (auto& [m2, c2] : b.terms_) {
      Monomial m = m1 * m2;
      for (auto& [v, e] : m.vars)
        if (e > kMaxVarDegree || e < -kMaxVarDegree)
          throw std::invalid_argument("degree of " + v + " exceeds the engine cap");
      accumulate(r.terms_, m, c1 * c2);
    }
  return r;
}

VTerm VTerm::pow(int n) const {
  if (n < 0) {
    auto mono = as_monomial();
    if (!mono) throw std::invalid_argument("negative power of a non-monomial valued term");
    return monomial(mono->first.inverse(), mono->second.pow(-1)).pow(-n);
  }
  VTerm r(Rational(1));
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

std::map<int, VTerm> VTerm::coeffs_in(const std::string& v) const {
  std::map<int, VTerm> out;
  for (auto& [m, c] : terms_) {
    int e = m.exponent(v);
    if (e < 0) throw std::invalid_argument("negative exponent of " + v);
    Monomial rest = m;
    rest.vars.erase(v);
    out[e] += monomial(c, rest);
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

VTerm VTerm::substitute(const std::string& v, const VTerm& repl) const {
  VTerm r;
  for (auto& [m, c] : terms_) {
    int e = m.exponent(v);
    Monomial rest = m;
    rest.vars.erase(v);
    VTerm factor = monomial(c, rest);
    if (e < 0 && !repl.as_monomial())
      throw NonAffineSubstitution("negative power of " + v + " under a non-monomial substitution");
    r += factor * repl.pow(e);
  }
  return r;
}

VTerm VTerm::rename(const std::string& from, const std::string& to) const {
  return substitute(from, VTerm::var(to));
}

std::string VTerm::str() const {
  return print_poly(terms_, [](const Monomial& m) { return m.str(); }, [](const Monomial& m) { return m.is_one(); });
}

// ---------------------------------------------------------------- RAtom

bool RAtom::mentions_vf(const std::string& x) const {
  if (kind == Kind::AcVar) return name == x;
  if (kind == Kind::AcOpaque) return arg.mentions(x);
  return false;
}

bool operator<(const RAtom& a, const RAtom& b) {
  return std::tie(a.kind, a.name, a.arg) < std::tie(b.kind, b.name, b.arg);
}

std::string RAtom::str() const {
  switch (kind) {
    case Kind::Var: return name;
    case Kind::AcVar: return "ac(" + name + ")";
    case Kind::AcOpaque: return "ac(" + arg.str() + ")";
  }
  return "";
}

// ---------------------------------------------------------------- RTerm

RTerm::RTerm(const Rational& c) {
  if (!c.is_zero()) terms_[RMonomial{}] = c;
}

RTerm RTerm::var(const std::string& name) { return atom(RAtom::var(name)); }

RTerm RTerm::atom(const RAtom& a, int e) {
  RTerm r;
  RMonomial m;
  if (e != 0) m[a] = e;
  r.terms_[m] = Rational(1);
  return r;
}

RTerm RTerm::ac(const VTerm& v) { return ac_pow(v, 1); }

RTerm RTerm::ac_pow(const VTerm& v, int e) {
  if (e == 0) return RTerm(Rational(1));
  if (v.is_zero()) return RTerm();
  if (auto mono = v.as_monomial()) {
    RMonomial m;
    for (auto& [x, k] : mono->second.vars) m[RAtom::ac_var(x)] = k * e;
    RTerm r;
    r.terms_[m] = rpow(mono->first, e);
    return r;
  }
  return atom(RAtom::ac_opaque(v), e);
}

std::optional<Rational> RTerm::as_constant() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_.begin()->first.empty()) return terms_.begin()->second;
  return std::nullopt;
}

std::optional<std::pair<Rational, RMonomial>> RTerm::as_monomial() const {
  if (terms_.size() != 1) return std::nullopt;
  return std::make_pair(terms_.begin()->second, terms_.begin()->first);
}

bool RTerm::mentions(const std::string& res_var) const {
  for (auto& [m, c] : terms_)
    if (m.count(RAtom::var(res_var))) return true;
  return false;
}

bool RTerm::mentions_vf(const std::string& x) const {
  for (auto& [m, c] : terms_)
    for (auto& [a, e] : m)
      if (a.mentions_vf(x)) return true;
  return false;
}

std::set<std::string> RTerm::res_vars() const {
  std::set<std::string> s;
  for (auto& [m, c] : terms_)
    for (auto& [a, e] : m)
      if (a.kind == RAtom::Kind::Var) s.insert(a.name);
  return s;
}

std::set<std::string> RTerm::vf_vars() const {
  std::set<std::string> s;
  for (auto& [m, c] : terms_)
    for (auto& [a, e] : m) {
      if (a.kind == RAtom::Kind::AcVar) s.insert(a.name);
      if (a.kind == RAtom::Kind::AcOpaque)
        for (auto& v : a.arg.vars()) s.insert(v);
    }
  return s;
}

int RTerm::degree(const std::string& res_var) const {
  int d = 0;
  RAtom key = RAtom::var(res_var);
  for (auto& [m, c] : terms_) {
    auto it = m.find(key);
    if (it != m.end()) d = std::max(d, it->second);
  }
  return d;
}

bool RTerm::has_negative_exponent(const std::string& res_var) const {
  RAtom key = RAtom::var(res_var);
  for (auto& [m, c] : terms_) {
    auto it = m.find(key);
    if (it != m.end() && it->second < 0) return true;
  }
  return false;
}

RTerm RTerm::operator-() const {
  RTerm r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

RTerm operator+(const RTerm& a, const RTerm& b) {
  RTerm r = a;
  for (auto& [m, c] : b.terms_) accumulate(r.terms_, m, c);
  return r;
}

RTerm operator-(const RTerm& a, const RTerm& b) { return a + (-b); }

RTerm operator*(const RTerm& a, const RTerm& b) {
  RTerm r;
  for (auto& [m1, c1] : a.terms_)
    for (auto& [m2, c2] : b.terms_) {
      RMonomial m = m1;
      for (auto& [at, e] : m2) {
        int n = (m.count(at) ? m[at] : 0) + e;
        if (n == 0) m.erase(at);
        else m[at] = n;
      }
      accumulate(r.terms_, m, c1 * c2);
    }
  return r;
}

RTerm RTerm::pow(int n) const {
  if (n < 0) {
    auto mono = as_monomial();
    if (!mono) throw std::invalid_argument("negative power of a non-monomial residue term");
    RTerm r;
    RMonomial m;
    for (auto& [a, e] : mono->second) m[a] = e * n;
    r.terms_[m] = rpow(mono->first, n);
    return r;
  }
  RTerm r(Rational(1));
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

Rational RTerm::leading_coeff() const {
  if (terms_.empty()) return Rational(0);
  return terms_.rbegin()->second;
}

RTerm RTerm::monic() const {
  if (terms_.empty()) return *this;
  return RTerm(leading_coeff().inverse()) * *this;
}

std::map<int, RTerm> RTerm::coeffs_in(const std::string& res_var) const {
  std::map<int, RTerm> out;
  RAtom key = RAtom::var(res_var);
  for (auto& [m, c] : terms_) {
    RMonomial rest = m;
    int e = 0;
    auto it = rest.find(key);
    if (it != rest.end()) {
      e = it->second;
      rest.erase(it);
    }
    if (e < 0) throw std::invalid_argument("negative exponent of " + res_var);
    RTerm t;
    t.terms_[rest] = c;
    out[e] += t;
  }
  for (auto it = out.begin(); it != out.end();) it = it->second.is_zero() ? out.erase(it) : std::next(it);
  return out;
}

namespace {

template <class Fn>
RTerm map_atoms(const std::map<RMonomial, Rational>& terms, Fn atom_image) {
  RTerm r;
  for (auto& [m, c] : terms) {
    RTerm t(c);
    for (auto& [a, e] : m) t = t * atom_image(a, e);
    r += t;
  }
  return r;
}

}  // namespace

RTerm RTerm::substitute(const std::string& res_var, const RTerm& repl) const {
  return map_atoms(terms_, [&](const RAtom& a, int e) {
    if (a.kind == RAtom::Kind::Var && a.name == res_var) return repl.pow(e);
    return RTerm::atom(a, e);
  });
}

RTerm RTerm::substitute_vf(const std::string& x, const VTerm& repl) const {
  return map_atoms(terms_, [&](const RAtom& a, int e) {
    if (a.kind == RAtom::Kind::AcVar && a.name == x) return RTerm::ac_pow(repl, e);
    if (a.kind == RAtom::Kind::AcOpaque && a.arg.mentions(x)) return RTerm::ac_pow(a.arg.substitute(x, repl), e);
    return RTerm::atom(a, e);
  });
}

RTerm RTerm::rename(const std::string& from, const std::string& to) const { return substitute(from, RTerm::var(to)); }

RTerm RTerm::rename_vf(const std::string& from, const std::string& to) const {
  return substitute_vf(from, VTerm::var(to));
}

int64_t pow_mod(int64_t b, int64_t e, int64_t p) {
  b = mod_floor(b, p);
  if (e < 0) {
    b = pow_mod(b, p - 2, p);
    e = -e;
  }
  int64_t r = 1 % p;
  while (e > 0) {
    if (e & 1) r = static_cast<int64_t>(static_cast<__int128>(r) * b % p);
    b = static_cast<int64_t>(static_cast<__int128>(b) * b % p);
    e >>= 1;
  }
  return r;
}

int64_t rational_mod(const Rational& c, int64_t p) {
  int64_t d = mod_floor(c.den(), p);
  if (d == 0) throw std::domain_error("constant " + c.str() + " is not p-integral");
  return static_cast<int64_t>(static_cast<__int128>(mod_floor(c.num(), p)) * pow_mod(d, p - 2, p) % p);
}

int64_t RTerm::eval_mod(int64_t p, const std::function<int64_t(const RAtom&)>& atom_value) const {
  int64_t total = 0;
  for (auto& [m, c] : terms_) {
    int64_t t = rational_mod(c, p);
    for (auto& [a, e] : m) {
      int64_t v = mod_floor(atom_value(a), p);
      if (e < 0 && v == 0) {
        t = 0;
        break;
      }
      t = static_cast<int64_t>(static_cast<__int128>(t) * pow_mod(v, e, p) % p);
    }
    total = (total + t) % p;
  }
  return total;
}

std::string RTerm::str() const {
  return print_poly(
      terms_,
      [](const RMonomial& m) {
        std::string s;
        for (auto& [a, e] : m) {
          if (!s.empty()) s += "*";
          s += a.str() + pow_suffix(e);
        }
        return s;
      },
      [](const RMonomial& m) { return m.empty(); });
}

}  // namespace cef
