#include "cef/lring.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace cef {

namespace {

using Poly = std::vector<int64_t>;  // ascending coefficients

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = checked_add(r[i + j], checked_mul(a[i], b[j]));
  }
  trim(r);
  return r;
}

// Exact division by a monic polynomial; returns nullopt when not divisible.
std::optional<Poly> poly_divide_monic(const Poly& a, const Poly& m) {
  if (a.empty()) return Poly{};
  if (a.size() < m.size()) return std::nullopt;
  Poly rem = a;
  Poly q(a.size() - m.size() + 1, 0);
  for (size_t k = q.size(); k-- > 0;) {
    int64_t c = rem[k + m.size() - 1];
    q[k] = c;
    if (c == 0) continue;
    for (size_t j = 0; j < m.size(); ++j) rem[k + j] = checked_sub(rem[k + j], checked_mul(c, m[j]));
  }
  for (auto v : rem)
    if (v != 0) return std::nullopt;
  trim(q);
  return q;
}

const Poly& cyclotomic(int n) {
  static std::recursive_mutex mu;
  static std::map<int, Poly> cache;
  std::lock_guard<std::recursive_mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Poly p(static_cast<size_t>(n) + 1, 0);
  p[0] = -1;
  p[static_cast<size_t>(n)] = 1;
  for (int d = 1; d < n; ++d)
    if (n % d == 0) p = *poly_divide_monic(p, cyclotomic(d));
  return cache.emplace(n, std::move(p)).first->second;
}

// Splits a Laurent polynomial into L^shift * P(L) with P(0) != 0.
std::pair<int, Poly> to_poly(const LaurentPoly& lp) {
  if (lp.empty()) return {0, {}};
  int lo = lp.begin()->first;
  int hi = lp.rbegin()->first;
  Poly p(static_cast<size_t>(hi - lo) + 1, 0);
  for (auto& [k, c] : lp) p[static_cast<size_t>(k - lo)] = c;
  return {lo, p};
}

LaurentPoly from_poly(const Poly& p, int shift) {
  LaurentPoly r;
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] != 0) r[static_cast<int>(i) + shift] = p[i];
  return r;
}

LaurentPoly lp_mul(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r;
  for (auto& [i, x] : a)
    for (auto& [j, y] : b) {
      int64_t& slot = r[i + j];
      slot = checked_add(slot, checked_mul(x, y));
    }
  for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
  return r;
}

LaurentPoly lp_add(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r = a;
  for (auto& [k, c] : b) {
    int64_t& slot = r[k];
    slot = checked_add(slot, c);
    if (slot == 0) r.erase(k);
  }
  return r;
}

// (1 - L^-i)^m as a Laurent polynomial.
LaurentPoly one_minus(int i, int m) {
  LaurentPoly base{{0, 1}, {-i, -1}};
  LaurentPoly r{{0, 1}};
  for (int k = 0; k < m; ++k) r = lp_mul(r, base);
  return r;
}

}  // namespace

LRat::LRat(int64_t c) {
  if (c != 0) num_[0] = c;
}

LRat::LRat(const Rational& c) {
  if (!c.is_zero()) {
    num_[0] = c.num();
    const_den_ = c.den();
  }
}

LRat LRat::L(int k) { return monomial(Rational(1), k); }

LRat LRat::monomial(const Rational& c, int k) {
  LRat r(c);
  return r.shift(k);
}

LRat LRat::geometric(int i, int mult) {
  return normalize(LaurentPoly{{0, 1}}, {DenFactor{1, i, mult}});
}

LRat LRat::normalize(const LaurentPoly& num_in, const std::vector<DenFactor>& den) {
  int64_t cden = 1;
  std::map<int, int> mults;
  for (const auto& f : den) {
    if (f.index == 0) {
      if (f.constant <= 0) throw NonAdmissibleDenominator("denominator constant must be positive");
      cden = checked_mul(cden, f.constant);
    } else {
      if (f.index < 0 || f.mult < 0)
        throw NonAdmissibleDenominator("denominator factor must be (1 - L^-i) with i > 0");
      if (f.mult > 0) mults[f.index] += f.mult;
    }
  }
  LRat out;
  if (num_in.empty()) return out;

  // value = num * L^S / (cden * prod (L^i - 1)^m), S = sum i*m
  int shift_total = 0;
  std::map<int, int> cyc;  // exponent of Phi_n in the denominator
  for (auto& [i, m] : mults) {
    shift_total += i * m;
    for (int n = 1; n <= i; ++n)
      if (i % n == 0) cyc[n] += m;
  }
  auto [lo, P] = to_poly(num_in);
  int shift = lo + shift_total;
  for (auto it = cyc.rbegin(); it != cyc.rend(); ++it) {
    auto& [n, e] = *it;
    while (e > 0) {
      auto q = poly_divide_monic(P, cyclotomic(n));
      if (!q) break;
      P = std::move(*q);
      --e;
    }
  }
  // Integer content against the constant denominator.
  int64_t g = cden;
  for (auto c : P) g = gcd64(g, c);
  if (g > 1) {
    for (auto& c : P) c /= g;
    cden /= g;
  }
  // Re-express the remaining cyclotomic denominator as (L^n - 1) factors,
  // largest n first, compensating missing Phi_d in the numerator.
  std::map<int, int> out_den;
  int out_shift = 0;
  while (true) {
    int n = 0;
    for (auto& [k, e] : cyc)
      if (e > 0) n = std::max(n, k);
    if (n == 0) break;
    for (int d = 1; d <= n; ++d) {
      if (n % d != 0) continue;
      auto it = cyc.find(d);
      if (it != cyc.end() && it->second > 0) {
        --it->second;
      } else {
        P = poly_mul(P, cyclotomic(d));
      }
    }
    out_den[n] += 1;
    out_shift += n;
  }
  out.num_ = from_poly(P, shift - out_shift);
  out.den_ = std::move(out_den);
  out.const_den_ = cden;
  if (out.num_.empty()) return LRat();
  return out;
}

bool LRat::is_one() const { return den_.empty() && const_den_ == 1 && num_.size() == 1 && num_.begin()->first == 0 && num_.begin()->second == 1; }

bool LRat::is_monomial() const { return den_.empty() && num_.size() <= 1; }

std::optional<Rational> LRat::as_rational() const {
  if (is_zero()) return Rational(0);
  if (!den_.empty() || num_.size() != 1 || num_.begin()->first != 0) return std::nullopt;
  return Rational(num_.begin()->second, const_den_);
}

LRat LRat::operator-() const {
  LRat r = *this;
  for (auto& [k, c] : r.num_) c = checked_mul(c, -1);
  return r;
}

LRat operator+(const LRat& a, const LRat& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::map<int, int> common = a.den_;
  for (auto& [i, m] : b.den_) common[i] = std::max(common[i], m);
  int64_t cden = lcm64(a.const_den_, b.const_den_);
  auto scaled = [&](const LRat& x) {
    LaurentPoly n = x.num_;
    int64_t f = cden / x.const_den_;
    for (auto& [k, c] : n) c = checked_mul(c, f);
    for (auto& [i, m] : common) {
      auto it = x.den_.find(i);
      int have = it == x.den_.end() ? 0 : it->second;
      if (m > have) n = lp_mul(n, one_minus(i, m - have));
    }
    return n;
  };
  LaurentPoly sum = lp_add(scaled(a), scaled(b));
  std::vector<DenFactor> den{{cden, 0, 1}};
  for (auto& [i, m] : common) den.push_back({1, i, m});
  return LRat::normalize(sum, den);
}

LRat operator-(const LRat& a, const LRat& b) { return a + (-b); }

LRat operator*(const LRat& a, const LRat& b) {
  if (a.is_zero() || b.is_zero()) return LRat();
  std::vector<DenFactor> den{{checked_mul(a.const_den_, b.const_den_), 0, 1}};
  for (auto& [i, m] : a.den_) den.push_back({1, i, m});
  for (auto& [i, m] : b.den_) den.push_back({1, i, m});
  return LRat::normalize(lp_mul(a.num_, b.num_), den);
}

LRat LRat::pow(int n) const {
  if (n < 0) {
    auto inv = try_inverse();
    if (!inv) throw std::domain_error("element is not invertible in A");
    return inv->pow(-n);
  }
  LRat r(1);
  for (int k = 0; k < n; ++k) r *= *this;
  return r;
}

LRat LRat::shift(int k) const {
  LRat r;
  r.den_ = den_;
  r.const_den_ = const_den_;
  for (auto& [e, c] : num_) r.num_[e + k] = c;
  return r;
}

std::optional<LRat> LRat::try_inverse() const {
  if (is_zero()) return std::nullopt;
  auto [lo, P] = to_poly(num_);
  // Strip cyclotomic factors; what remains must be a constant.
  std::map<int, int> removed;
  for (int n = 1; static_cast<int>(P.size()) > 1 && n <= 64; ++n) {
    while (true) {
      auto q = poly_divide_monic(P, cyclotomic(n));
      if (!q) break;
      P = std::move(*q);
      removed[n]++;
    }
  }
  if (P.size() != 1) return std::nullopt;
  int64_t c = P[0];
  // inverse = const_den * prod(1-L^-i)^m * L^-lo / (c * prod Phi_n^{removed})
  LaurentPoly num{{-lo, c < 0 ? -const_den_ : const_den_}};
  for (auto& [i, m] : den_) num = lp_mul(num, one_minus(i, m));
  // Multiply numerator and denominator so each Phi_n becomes (L^n - 1):
  // 1/Phi_n = prod_{d|n, d<n} Phi_d / (L^n - 1) = L^-n prod Phi_d / (1 - L^-n).
  std::vector<DenFactor> den{{c < 0 ? -c : c, 0, 1}};
  for (auto& [n, e] : removed) {
    for (int k = 0; k < e; ++k) {
      for (int d = 1; d < n; ++d)
        if (n % d == 0) num = lp_mul(num, from_poly(cyclotomic(d), 0));
      num = lp_mul(num, LaurentPoly{{-n, 1}});
      den.push_back({1, n, 1});
    }
  }
  return normalize(num, den);
}

Rational LRat::specialize(const Rational& q) const {
  if (q <= Rational(1)) throw std::domain_error("specialization requires q > 1");
  auto qpow = [&](int k) {
    Rational r(1);
    Rational base = k < 0 ? q.inverse() : q;
    for (int i = 0; i < std::abs(k); ++i) r *= base;
    return r;
  };
  Rational n(0);
  for (auto& [k, c] : num_) n += Rational(c) * qpow(k);
  Rational d(const_den_);
  for (auto& [i, m] : den_)
    for (int k = 0; k < m; ++k) d *= Rational(1) - qpow(-i);
  return n / d;
}

long double LRat::specialize_approx(long double q) const {
  long double n = 0;
  for (auto& [k, c] : num_) n += static_cast<long double>(c) * std::pow(q, static_cast<long double>(k));
  long double d = static_cast<long double>(const_den_);
  for (auto& [i, m] : den_) d *= std::pow(1.0L - std::pow(q, static_cast<long double>(-i)), static_cast<long double>(m));
  return n / d;
}

uint64_t LRat::specialize_mod(uint64_t l) const {
  uint64_t n = 0;
  for (auto& [k, c] : num_) n = modp::add(n, modp::mul(modp::from_int(c), modp::pow(l, k)));
  uint64_t d = modp::from_int(const_den_);
  for (auto& [i, m] : den_)
    for (int k = 0; k < m; ++k) d = modp::mul(d, modp::sub(1, modp::pow(l, -i)));
  return modp::mul(n, modp::inv(d));
}

std::string LRat::str() const {
  std::ostringstream os;
  os << "(";
  if (num_.empty()) os << "0";
  bool first = true;
  for (auto it = num_.rbegin(); it != num_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << it->second << "*L^" << it->first;
  }
  os << ")/";
  bool any = false;
  std::ostringstream d;
  if (const_den_ != 1) {
    d << const_den_;
    any = true;
  }
  for (auto& [i, m] : den_) {
    if (any) d << "*";
    d << "(1-L^-" << i << ")";
    if (m != 1) d << "^" << m;
    any = true;
  }
  if (!any) os << "1";
  else if (const_den_ != 1 && den_.empty()) os << d.str();
  else os << "(" << d.str() << ")";
  return os.str();
}

std::string LRat::dsl() const {
  if (num_.empty()) return "0";
  std::ostringstream os;
  bool compound = num_.size() > 1;
  if (compound) os << "(";
  bool first = true;
  for (auto it = num_.rbegin(); it != num_.rend(); ++it) {
    int64_t c = it->second;
    int k = it->first;
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    int64_t a = c < 0 ? -c : c;
    if (k == 0) {
      os << a;
    } else {
      if (a != 1) os << a << "*";
      os << "L^(" << k << ")";
    }
  }
  if (compound) os << ")";
  if (const_den_ != 1 || !den_.empty()) {
    os << "/(";
    bool any = false;
    if (const_den_ != 1) {
      os << const_den_;
      any = true;
    }
    for (auto& [i, m] : den_) {
      if (any) os << "*";
      os << "(1 - L^(" << -i << "))";
      if (m != 1) os << "^" << m;
      any = true;
    }
    os << ")";
  }
  return os.str();
}

LRat LRat::parse(const std::string& text) {
  // Grammar of str(): "(" terms ")" "/" den ; den := "1" | int | "(" factors ")" | factor
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  size_t pos = 0;
  auto fail = [&](const std::string& why) -> std::invalid_argument {
    return std::invalid_argument("bad LRat text '" + text + "': " + why);
  };
  auto expect = [&](char c) {
    if (pos >= s.size() || s[pos] != c) throw fail(std::string("expected '") + c + "'");
    ++pos;
  };
  auto integer = [&]() {
    size_t start = pos;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) throw fail("expected integer");
    return std::stoll(s.substr(start, pos - start));
  };
  expect('(');
  LaurentPoly num;
  while (true) {
    int64_t c = integer();
    int k = 0;
    if (pos < s.size() && s[pos] == '*') {
      ++pos;
      expect('L');
      expect('^');
      k = static_cast<int>(integer());
    }
    if (c != 0) num[k] += c;
    if (pos < s.size() && s[pos] == '+') {
      ++pos;
      continue;
    }
    break;
  }
  expect(')');
  expect('/');
  std::vector<DenFactor> den;
  auto factor = [&]() {
    if (pos < s.size() && s[pos] == '(') {
      ++pos;
      expect('1');
      expect('-');
      expect('L');
      expect('^');
      expect('-');
      int i = static_cast<int>(integer());
      expect(')');
      int m = 1;
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        m = static_cast<int>(integer());
      }
      den.push_back({1, i, m});
    } else {
      den.push_back({integer(), 0, 1});
    }
  };
  if (pos < s.size() && s[pos] == '(' && s.compare(pos, 3, "(1-") != 0) {
    ++pos;
    factor();
    while (pos < s.size() && s[pos] == '*') {
      ++pos;
      factor();
    }
    expect(')');
  } else {
    factor();
  }
  if (pos != s.size()) throw fail("trailing input");
  return normalize(num, den);
}

namespace modp {

uint64_t add(uint64_t a, uint64_t b) {
  uint64_t r = a + b;
  return r >= kPrime ? r - kPrime : r;
}
uint64_t sub(uint64_t a, uint64_t b) { return a >= b ? a - b : a + kPrime - b; }
uint64_t mul(uint64_t a, uint64_t b) {
  unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
  uint64_t lo = static_cast<uint64_t>(r & kPrime);
  uint64_t hi = static_cast<uint64_t>(r >> 61);
  return add(lo, hi);
}
uint64_t pow(uint64_t a, int64_t e) {
  if (e < 0) {
    a = inv(a);
    e = -e;
  }
  uint64_t r = 1;
  while (e > 0) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}
uint64_t inv(uint64_t a) {
  if (a == 0) throw std::domain_error("inverse of zero modulo 2^61-1");
  return pow(a, static_cast<int64_t>(kPrime - 2));
}
uint64_t from_int(int64_t v) {
  int64_t r = v % static_cast<int64_t>(kPrime);
  if (r < 0) r += static_cast<int64_t>(kPrime);
  return static_cast<uint64_t>(r);
}

}  // namespace modp

}  // namespace cef
