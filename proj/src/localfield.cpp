#include "cef/localfield.hpp"

#include <cmath>
#include <numeric>
#include <regex>
#include <sstream>

namespace cef {

namespace {

constexpr int64_t kInfPrec = int64_t(1) << 40;

int64_t mod(int64_t a, int64_t p) {
  int64_t r = a % p;
  return r < 0 ? r + p : r;
}

int64_t mulmod(int64_t a, int64_t b, int64_t m) { return static_cast<int64_t>((__int128)a * b % m); }

int64_t powmod(int64_t b, int64_t e, int64_t m) {
  int64_t r = 1 % m;
  b = mod(b, m);
  while (e > 0) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

int64_t inv_mod_p(int64_t a, int64_t p) { return powmod(a, p - 2, p); }

}  // namespace

bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

LocalField::LocalField(FieldKind k, int64_t prime) : kind(k), p(prime) {
  if (!is_prime(p) || p > (int64_t(1) << 20)) throw std::invalid_argument("p must be a prime in [2, 2^20]");
}

std::string LocalField::name() const {
  return kind == FieldKind::PadicQ ? "Q_" + std::to_string(p) : "F_" + std::to_string(p) + "((t))";
}

// ---------------------------------------------------------------- Element

Element Element::zero(const LocalField& K, int64_t prec) {
  Element e;
  e.K_ = K;
  e.v_ = prec;
  return e;
}

Element Element::normalized(const LocalField& K, int64_t lo, std::vector<int64_t> digits, int64_t prec) {
  size_t k = 0;
  int64_t avail = std::max<int64_t>(0, prec - lo);
  if (static_cast<int64_t>(digits.size()) > avail) digits.resize(static_cast<size_t>(avail));
  while (k < digits.size() && digits[k] == 0) ++k;
  if (k == digits.size()) return zero(K, prec);
  Element e;
  e.K_ = K;
  e.v_ = lo + static_cast<int64_t>(k);
  e.d_.assign(digits.begin() + static_cast<long>(k), digits.end());
  return e;
}

Element Element::from_digits(const LocalField& K, int64_t v, const std::vector<int64_t>& digits) {
  for (auto d : digits)
    if (d < 0 || d >= K.p) throw std::invalid_argument("digit out of range");
  return normalized(K, v, digits, v + static_cast<int64_t>(digits.size()));
}

Element Element::from_int(const LocalField& K, int64_t n) {
  if (K.kind == FieldKind::LaurentF) {
    int64_t r = mod(n, K.p);
    if (r == 0) return zero(K, kInfPrec);
    std::vector<int64_t> d(static_cast<size_t>(K.exact_digits), 0);
    d[0] = r;
    return normalized(K, 0, d, K.exact_digits);
  }
  if (n == 0) return zero(K, kInfPrec);
  bool neg = n < 0;
  unsigned long long m = neg ? 0ULL - static_cast<unsigned long long>(n) : static_cast<unsigned long long>(n);
  int64_t v = 0;
  while (m % static_cast<unsigned long long>(K.p) == 0) {
    m /= static_cast<unsigned long long>(K.p);
    ++v;
  }
  std::vector<int64_t> d;
  for (int i = 0; i < K.exact_digits; ++i) {
    d.push_back(static_cast<int64_t>(m % static_cast<unsigned long long>(K.p)));
    m /= static_cast<unsigned long long>(K.p);
  }
  Element e = normalized(K, v, d, v + K.exact_digits);
  return neg ? -e : e;
}

Element Element::from_rational(const LocalField& K, const Rational& r) {
  if (K.kind == FieldKind::LaurentF && mod(r.den(), K.p) == 0)
    throw std::domain_error(r.str() + " is not defined in " + K.name());
  if (r.den() == 1) return from_int(K, r.num());
  return from_int(K, r.num()) * from_int(K, r.den()).inverse();
}

Element Element::uniformizer(const LocalField& K, int64_t k) {
  std::vector<int64_t> d(static_cast<size_t>(K.exact_digits), 0);
  d[0] = 1;
  return normalized(K, k, d, k + K.exact_digits);
}

Element Element::parse(const LocalField& K, const std::string& text) {
  static const std::regex re(R"(\s*v\s*=\s*(-?\d+)\s+digits\s*=\s*\[([\d,\s]*)\]\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw std::invalid_argument("bad element literal: " + text);
  int64_t v = std::stoll(m[1]);
  std::vector<int64_t> digits;
  std::stringstream ss(m[2]);
  std::string item;
  while (std::getline(ss, item, ','))
    if (item.find_first_not_of(" \t") != std::string::npos) digits.push_back(std::stoll(item));
  return from_digits(K, v, digits);
}

int64_t Element::ord() const {
  if (is_zero()) throw ZeroAtPrecision("element is zero modulo w^" + std::to_string(v_));
  return v_;
}

int64_t Element::ac() const {
  if (is_zero()) throw ZeroAtPrecision("element is zero modulo w^" + std::to_string(v_));
  return d_[0];
}

int64_t Element::digit_at(int64_t i) const {
  if (i >= prec()) throw InsufficientPrecision("digit " + std::to_string(i) + " beyond precision " + std::to_string(prec()));
  if (i < v_) return 0;
  return d_[static_cast<size_t>(i - v_)];
}

Element Element::truncated(int64_t prec) const {
  if (prec >= this->prec()) return *this;
  if (is_zero()) return zero(K_, prec);
  return normalized(K_, v_, d_, prec);
}

Element Element::operator-() const { return zero(K_, kInfPrec) - *this; }

namespace {

// Digit-wise combination over [lo, hi) with carries in Q_p.
std::vector<int64_t> combine(const Element& a, const Element& b, int64_t lo, int64_t hi, int sign) {
  const LocalField& K = a.field();
  std::vector<int64_t> out;
  out.reserve(static_cast<size_t>(hi - lo));
  int64_t carry = 0;
  for (int64_t i = lo; i < hi; ++i) {
    int64_t s = a.digit_at(i) + sign * b.digit_at(i);
    if (K.kind == FieldKind::LaurentF) {
      out.push_back(mod(s, K.p));
      continue;
    }
    s += carry;
    carry = 0;
    if (s < 0) {
      s += K.p;
      carry = -1;
    } else if (s >= K.p) {
      s -= K.p;
      carry = 1;
    }
    out.push_back(s);
  }
  return out;
}

Element add_sub(const Element& a, const Element& b, int sign) {
  int64_t hi = std::min(a.prec(), b.prec());
  int64_t lo = std::min(a.ord_lower(), b.ord_lower());
  if (lo >= hi) return Element::zero(a.field(), hi);
  return Element::from_digits(a.field(), lo, combine(a, b, lo, hi, sign));
}

}  // namespace

Element operator+(const Element& a, const Element& b) { return add_sub(a, b, 1); }
Element operator-(const Element& a, const Element& b) { return add_sub(a, b, -1); }

Element operator*(const Element& a, const Element& b) {
  const LocalField& K = a.K_;
  if (a.is_zero() || b.is_zero()) return Element::zero(K, a.v_ + b.v_);
  size_t n = std::min(a.d_.size(), b.d_.size());
  std::vector<int64_t> c(n, 0);
  if (K.kind == FieldKind::LaurentF) {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; i + j < n; ++j) c[i + j] = (c[i + j] + a.d_[i] * b.d_[j]) % K.p;
  } else {
    std::vector<__int128> acc(n, 0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; i + j < n; ++j) acc[i + j] += (__int128)a.d_[i] * b.d_[j];
    __int128 carry = 0;
    for (size_t k = 0; k < n; ++k) {
      __int128 s = acc[k] + carry;
      c[k] = static_cast<int64_t>(s % K.p);
      carry = s / K.p;
    }
  }
  return Element::normalized(K, a.v_ + b.v_, c, a.v_ + b.v_ + static_cast<int64_t>(n));
}

Element Element::inverse() const {
  if (is_zero()) throw ZeroAtPrecision("inverse of an element that is zero at precision");
  size_t n = d_.size();
  int64_t p = K_.p;
  int64_t inv0 = inv_mod_p(d_[0], p);
  std::vector<int64_t> r(n, 0), y(n, 0);
  r[0] = 1;
  for (size_t i = 0; i < n; ++i) {
    int64_t yi = mulmod(mod(r[i], p), inv0, p);
    y[i] = yi;
    if (K_.kind == FieldKind::LaurentF) {
      for (size_t j = i; j < n; ++j) r[j] = mod(r[j] - yi * d_[j - i], p);
      continue;
    }
    int64_t carry = 0;
    for (size_t j = i; j < n; ++j) {
      int64_t val = r[j] - yi * d_[j - i] - carry;
      carry = 0;
      if (val < 0) {
        carry = (-val + p - 1) / p;
        val += carry * p;
      }
      r[j] = val;
    }
  }
  return normalized(K_, -v_, y, -v_ + static_cast<int64_t>(n));
}

Element Element::pow(int64_t n) const {
  if (n < 0) return inverse().pow(-n);
  Element r = from_int(K_, 1), b = *this;
  while (n > 0) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return r;
}

std::string Element::str() const {
  std::ostringstream os;
  os << "v=" << v_ << " digits=[";
  for (size_t i = 0; i < d_.size(); ++i) os << (i ? "," : "") << d_[i];
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------- characters

Character::Character(const LocalField& field, const Element& c) : K(field), twist(c) {
  if (!c.is_zero() && c.ord() < 0) throw std::invalid_argument("twist must have ord >= 0");
}

std::complex<double> res_char(int64_t r, int64_t p) {
  long double ang = 2.0L * M_PIl * static_cast<long double>(mod(r, p)) / static_cast<long double>(p);
  return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

namespace {

std::complex<double> unit_at(long double frac) {
  frac -= std::floor(frac);
  long double ang = 2.0L * M_PIl * frac;
  return {static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))};
}

// Sum of digit_i * p^(i - shift) over i < shift, modulo 1.
long double padic_fraction(const Element& x, int64_t shift) {
  if (x.ord_lower() >= shift) return 0;
  if (x.prec() < shift) throw InsufficientPrecision("character value needs digits up to w^" + std::to_string(shift - 1));
  long double f = 0, p = static_cast<long double>(x.field().p);
  // Digits far below the shift are beyond long double resolution.
  int64_t stop = std::max(x.ord_lower(), shift - 64);
  for (int64_t i = shift - 1; i >= stop; --i)
    f += static_cast<long double>(x.digit_at(i)) * std::pow(p, static_cast<long double>(i - shift));
  return f - std::floor(f);
}

}  // namespace

std::complex<double> psi(const Character& ch, const Element& x) {
  const LocalField& K = ch.K;
  std::complex<double> val;
  if (K.kind == FieldKind::PadicQ) {
    val = unit_at(padic_fraction(x, 1));
  } else {
    int64_t s = 0;
    if (x.ord_lower() < 1) {
      if (x.prec() < 1) throw InsufficientPrecision("character value needs the constant coefficient");
      for (int64_t i = x.ord_lower(); i <= 0; ++i) s = (s + x.digit_at(i)) % K.p;
    }
    val = res_char(s, K.p);
  }
  if (ch.twist.is_zero()) return val;
  Element y = ch.twist * x;
  if (K.kind == FieldKind::PadicQ) return val * unit_at(padic_fraction(y, 0));
  if (y.ord_lower() >= 0) return val;
  return val * res_char(y.digit_at(-1), K.p);
}

std::vector<Character> character_family(const LocalField& K, int depth) {
  std::vector<Character> out;
  int64_t count = 1;
  for (int i = 0; i < depth; ++i) count *= K.p;
  for (int64_t c = 0; c < count; ++c) {
    std::vector<int64_t> d(static_cast<size_t>(std::max(depth, K.exact_digits)), 0);
    int64_t m = c;
    for (int i = 0; i < depth; ++i) {
      d[static_cast<size_t>(i)] = m % K.p;
      m /= K.p;
    }
    out.emplace_back(K, Element::from_digits(K, 0, d));
  }
  return out;
}

int hensel_exponent(const LocalField& K, int64_t m, int cap) {
  if (m < 1) throw std::invalid_argument("power index must be positive");
  int a = 0;
  for (int64_t k = m; k % K.p == 0; k /= K.p) ++a;
  if (a == 0) return 1;
  if (K.kind == FieldKind::LaurentF)
    throw HenselCapExceeded("1 + t^e R is never inside the p-th powers of " + K.name());
  int e = K.p == 2 ? a + 2 : a + 1;
  if (e > cap) throw HenselCapExceeded("Hensel exponent " + std::to_string(e) + " exceeds the cap");
  return e;
}

bool in_coset(const Element& x, const Element& lambda, int64_t m) {
  Element u = x * lambda.inverse();
  int64_t k = u.ord();
  if (m == 1) return true;
  if (mod(k, m) != 0) return false;
  const LocalField& K = x.field();
  int e = hensel_exponent(K, m);
  if (u.prec() - k < e) throw InsufficientPrecision("coset membership needs " + std::to_string(e) + " digits");
  if (e == 1) {
    int64_t g = std::gcd(m, K.p - 1);
    return powmod(u.ac(), (K.p - 1) / g, K.p) == 1;
  }
  int64_t pe = 1;
  for (int i = 0; i < e; ++i) pe *= K.p;
  if (pe > 1000000) throw HenselCapExceeded("coset search too large");
  int64_t target = 0, scale = 1;
  for (int i = 0; i < e; ++i, scale *= K.p) target += u.digit_at(k + i) * scale;
  for (int64_t y = 1; y < pe; ++y)
    if (y % K.p != 0 && powmod(y, m, pe) == target) return true;
  return false;
}

}  // namespace cef
