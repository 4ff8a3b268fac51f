#include "cef/cells.hpp"

#include <algorithm>
#include <numeric>

namespace cef {

namespace {

using Poly = std::map<int, VTerm>;  // exponent of t -> coefficient

Poly poly_of(const VTerm& f, const std::string& var) { return f.coeffs_in(var); }

int degree(const Poly& p) { return p.empty() ? -1 : p.rbegin()->first; }

// Divides by (t - c); nullopt if the remainder is nonzero.
std::optional<Poly> divide_linear(const Poly& p, const VTerm& c) {
  int n = degree(p);
  if (n < 1) return std::nullopt;
  std::vector<VTerm> a(static_cast<size_t>(n) + 1);
  for (auto& [k, v] : p) a[static_cast<size_t>(k)] = v;
  std::vector<VTerm> b(static_cast<size_t>(n));
  b[static_cast<size_t>(n - 1)] = a[static_cast<size_t>(n)];
  for (int k = n - 1; k >= 1; --k) b[static_cast<size_t>(k - 1)] = a[static_cast<size_t>(k)] + c * b[static_cast<size_t>(k)];
  VTerm rem = a[0] + c * b[0];
  if (!rem.is_zero()) return std::nullopt;
  Poly q;
  for (int k = 0; k < n; ++k)
    if (!b[static_cast<size_t>(k)].is_zero()) q[k] = b[static_cast<size_t>(k)];
  return q;
}

std::vector<int64_t> divisors(int64_t n) {
  n = std::abs(n);
  std::vector<int64_t> out;
  for (int64_t d = 1; d * d <= n && d <= 100000; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d != n / d) out.push_back(n / d);
    }
  return out;
}

// Rational roots of a polynomial with constant coefficients.
std::vector<VTerm> rational_roots(const Poly& p) {
  std::vector<Rational> c;
  for (auto& [k, v] : p) {
    auto r = v.as_constant();
    if (!r) return {};
    c.push_back(*r);
  }
  if (p.begin()->first != 0) return {};
  int64_t l = 1;
  for (auto& r : c) l = std::lcm(l, r.den());
  int64_t a0 = (p.begin()->second.as_constant().value() * Rational(l)).num();
  int64_t an = (p.rbegin()->second.as_constant().value() * Rational(l)).num();
  std::vector<VTerm> out;
  for (int64_t num : divisors(a0))
    for (int64_t den : divisors(an))
      for (int64_t s : {1, -1}) {
        VTerm cand(Rational(s * num, den));
        if (divide_linear(p, cand) && std::find(out.begin(), out.end(), cand) == out.end()) out.push_back(cand);
      }
  return out;
}

size_t center_index(std::vector<VTerm>& centers, const VTerm& c) {
  auto it = std::find(centers.begin(), centers.end(), c);
  if (it != centers.end()) return static_cast<size_t>(it - centers.begin());
  centers.push_back(c);
  return centers.size() - 1;
}

// Factors f over the centers, adding new centers when add is true.
std::optional<Factorization> factor_impl(const VTerm& f, const std::string& var, std::vector<VTerm>& centers, bool add) {
  Factorization out;
  int lo = f.min_exponent(var);
  VTerm g = f;
  if (lo < 0) g = g * VTerm::var(var).pow(-lo);
  Poly p = poly_of(g, var);
  int shift = p.empty() ? 0 : p.begin()->first;
  if (shift != 0) {
    Poly q;
    for (auto& [k, v] : p) q[k - shift] = v;
    p = q;
  }
  int zero_exp = shift + std::min(lo, 0);
  if (zero_exp != 0) {
    if (!add && std::find(centers.begin(), centers.end(), VTerm()) == centers.end()) return std::nullopt;
    out.factors.push_back({center_index(centers, VTerm()), zero_exp});
  }
  auto peel = [&](const VTerm& c) {
    int k = 0;
    while (auto q = divide_linear(p, c)) {
      p = *q;
      ++k;
    }
    if (k > 0) out.factors.push_back({center_index(centers, c), k});
  };
  if (degree(p) == 1) {
    auto lead = p.at(1).as_monomial();
    if (!lead) throw UnsupportedShape("coefficient of " + var + " in " + f.str() + " is not a monomial");
    VTerm c = -(p.count(0) ? p.at(0) : VTerm()) * p.at(1).pow(-1);
    if (!add && std::find(centers.begin(), centers.end(), c) == centers.end()) return std::nullopt;
    peel(c);
  } else if (degree(p) > 1) {
    for (size_t i = 0; i < centers.size() && degree(p) > 0; ++i) peel(centers[i]);
    if (add && degree(p) > 0)
      for (const auto& r : rational_roots(p)) peel(r);
    if (degree(p) == 1 && add) {
      auto lead = p.at(1).as_monomial();
      if (lead) peel(-(p.count(0) ? p.at(0) : VTerm()) * p.at(1).pow(-1));
    }
  }
  if (degree(p) != 0) {
    if (!add) return std::nullopt;
    throw UnsupportedShape(f.str() + " does not factor into linear factors in " + var);
  }
  out.unit = p.at(0);
  if (!out.unit.as_monomial()) throw UnsupportedShape("unit part " + out.unit.str() + " of " + f.str() + " is not a monomial");
  std::sort(out.factors.begin(), out.factors.end());
  return out;
}

RTerm rpow_signed(const RTerm& r, int e) {
  if (e >= 0) return r.pow(e);
  if (!r.as_monomial()) throw UnsupportedShape("negative power of the non-monomial residue term " + r.str());
  return r.pow(e);
}

// Leading coefficient used to compare valued terms up to a constant.
Rational lead(const VTerm& v) { return v.terms().rbegin()->second; }

bool proportional(const VTerm& a, const VTerm& b) {
  if (a.is_zero() || b.is_zero()) return false;
  return a * VTerm(lead(b)) == b * VTerm(lead(a));
}

// ord of a center difference: a linear form when d is a monomial, or read
// from an equality on ord(d) among the base conditions.
LinForm ord_of_difference(const VTerm& d, const std::vector<CondAtom>& base) {
  if (auto m = d.as_monomial()) return m->second.ord();
  for (const auto& c : base) {
    auto* oc = std::get_if<OrdCmp>(&c);
    if (!oc || oc->atom.op != PresOp::Eq || !proportional(oc->v, d)) continue;
    Rational k = oc->atom.f.coeff(kOrdSlot);
    return Rational(-1) / k * oc->atom.f.without(kOrdSlot);
  }
  throw DegenerateCenters("ord(" + d.str() + ") is not determined; split on it first");
}

bool mentions_var(const LinForm& f, const std::string& var) { return f.mentions(ord_symbol(var)); }

void collect_rterm_targets(const RTerm& r, const std::string& var, std::vector<VTerm>& out) {
  for (auto& [m, c] : r.terms())
    for (auto& [a, e] : m) {
      if (a.kind == RAtom::Kind::AcVar && a.name == var) out.push_back(VTerm::var(var));
      if (a.kind == RAtom::Kind::AcOpaque && a.arg.mentions(var)) out.push_back(a.arg);
    }
}

}  // namespace

std::vector<VTerm> targets_of(const CExpTerm& t, const std::string& var) {
  std::vector<VTerm> out;
  if (mentions_var(t.lexp, var)) out.push_back(VTerm::var(var));
  for (const auto& c : t.conds) {
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, PresAtom>) {
            if (mentions_var(a.f, var)) out.push_back(VTerm::var(var));
          } else if constexpr (std::is_same_v<T, OrdCmp>) {
            if (a.v.mentions(var)) out.push_back(a.v);
            if (mentions_var(a.atom.f, var)) out.push_back(VTerm::var(var));
          } else if constexpr (std::is_same_v<T, CosetIn>) {
            if (a.lambda.mentions(var)) throw UnsupportedShape("coset base mentions " + var);
            if (a.v.mentions(var)) out.push_back(a.v);
          } else {
            collect_rterm_targets(a.r, var, out);
          }
        },
        c);
  }
  collect_rterm_targets(t.resExpArg, var, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<VTerm> find_centers(const std::vector<VTerm>& targets, const std::string& var) {
  std::vector<VTerm> centers;
  // Linear and monomial targets first so higher-degree ones can be divided
  // by their centers.
  std::vector<VTerm> sorted = targets;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [&](const VTerm& a, const VTerm& b) { return a.degree(var) < b.degree(var); });
  for (const auto& f : sorted) factor_impl(f, var, centers, true);
  if (centers.empty()) centers.push_back(VTerm());
  std::sort(centers.begin(), centers.end());
  return centers;
}

Factorization Decomposition::factor(const VTerm& f) const {
  std::vector<VTerm> c = centers;
  auto r = factor_impl(f, var, c, false);
  if (!r) throw UnsupportedShape(f.str() + " does not factor over the centers");
  return *r;
}

LinForm Decomposition::ord_on(size_t k, const VTerm& f) const {
  Factorization fa = factor(f);
  LinForm o = fa.unit.as_monomial()->second.ord();
  for (auto& [i, e] : fa.factors) o += Rational(e) * cells[k].factor_ord[i];
  return o;
}

std::optional<RTerm> Decomposition::ac_on(size_t k, const VTerm& f) const {
  Factorization fa = factor(f);
  RTerm a = RTerm::ac(fa.unit);
  for (auto& [i, e] : fa.factors) {
    const RTerm& b = cells[k].factor_ac[i];
    if (e < 0 && !b.as_monomial()) return std::nullopt;
    a = a * rpow_signed(b, e);
  }
  return a;
}

LinForm translate_linform(const Decomposition& d, size_t k, const LinForm& f) {
  std::string s = ord_symbol(d.var);
  if (!f.mentions(s)) return f;
  return f.substitute(s, d.ord_on(k, VTerm::var(d.var)));
}

RTerm translate_rterm(const Decomposition& d, size_t k, const RTerm& r) {
  if (!r.mentions_vf(d.var)) return r;
  RTerm out;
  for (auto& [m, c] : r.terms()) {
    RTerm prod(c);
    for (auto& [a, e] : m) {
      if (!a.mentions_vf(d.var)) {
        prod = prod * RTerm::atom(a, e);
        continue;
      }
      VTerm f = a.kind == RAtom::Kind::AcVar ? VTerm::var(a.name) : a.arg;
      auto ac = d.ac_on(k, f);
      if (!ac) throw UnsupportedShape("ac(" + f.str() + ")^" + std::to_string(e) + " is not a residue polynomial on the cell");
      prod = prod * rpow_signed(*ac, e);
    }
    out += prod;
  }
  return out;
}

std::vector<CondAtom> translate_conds(const Decomposition& d, size_t k, const std::vector<CondAtom>& conds) {
  std::vector<CondAtom> out;
  for (const auto& c : conds) {
    std::visit(
        [&](const auto& a) {
          using T = std::decay_t<decltype(a)>;
          if constexpr (std::is_same_v<T, PresAtom>) {
            PresAtom b = a;
            b.f = translate_linform(d, k, a.f);
            out.push_back(b);
          } else if constexpr (std::is_same_v<T, OrdCmp>) {
            PresAtom b = a.atom;
            b.f = translate_linform(d, k, b.f);
            if (a.v.mentions(d.var)) {
              b.f = b.f.substitute(kOrdSlot, d.ord_on(k, a.v));
              out.push_back(b);
            } else {
              out.push_back(OrdCmp{a.v, b});
            }
          } else if constexpr (std::is_same_v<T, CosetIn>) {
            if (!a.v.mentions(d.var)) {
              out.push_back(a);
              return;
            }
            // p not dividing m: membership is ord(v) == ord(lambda) mod m plus
            // ac(v)/ac(lambda) being an m-th power residue.
            auto lam = a.lambda.as_monomial();
            if (!lam) throw UnsupportedShape("coset base " + a.lambda.str() + " is not a monomial");
            if (a.m == 1) return;
            out.push_back(PresAtom::cong(d.ord_on(k, a.v) - lam->second.ord(), 0, a.m));
            auto ac = d.ac_on(k, a.v);
            if (!ac) throw UnsupportedShape("ac of " + a.v.str() + " on the cell");
            out.push_back(PowRes{*ac * RTerm::ac_pow(a.lambda, static_cast<int>(a.m - 1)), a.m});
          } else if constexpr (std::is_same_v<T, ResCmp>) {
            out.push_back(ResCmp{translate_rterm(d, k, a.r), a.neq});
          } else {
            out.push_back(PowRes{translate_rterm(d, k, a.r), a.m});
          }
        },
        c);
  }
  return out;
}

Decomposition decompose(const std::vector<CondAtom>& conds, const std::vector<VTerm>& targets, const std::string& var,
                        const std::vector<CondAtom>& base, const std::set<std::string>& used) {
  Decomposition d;
  d.var = var;
  std::vector<VTerm> all = targets;
  {
    CExpTerm probe;
    probe.conds = conds;
    for (auto& v : targets_of(probe, var)) all.push_back(v);
  }
  d.centers = find_centers(all, var);
  const size_t n = d.centers.size();

  std::set<std::string> names = used;
  names.insert(var);
  std::string j = fresh_name("_j", names);
  names.insert(j);
  std::string xi = fresh_name("_xi", names);

  // delta[a][b] = ord(c_b - c_a), acd[a][b] = ac(c_b - c_a).
  std::vector<std::vector<LinForm>> delta(n, std::vector<LinForm>(n));
  std::vector<std::vector<RTerm>> acd(n, std::vector<RTerm>(n));
  for (size_t a = 0; a < n; ++a)
    for (size_t b = 0; b < n; ++b)
      if (a != b) {
        VTerm diff = d.centers[b] - d.centers[a];
        delta[a][b] = ord_of_difference(diff, base);
        acd[a][b] = RTerm::ac(diff);
      }

  LinForm J = LinForm::var(j);
  RTerm X = RTerm::var(xi);
  for (size_t a = 0; a < n; ++a) {
    // Each other center b > a contributes three cases, b < a one.
    std::vector<size_t> others;
    for (size_t b = 0; b < n; ++b)
      if (b != a) others.push_back(b);
    std::vector<int> choice(others.size(), 0);
    while (true) {
      Cell cell;
      cell.center = a;
      cell.order_var = j;
      cell.ac_var = xi;
      cell.factor_ord.assign(n, LinForm());
      cell.factor_ac.assign(n, RTerm());
      cell.factor_ord[a] = J;
      cell.factor_ac[a] = X;
      cell.conds.push_back(ResCmp{X, true});
      for (size_t i = 0; i < others.size(); ++i) {
        size_t b = others[i];
        const LinForm& dl = delta[a][b];
        int ch = b < a ? 2 : choice[i];
        if (ch == 0) {
          cell.conds.push_back(pres_cmp(J, CmpOp::Lt, dl));
          cell.factor_ord[b] = J;
          cell.factor_ac[b] = X;
        } else if (ch == 1) {
          cell.conds.push_back(pres_cmp(J, CmpOp::Eq, dl));
          cell.conds.push_back(ResCmp{X - acd[a][b], true});
          cell.factor_ord[b] = dl;
          cell.factor_ac[b] = X - acd[a][b];
        } else {
          cell.conds.push_back(pres_cmp(J, CmpOp::Gt, dl));
          cell.factor_ord[b] = dl;
          cell.factor_ac[b] = -acd[a][b];
        }
      }
      d.cells.push_back(cell);
      size_t k = d.cells.size() - 1;
      bool keep = true;
      try {
        auto tr = translate_conds(d, k, conds);
        d.cells[k].conds.insert(d.cells[k].conds.end(), tr.begin(), tr.end());
        CExpTerm probe;
        probe.conds = d.cells[k].conds;
        probe.conds.insert(probe.conds.end(), base.begin(), base.end());
        keep = maybe_satisfiable(pres_part(probe));
        for (const auto& c : d.cells[k].conds)
          if (auto* rc = std::get_if<ResCmp>(&c))
            if (auto v = rc->r.as_constant(); v && v->is_zero() == rc->neq) keep = false;
      } catch (...) {
        d.cells.pop_back();
        throw;
      }
      if (!keep) {
        d.cells.pop_back();
      } else {
        std::vector<PreparedTerm> prep;
        for (const auto& f : targets) prep.push_back({f, d.ord_on(k, f), d.ac_on(k, f)});
        d.prepared.push_back(prep);
      }
      size_t i = 0;
      while (i < others.size()) {
        if (others[i] < a) {
          ++i;
          continue;
        }
        if (++choice[i] < 3) break;
        choice[i] = 0;
        ++i;
      }
      if (i == others.size()) break;
    }
  }
  return d;
}

std::pair<VTerm, VTerm> prepare_affine(const VTerm& g, const std::string& var, const VTerm& center) {
  if (g.min_exponent(var) < 0 || g.degree(var) > 1) throw NotAffine(g.str() + " is not affine in " + var);
  Poly p = poly_of(g, var);
  VTerm u = p.count(1) ? p.at(1) : VTerm();
  VTerm w = (p.count(0) ? p.at(0) : VTerm()) + u * center;
  return {u, w};
}

}  // namespace cef
