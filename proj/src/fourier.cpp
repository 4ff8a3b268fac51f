#include "cef/fourier.hpp"

#include "cef/equivalence.hpp"
#include "cef/rewrite.hpp"

namespace cef {

namespace {

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

void declare_params(CExp& e, const LinForm& f) {
  for (auto& [n, c] : f.coef)
    if (!ord_symbol_var(n)) e.ctx[n] = Sort::Int;
}

CExp with_sort(CExp e, const std::string& v, Sort s) {
  e.ctx.emplace(v, s);
  return e;
}

CExp from_conds(std::vector<CondAtom> conds, const std::vector<std::string>& vars, const LinForm& alpha) {
  CExpTerm t;
  t.conds = std::move(conds);
  CExp e = CExp::from_term(t);
  for (const auto& v : vars) e.ctx[v] = Sort::VF;
  declare_params(e, alpha);
  return normalize(e);
}

std::vector<std::string> fresh_names(const std::string& prefix, size_t n, std::set<std::string>& used) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    out.push_back(fresh_name(prefix, used));
    used.insert(out.back());
  }
  return out;
}

}  // namespace

CExp phi(const LinForm& alpha, const std::vector<std::string>& vars) {
  std::vector<CondAtom> c;
  for (const auto& v : vars) c.push_back(ord_cmp(VTerm::var(v), CmpOp::Ge, alpha));
  return from_conds(c, vars, alpha);
}

CExp psi(const LinForm& alpha, const std::vector<std::string>& vars) {
  std::vector<CondAtom> c;
  for (const auto& v : vars) c.push_back(ord_cmp(VTerm::var(v), CmpOp::Eq, alpha));
  return from_conds(c, vars, alpha);
}

CExp psi_ac(const LinForm& alpha, const std::vector<RTerm>& xi, const std::vector<std::string>& vars) {
  if (xi.size() != vars.size()) throw std::invalid_argument("one angular component per variable");
  std::vector<CondAtom> c;
  for (size_t i = 0; i < vars.size(); ++i) {
    c.push_back(ord_cmp(VTerm::var(vars[i]), CmpOp::Eq, alpha));
    c.push_back(ac_eq(VTerm::var(vars[i]), xi[i]));
    c.push_back(res_cmp(xi[i], true));
  }
  CExp e = from_conds(c, vars, alpha);
  for (const auto& r : xi)
    for (const auto& n : r.res_vars()) e.ctx[n] = Sort::Res;
  return e;
}

IntegrationResult fourier_vf(const CExp& e, const std::vector<std::string>& vars) {
  std::set<std::string> used = names_of(e);
  used.insert(vars.begin(), vars.end());
  auto ys = fresh_names("_y", vars.size(), used);
  CExp f = e;
  CExpTerm k;
  for (size_t i = 0; i < vars.size(); ++i) {
    f = rename(with_sort(f, vars[i], Sort::VF), vars[i], ys[i]);
    k.expArg += VTerm::var(vars[i]) * VTerm::var(ys[i]);
  }
  CExp kernel = CExp::from_term(k);
  for (const auto& v : vars) kernel.ctx[v] = Sort::VF;
  IntegrationResult r = integrate_all(mul(f, kernel, false), ys);
  for (const auto& v : vars) r.value.ctx[v] = Sort::VF;
  return r;
}

CExp fourier_res(const CExp& e, const std::vector<std::string>& vars) {
  std::set<std::string> used = names_of(e);
  used.insert(vars.begin(), vars.end());
  auto ys = fresh_names("_r", vars.size(), used);
  CExp f = e;
  CExpTerm k;
  for (size_t i = 0; i < vars.size(); ++i) {
    f = rename(with_sort(f, vars[i], Sort::Res), vars[i], ys[i]);
    k.resExpArg += RTerm::var(vars[i]) * RTerm::var(ys[i]);
  }
  CExp kernel = CExp::from_term(k);
  for (const auto& v : vars) kernel.ctx[v] = Sort::Res;
  CExp out = mul(f, kernel, false);
  for (const auto& y : ys) out = sum_res(out, y);
  for (const auto& v : vars) out.ctx[v] = Sort::Res;
  return out;
}

IntegrationResult convolve(const CExp& f, const CExp& g, const std::vector<std::string>& vars) {
  std::set<std::string> used = names_of(f);
  auto gu = names_of(g);
  used.insert(gu.begin(), gu.end());
  used.insert(vars.begin(), vars.end());
  auto zs = fresh_names("_z", vars.size(), used);
  CExp a = f, b = g;
  for (size_t i = 0; i < vars.size(); ++i) {
    a = substitute(pin_orders(a, vars[i]), vars[i], VTerm::var(vars[i]) - VTerm::var(zs[i]));
    b = rename(with_sort(b, vars[i], Sort::VF), vars[i], zs[i]);
  }
  for (const auto& z : zs) a.ctx[z] = Sort::VF;
  IntegrationResult r = integrate_all(mul(a, b), zs);
  r.value = simplify(split_characters(r.value));
  for (const auto& v : vars) r.value.ctx[v] = Sort::VF;
  return r;
}

CExp reflect(const CExp& e, const std::vector<std::string>& vars) {
  CExp out = e;
  for (const auto& v : vars) {
    auto it = out.ctx.find(v);
    if (it != out.ctx.end() && it->second == Sort::Res) {
      CExp r;
      r.ctx = out.ctx;
      for (const auto& t : out.terms) r.terms.push_back(substitute_res(t, v, -RTerm::var(v)));
      out = normalize(r);
    } else {
      out = substitute(out, v, -VTerm::var(v));
    }
  }
  return out;
}

SchwartzBruhatReport schwartz_bruhat(const CExp& e, const std::vector<std::string>& vars, int64_t alpha0) {
  SchwartzBruhatReport rep;
  rep.compact = check_equal(mul(e, phi(LinForm(Rational(-alpha0)), vars)), e).equal();
  IntegrationResult c = convolve(e, phi(LinForm(Rational(alpha0)), vars), vars);
  if (c.status == IntegrationStatus::Integrable) {
    CExp target = e;
    for (auto& t : target.terms) t.lexp = t.lexp - LinForm(Rational(alpha0 * static_cast<int64_t>(vars.size())));
    rep.locally_constant = check_equal(c.value, normalize(target)).equal();
  }
  return rep;
}

bool is_schwartz_bruhat(const CExp& e, const std::vector<std::string>& vars, int64_t alpha0) {
  return schwartz_bruhat(e, vars, alpha0).holds();
}

}  // namespace cef
