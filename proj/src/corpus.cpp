#include "cef/corpus.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cef/dsl.hpp"
#include "cef/equivalence.hpp"
#include "cef/fourier.hpp"
#include "cef/interpret.hpp"

namespace cef {

using nlohmann::json;

namespace {

std::optional<Sort> sort_in(const CExp& e, const std::string& name) {
  if (auto it = e.ctx.find(name); it != e.ctx.end()) return it->second;
  for (const auto& t : e.terms) {
    if (free_res(t).count(name)) return Sort::Res;
    if (free_int(t).count(name)) return Sort::Int;
    if (free_vf(t).count(name)) return Sort::VF;
  }
  return std::nullopt;
}

CExp times_L(CExp e, int64_t k) {
  for (auto& t : e.terms) t.lexp = t.lexp + LinForm(Rational(k));
  return normalize(e);
}

std::string verdict_text(const EquivalenceReport& r) {
  return r.detail.empty() ? verdict_name(r.verdict) : verdict_name(r.verdict) + ": " + r.detail;
}

CheckResult exact_check(const std::string& name, const CExp& a, const CExp& b) {
  auto r = check_equal(a, b);
  CheckResult out{name, r.exact(), 0, ""};
  if (!out.passed) out.detail = verdict_text(r) + "\n  lhs " + print_expr(a) + "\n  rhs " + print_expr(b);
  return out;
}

// Values still carrying residue sums are accepted when partial is set: they
// specialize by point counting.
std::optional<CExp> integrable(const IntegrationResult& r, CheckResult& out, bool partial = false) {
  if (r.status == IntegrationStatus::Integrable) return r.value;
  if (partial && r.status == IntegrationStatus::PartiallySymbolic) return r.value;
  out.passed = false;
  out.detail = std::string("status ") + status_name(r.status) + ": " + print_expr(r.value);
  return std::nullopt;
}

// Runs body and turns library errors into a failed check.
template <class F>
CheckResult guarded(const std::string& name, F body) {
  try {
    return body();
  } catch (const std::exception& ex) {
    return {name, false, 0, ex.what()};
  }
}

CorpusCase read_case(const json& j, const std::string& kind, const std::string& file) {
  CorpusCase c;
  c.file = file;
  c.kind = kind;
  c.name = j.at("name").get<std::string>();
  c.note = j.value("note", "");
  c.dsl = j.value("dsl", "");
  c.bind = j.value("bind", std::vector<std::string>{});
  if (j.contains("expected")) c.expected = j.at("expected").get<std::string>();
  c.vars = j.value("vars", std::vector<std::string>{});
  c.alpha0 = j.value("alpha0", int64_t{0});
  c.operands = j.value("operands", std::vector<std::string>{});
  c.box.depth = j.value("depth", 5);
  if (j.contains("box"))
    for (auto& [v, b] : j.at("box").items()) {
      if (b.is_array())
        c.box.ints.push_back({v, b.at(0).get<int64_t>(), b.at(1).get<int64_t>()});
      else
        c.box.vf.push_back({v, b.get<int64_t>()});
    }
  c.at = j.value("at", std::map<std::string, int64_t>{});
  if (kind == "integral") {
    CExp e = c.expr();
    for (const auto& v : c.bind) {
      auto s = sort_in(e, v);
      if (s == Sort::Res) c.box.res.push_back(v);
      bool boxed = false;
      for (auto& r : c.box.vf) boxed |= r.var == v;
      for (auto& r : c.box.ints) boxed |= r.var == v;
      if ((s == Sort::VF || s == Sort::Int || !s) && !boxed) throw CorpusError(c.name + ": no box for " + v);
    }
  } else if (kind == "convolution") {
    if (c.operands.size() != 2 && c.operands.size() != 3) throw CorpusError(c.name + ": two or three operands");
    for (const auto& o : c.operands) parse(o);
  } else if (kind == "schwartz-bruhat" || kind == "residue") {
    c.expr();
  } else {
    throw CorpusError(file + ": unknown kind " + kind);
  }
  return c;
}

}  // namespace

CExp CorpusCase::expr() const {
  try {
    return parse(dsl);
  } catch (const SyntaxError& ex) {
    throw CorpusError(name + ": " + ex.what());
  }
}

CExp CorpusCase::closed_expr() const {
  CExp e = expr();
  for (auto& [n, v] : at) {
    auto s = sort_in(e, n);
    CExp out;
    out.ctx = e.ctx;
    out.ctx.erase(n);
    for (const auto& t : e.terms)
      out.terms.push_back(s == Sort::Res ? substitute_res(t, n, RTerm(Rational(v)))
                                         : substitute_int(t, n, LinForm(Rational(v))));
    e = normalize(out);
  }
  return e;
}

Point CorpusCase::params(const LocalField&) const {
  Point pt;
  CExp e = expr();
  for (auto& [n, v] : at) {
    if (sort_in(e, n) == Sort::Res)
      pt.res[n] = v;
    else
      pt.ints[n] = v;
  }
  return pt;
}

std::vector<CorpusCase> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw CorpusError(path + ": " + ex.what());
  }
  std::vector<CorpusCase> out;
  const std::string kind = j.at("kind").get<std::string>();
  for (const auto& c : j.at("cases")) {
    try {
      out.push_back(read_case(c, kind, path));
    } catch (const json::exception& ex) {
      throw CorpusError(path + ": " + ex.what());
    }
  }
  return out;
}

CheckResult check_symbolic(const CorpusCase& c) {
  return guarded("symbolic", [&] {
    CheckResult out{"symbolic", true, 0, ""};
    auto v = integrable(integrate_all(c.expr(), c.bind), out, true);
    if (!v || !c.expected) return out;
    return exact_check("symbolic", *v, parse(*c.expected));
  });
}

CheckResult check_specialization(const CorpusCase& c, int64_t p, double tol) {
  const std::string name = "specialize p=" + std::to_string(p);
  return guarded(name, [&] {
    CheckResult out{name, true, 0, ""};
    CExp e = c.expr();
    auto v = integrable(integrate_all(e, c.bind), out, true);
    if (!v) return out;
    LocalField K(FieldKind::PadicQ, p);
    Character ch(K);
    Point pt = c.params(K);
    auto sym = interpret(*v, ch, pt);
    OracleResult num = numeric_integrate(e, ch, c.box, pt);
    out.delta = std::abs(sym - num.value);
    out.passed = out.delta <= tol && !num.truncated;
    std::ostringstream os;
    os << "symbolic " << sym << " numeric " << num.value;
    if (num.truncated) os << " (truncated)";
    out.detail = os.str();
    return out;
  });
}

CheckResult check_fubini(const CorpusCase& c, double tol) {
  return guarded("fubini", [&] {
    CheckResult out{"fubini", true, 0, ""};
    CExp e = c.expr();
    auto a = integrable(integrate_all(e, c.bind), out, true);
    if (!a) return out;
    std::vector<std::string> rev(c.bind.rbegin(), c.bind.rend());
    auto b = integrable(integrate_all(e, rev), out, true);
    if (!b) return out;
    out = exact_check("fubini", *a, *b);
    for (int64_t p : {5, 7}) {
      LocalField K(FieldKind::PadicQ, p);
      Character ch(K);
      Point pt = c.params(K);
      out.delta = std::max(out.delta, std::abs(interpret(*a, ch, pt) - interpret(*b, ch, pt)));
    }
    if (out.delta > tol) out.passed = false;
    return out;
  });
}

CheckResult check_transfer(const CorpusCase& c, const std::vector<int64_t>& primes, int twist_depth, double tol) {
  return guarded("transfer", [&] {
    TransferReport rep = transfer_compare(c.closed_expr(), primes, twist_depth, c.box, tol);
    CheckResult out{"transfer", rep.pattern_agrees, rep.twist_stable ? rep.max_discrepancy : 0, ""};
    if (rep.twist_stable && rep.max_discrepancy > tol) out.passed = false;
    std::ostringstream os;
    os << (rep.twist_stable ? "twist-stable" : "twist-dependent") << ", max discrepancy " << rep.max_discrepancy
       << ", vanishing pattern " << (rep.pattern_agrees ? "agrees" : "differs");
    out.detail = os.str();
    return out;
  });
}

CheckResult check_sb_inversion(const CorpusCase& c) {
  return guarded("inversion", [&] {
    CheckResult out{"inversion", true, 0, ""};
    CExp e = c.expr();
    auto sb = schwartz_bruhat(e, c.vars, c.alpha0);
    if (!sb.holds()) {
      out.passed = false;
      out.detail = std::string("not Schwartz-Bruhat at alpha0: compact ") + (sb.compact ? "yes" : "no") +
                   ", locally constant " + (sb.locally_constant ? "yes" : "no");
      return out;
    }
    auto f = integrable(fourier_vf(e, c.vars), out);
    if (!f) return out;
    auto ff = integrable(fourier_vf(*f, c.vars), out);
    if (!ff) return out;
    return exact_check("inversion", *ff, times_L(reflect(e, c.vars), -static_cast<int64_t>(c.vars.size())));
  });
}

CheckResult check_residue_inversion(const CorpusCase& c) {
  return guarded("residue inversion", [&] {
    CExp e = c.expr();
    CExp once = fourier_res(e, c.vars);
    CExp twice = fourier_res(once, c.vars);
    return exact_check("residue inversion", twice, times_L(reflect(e, c.vars), static_cast<int64_t>(c.vars.size())));
  });
}

std::vector<CheckResult> check_convolution(const CorpusCase& c) {
  std::vector<CExp> ops;
  for (const auto& o : c.operands) ops.push_back(parse(o));
  auto conv = [&](const CExp& f, const CExp& g, CheckResult& out) { return integrable(convolve(f, g, c.vars), out); };
  auto four = [&](const CExp& f, CheckResult& out) { return integrable(fourier_vf(f, c.vars), out); };
  std::vector<CheckResult> res;
  res.push_back(guarded("commutative", [&] {
    CheckResult out{"commutative", true, 0, ""};
    auto fg = conv(ops[0], ops[1], out);
    auto gf = fg ? conv(ops[1], ops[0], out) : std::nullopt;
    return gf ? exact_check("commutative", *fg, *gf) : out;
  }));
  res.push_back(guarded("fourier product", [&] {
    CheckResult out{"fourier product", true, 0, ""};
    auto fg = conv(ops[0], ops[1], out);
    auto lhs = fg ? four(*fg, out) : std::nullopt;
    auto ff = lhs ? four(ops[0], out) : std::nullopt;
    auto fgg = ff ? four(ops[1], out) : std::nullopt;
    return fgg ? exact_check("fourier product", *lhs, mul(*ff, *fgg)) : out;
  }));
  if (ops.size() == 3)
    res.push_back(guarded("associative", [&] {
      CheckResult out{"associative", true, 0, ""};
      auto fg = conv(ops[0], ops[1], out);
      auto left = fg ? conv(*fg, ops[2], out) : std::nullopt;
      auto gh = left ? conv(ops[1], ops[2], out) : std::nullopt;
      auto right = gh ? conv(ops[0], *gh, out) : std::nullopt;
      return right ? exact_check("associative", *left, *right) : out;
    }));
  return res;
}

std::vector<CheckResult> run_case(const CorpusCase& c, bool with_transfer) {
  std::vector<CheckResult> out;
  if (c.kind == "integral") {
    out.push_back(check_symbolic(c));
    for (int64_t p : {3, 5, 7, 11}) out.push_back(check_specialization(c, p));
    if (c.bind.size() >= 2) out.push_back(check_fubini(c));
    if (with_transfer) out.push_back(check_transfer(c, {5, 7, 11}, 2));
  } else if (c.kind == "schwartz-bruhat") {
    out.push_back(check_sb_inversion(c));
  } else if (c.kind == "residue") {
    out.push_back(check_residue_inversion(c));
  } else {
    out = check_convolution(c);
  }
  return out;
}

}  // namespace cef
