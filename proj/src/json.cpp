#include "cef/json.hpp"

namespace cef {

using nlohmann::json;

namespace {

const char* op_name(PresOp op) {
  switch (op) {
    case PresOp::Le: return "le";
    case PresOp::Lt: return "lt";
    case PresOp::Eq: return "eq";
    case PresOp::Ne: return "ne";
    case PresOp::Cong: return "cong";
  }
  return "?";
}

json ratom(const RAtom& a) {
  switch (a.kind) {
    case RAtom::Kind::Var: return {{"var", a.name}};
    case RAtom::Kind::AcVar: return {{"ac", a.name}};
    case RAtom::Kind::AcOpaque: return {{"ac_of", to_json(a.arg)}};
  }
  return nullptr;
}

}  // namespace

json to_json(const Rational& r) {
  if (r.is_integer()) return r.num();
  return json::array({r.num(), r.den()});
}

json to_json(const LRat& x) {
  json num = json::array(), den = json::array();
  for (auto& [k, c] : x.num()) num.push_back({c, k});
  for (auto& [i, m] : x.den()) den.push_back({i, m});
  return {{"num", num}, {"den", den}, {"const_den", x.const_den()}};
}

json to_json(const LinForm& f) {
  json c = json::object();
  for (auto& [n, k] : f.coef) c[n] = to_json(k);
  return {{"coef", c}, {"constant", to_json(f.constant)}};
}

json to_json(const PresAtom& a) {
  json j = {{"kind", "pres"}, {"f", to_json(a.f)}, {"op", op_name(a.op)}};
  if (a.op == PresOp::Cong) {
    j["modulus"] = a.modulus;
    j["residue"] = a.residue;
  }
  return j;
}

json to_json(const VTerm& v) {
  json out = json::array();
  for (auto& [m, c] : v.terms()) {
    json vars = json::object();
    for (auto& [n, e] : m.vars) vars[n] = e;
    out.push_back({{"coeff", to_json(c)}, {"w", m.w}, {"vars", vars}});
  }
  return out;
}

json to_json(const RTerm& r) {
  json out = json::array();
  for (auto& [m, c] : r.terms()) {
    json atoms = json::array();
    for (auto& [a, e] : m) atoms.push_back({{"atom", ratom(a)}, {"exp", e}});
    out.push_back({{"coeff", to_json(c)}, {"atoms", atoms}});
  }
  return out;
}

json to_json(const CondAtom& c) {
  return std::visit(
      [](const auto& a) -> json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, OrdCmp>) {
          return {{"kind", "ord"}, {"v", to_json(a.v)}, {"atom", to_json(a.atom)}};
        } else if constexpr (std::is_same_v<T, ResCmp>) {
          return {{"kind", "res"}, {"r", to_json(a.r)}, {"neq", a.neq}};
        } else if constexpr (std::is_same_v<T, PresAtom>) {
          return to_json(a);
        } else if constexpr (std::is_same_v<T, CosetIn>) {
          return {{"kind", "coset"}, {"v", to_json(a.v)}, {"lambda", to_json(a.lambda)}, {"m", a.m}};
        } else {
          return {{"kind", "pow"}, {"r", to_json(a.r)}, {"m", a.m}};
        }
      },
      c);
}

json to_json(const CExpTerm& t) {
  json conds = json::array();
  for (const auto& c : t.conds) conds.push_back(to_json(c));
  return {{"coeff", to_json(t.coeff)},   {"lexp", to_json(t.lexp)},         {"conds", conds},
          {"sums", t.sums},              {"expArg", to_json(t.expArg)},      {"resExpArg", to_json(t.resExpArg)}};
}

json to_json(const CExp& e) {
  json ctx = json::object();
  for (auto& [n, s] : e.ctx) ctx[n] = sort_name(s);
  json terms = json::array();
  for (const auto& t : e.terms) terms.push_back(to_json(t));
  return {{"ctx", ctx}, {"terms", terms}};
}

}  // namespace cef
