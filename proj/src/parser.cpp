#include <algorithm>
#include <cctype>
#include <memory>
#include <set>

#include "cef/dsl.hpp"

namespace cef {

namespace {

const std::set<std::string> kReserved = {"vf", "res", "int", "sum", "ord", "ac", "E",
                                         "e",  "L",   "w",   "mod", "in",  "P"};

// ---------------------------------------------------------------- lexer

enum class Tok { Ident, Num, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int64_t num = 0;
  int line = 1;
  int col = 1;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t{Tok::Punct, "", 0, line, col};
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Num;
      t.text = src.substr(i, j - i);
      try {
        t.num = std::stoll(t.text);
      } catch (const std::out_of_range&) {
        throw SyntaxError(line, col, "integer literal out of range");
      }
      advance(j - i);
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
    } else {
      std::string two = src.substr(i, 2);
      if (two == "==" || two == "!=" || two == "<=" || two == ">=") {
        t.text = two;
        advance(2);
      } else if (std::string("+-*/^(),;:[]<>").find(c) != std::string::npos) {
        t.text = std::string(1, c);
        advance(1);
      } else {
        throw SyntaxError(line, col, std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back(t);
  }
  out.push_back(Token{Tok::End, "", 0, line, col});
  return out;
}

// ---------------------------------------------------------------- syntax tree

struct Node;
using NodeP = std::shared_ptr<Node>;

struct Cond {
  NodeP lhs, rhs, lambda;
  std::string op;  // relation, or "in"
  int64_t mod = 0;
  int64_t m = 0;
  int line = 0, col = 0;
};

struct Node {
  enum Kind { Num, Id, Call, Neg, Add, Sub, Mul, Div, Pow, Sum, Br } kind;
  int64_t num = 0;
  std::string name;
  std::vector<NodeP> kids;
  std::vector<std::string> binders;
  std::vector<Cond> conds;
  int line = 0, col = 0;
};

NodeP make(Node::Kind k, const Token& at, std::vector<NodeP> kids = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->kids = std::move(kids);
  n->line = at.line;
  n->col = at.col;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {}

  std::map<std::string, Sort> decls() {
    std::map<std::string, Sort> out;
    while (peek().kind == Tok::Ident && (is("vf") || is("res") || is("int"))) {
      Sort s = is("vf") ? Sort::VF : is("res") ? Sort::Res : Sort::Int;
      next();
      do {
        Token id = ident();
        if (out.count(id.text)) throw SyntaxError(id.line, id.col, "duplicate declaration of '" + id.text + "'");
        out[id.text] = s;
      } while (accept(","));
      expect(";");
    }
    return out;
  }

  NodeP expr() {
    NodeP a = product();
    while (is("+") || is("-")) {
      Token op = next();
      NodeP b = product();
      a = make(op.text == "+" ? Node::Add : Node::Sub, op, {a, b});
    }
    return a;
  }

  void finish() {
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool is(const std::string& s) const { return peek().kind != Tok::End && peek().text == s && peek().kind != Tok::Num; }
  bool accept(const std::string& s) {
    if (!is(s)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(peek().line, peek().col, msg); }
  void expect(const std::string& s) {
    if (!accept(s)) fail("expected '" + s + "'" + (peek().kind == Tok::End ? " at end of input" : " before '" + peek().text + "'"));
  }
  Token ident() {
    if (peek().kind != Tok::Ident || kReserved.count(peek().text)) fail("expected identifier");
    return next();
  }
  int64_t integer() {
    if (peek().kind != Tok::Num) fail("expected integer literal");
    return next().num;
  }

  NodeP product() {
    if (is("sum")) return sum();
    NodeP a = unary();
    while (is("*") || is("/")) {
      Token op = next();
      if (op.text == "*" && is("sum")) return make(Node::Mul, op, {a, sum()});
      NodeP b = unary();
      a = make(op.text == "*" ? Node::Mul : Node::Div, op, {a, b});
    }
    return a;
  }

  NodeP sum() {
    Token at = next();
    auto n = make(Node::Sum, at);
    do n->binders.push_back(ident().text);
    while (accept(","));
    expect(":");
    n->kids.push_back(product());
    return n;
  }

  NodeP unary() {
    if (is("-")) {
      Token at = next();
      return make(Node::Neg, at, {unary()});
    }
    NodeP base = primary();
    if (is("^")) {
      Token at = next();
      NodeP ex;
      if (is("-")) {
        Token m = next();
        ex = make(Node::Neg, m, {primary()});
      } else {
        ex = primary();
      }
      return make(Node::Pow, at, {base, ex});
    }
    return base;
  }

  NodeP primary() {
    Token t = peek();
    if (t.kind == Tok::Num) {
      next();
      auto n = make(Node::Num, t);
      n->num = t.num;
      return n;
    }
    if (accept("(")) {
      NodeP e = expr();
      expect(")");
      return e;
    }
    if (accept("[")) {
      auto n = make(Node::Br, t);
      if (!is("]")) {
        do n->conds.push_back(cond());
        while (accept(","));
      }
      expect("]");
      return n;
    }
    if (t.kind == Tok::Ident) {
      bool callable = t.text == "E" || t.text == "e" || t.text == "ac" || t.text == "ord";
      if (callable) {
        next();
        expect("(");
        auto n = make(Node::Call, t, {expr()});
        n->name = t.text;
        expect(")");
        return n;
      }
      if (t.text == "L" || t.text == "w" || !kReserved.count(t.text)) {
        next();
        auto n = make(Node::Id, t);
        n->name = t.text;
        return n;
      }
      fail("unexpected keyword '" + t.text + "'");
    }
    fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
  }

  Cond cond() {
    Cond c;
    c.line = peek().line;
    c.col = peek().col;
    c.lhs = expr();
    if (accept("in")) {
      c.op = "in";
      if (!is("P")) c.lambda = expr();
      expect("P");
      c.m = integer();
      if (c.m < 1) fail("power index must be positive");
      return c;
    }
    for (const char* op : {"==", "!=", "<=", ">=", "<", ">"}) {
      if (accept(op)) {
        c.op = op;
        c.rhs = expr();
        if (accept("mod")) {
          if (c.op != "==") fail("congruence needs '=='");
          c.mod = integer();
          if (c.mod < 1) fail("modulus must be positive");
        }
        return c;
      }
    }
    fail("expected a relation");
  }
};

// ---------------------------------------------------------------- sorts

enum class Mode { Cexp, VF, Res, Lin, Cond };

struct Group {
  std::set<std::string> members;
  std::optional<Sort> hint;
  Sort fallback = Sort::Int;
};

class SortInference {
 public:
  explicit SortInference(std::map<std::string, Sort> declared) : sorts_(std::move(declared)), declared_(sorts_) {}

  void walk(const NodeP& n, Mode mode, Group* g = nullptr) {
    switch (n->kind) {
      case Node::Num: return;
      case Node::Id:
        if (n->name == "L" || n->name == "w") return;
        if (mode == Mode::VF) assign(n, Sort::VF);
        else if (mode == Mode::Res) assign(n, Sort::Res);
        else if (mode == Mode::Lin) assign(n, Sort::Int);
        else if (mode == Mode::Cond) g->members.insert(n->name);
        return;
      case Node::Call:
        if (n->name == "e") {
          walk(n->kids[0], Mode::Res);
        } else {
          if (g && n->name == "ord" && !g->hint) g->hint = Sort::Int;
          if (g && n->name == "ac") g->hint = Sort::Res;
          walk(n->kids[0], Mode::VF);
        }
        return;
      case Node::Pow:
        walk(n->kids[0], mode, g);
        if (n->kids[0]->kind == Node::Id && n->kids[0]->name == "L") walk(n->kids[1], Mode::Lin);
        return;
      case Node::Sum:
        for (auto& b : n->binders) {
          if (auto it = declared_.find(b); it != declared_.end() && it->second != Sort::Res)
            throw SortError("summation variable '" + b + "' is declared " + sort_name(it->second));
          sorts_[b] = Sort::Res;
        }
        walk(n->kids[0], mode, g);
        return;
      case Node::Br:
        for (auto& c : n->conds) {
          groups_.emplace_back();
          Group& cg = groups_.back();
          if (c.op == "in" && c.lambda) {
            walk(c.lhs, Mode::VF);
            walk(c.lambda, Mode::VF);
            continue;
          }
          if (c.op == "in") cg.fallback = Sort::VF;
          if (c.mod) cg.hint = Sort::Int;
          walk(c.lhs, Mode::Cond, &cg);
          if (c.rhs) walk(c.rhs, Mode::Cond, &cg);
        }
        return;
      default:
        for (auto& k : n->kids) walk(k, mode, g);
    }
  }

  std::map<std::string, Sort> resolve() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& g : groups_) {
        std::optional<Sort> s = g.hint;
        if (!s) {
          for (auto& m : g.members) {
            auto it = sorts_.find(m);
            if (it != sorts_.end() && it->second != Sort::VF) {
              s = it->second;
              break;
            }
          }
        }
        if (!s) continue;
        for (auto& m : g.members) {
          if (!sorts_.count(m)) {
            sorts_[m] = *s;
            changed = true;
          }
        }
      }
    }
    for (auto& g : groups_)
      for (auto& m : g.members)
        if (!sorts_.count(m)) sorts_[m] = g.fallback;
    return sorts_;
  }

 private:
  std::map<std::string, Sort> sorts_;
  std::map<std::string, Sort> declared_;
  std::vector<Group> groups_;

  void assign(const NodeP& n, Sort s) {
    auto [it, fresh] = sorts_.emplace(n->name, s);
    if (!fresh && it->second != s)
      throw SortError("line " + std::to_string(n->line) + ", column " + std::to_string(n->col) + ": '" + n->name +
                      "' is " + sort_name(it->second) + " but used as " + sort_name(s));
  }
};

// ---------------------------------------------------------------- conversion

// Internal failure of one interpretation; surfaces as SyntaxError if no
// alternative applies.
struct NotThisSort {
  int line, col;
  std::string msg;
};

[[noreturn]] void reject(const NodeP& n, const std::string& msg) { throw NotThisSort{n->line, n->col, msg}; }

class Converter {
 public:
  explicit Converter(std::map<std::string, Sort> sorts) : sorts_(std::move(sorts)) {}

  int64_t const_int(const NodeP& n) {
    switch (n->kind) {
      case Node::Num: return n->num;
      case Node::Neg: return -const_int(n->kids[0]);
      case Node::Add: return const_int(n->kids[0]) + const_int(n->kids[1]);
      case Node::Sub: return const_int(n->kids[0]) - const_int(n->kids[1]);
      case Node::Mul: return const_int(n->kids[0]) * const_int(n->kids[1]);
      default: reject(n, "expected an integer constant");
    }
  }

  VTerm vterm(const NodeP& n) {
    switch (n->kind) {
      case Node::Num: return VTerm(Rational(n->num));
      case Node::Id:
        if (n->name == "w") return VTerm::uniformizer();
        if (sort_of(n->name) != Sort::VF) reject(n, "'" + n->name + "' is not a valued-field variable");
        return VTerm::var(n->name);
      case Node::Neg: return -vterm(n->kids[0]);
      case Node::Add: return vterm(n->kids[0]) + vterm(n->kids[1]);
      case Node::Sub: return vterm(n->kids[0]) - vterm(n->kids[1]);
      case Node::Mul: return vterm(n->kids[0]) * vterm(n->kids[1]);
      case Node::Div: {
        auto d = vterm(n->kids[1]).as_constant();
        if (!d || d->is_zero()) reject(n, "division by a non-constant valued term");
        return vterm(n->kids[0]) * VTerm(Rational(1) / *d);
      }
      case Node::Pow: return vterm(n->kids[0]).pow(static_cast<int>(const_int(n->kids[1])));
      default: reject(n, "expected a valued-field term");
    }
  }

  RTerm rterm(const NodeP& n) {
    switch (n->kind) {
      case Node::Num: return RTerm(Rational(n->num));
      case Node::Id:
        if (sort_of(n->name) != Sort::Res) reject(n, "'" + n->name + "' is not a residue variable");
        return RTerm::var(n->name);
      case Node::Call:
        if (n->name != "ac") reject(n, "expected a residue term");
        return RTerm::ac(vterm(n->kids[0]));
      case Node::Neg: return -rterm(n->kids[0]);
      case Node::Add: return rterm(n->kids[0]) + rterm(n->kids[1]);
      case Node::Sub: return rterm(n->kids[0]) - rterm(n->kids[1]);
      case Node::Mul: return rterm(n->kids[0]) * rterm(n->kids[1]);
      case Node::Div: {
        auto d = rterm(n->kids[1]).as_constant();
        if (!d || d->is_zero()) reject(n, "division by a non-constant residue term");
        return rterm(n->kids[0]) * RTerm(Rational(1) / *d);
      }
      case Node::Pow: return rterm(n->kids[0]).pow(static_cast<int>(const_int(n->kids[1])));
      default: reject(n, "expected a residue term");
    }
  }

  // Linear form over integer variables and ord symbols. A single
  // non-monomial ord(v) is captured into *slot.
  LinForm lin(const NodeP& n, std::optional<VTerm>* slot) {
    switch (n->kind) {
      case Node::Num: return LinForm(Rational(n->num));
      case Node::Id:
        if (n->name == "L" || n->name == "w" || sort_of(n->name) != Sort::Int)
          reject(n, "'" + n->name + "' is not an integer variable");
        return LinForm::var(n->name);
      case Node::Call: {
        if (n->name != "ord") reject(n, "expected an integer expression");
        VTerm v = vterm(n->kids[0]);
        if (v.is_zero()) reject(n, "ord(0) is not an integer");
        if (auto m = v.as_monomial()) return m->second.ord();
        if (!slot) reject(n, "ord of a non-monomial term is not allowed here");
        // Scaling by a constant does not change the order.
        Rational lc = v.terms().rbegin()->second;
        v = v * VTerm(Rational(1) / lc);
        if (slot->has_value() && !(**slot == v)) reject(n, "two different non-monomial ord terms in one condition");
        *slot = v;
        return LinForm::var(kOrdSlot);
      }
      case Node::Neg: return -lin(n->kids[0], slot);
      case Node::Add: return lin(n->kids[0], slot) + lin(n->kids[1], slot);
      case Node::Sub: return lin(n->kids[0], slot) - lin(n->kids[1], slot);
      case Node::Mul: {
        LinForm a = lin(n->kids[0], slot), b = lin(n->kids[1], slot);
        if (a.is_constant()) return a.constant * b;
        if (b.is_constant()) return b.constant * a;
        reject(n, "product of two non-constant integer expressions");
      }
      case Node::Div: {
        LinForm d = lin(n->kids[1], slot);
        if (!d.is_constant() || d.constant.is_zero()) reject(n, "division by a non-constant integer expression");
        return (Rational(1) / d.constant) * lin(n->kids[0], slot);
      }
      default: reject(n, "expected an integer expression");
    }
  }

  CondAtom cond(const Cond& c) {
    if (c.op == "in") {
      if (c.lambda) return CosetIn{vterm(c.lhs), vterm(c.lambda), c.m};
      try {
        return CosetIn{vterm(c.lhs), VTerm(Rational(1)), c.m};
      } catch (const NotThisSort&) {
        return PowRes{rterm(c.lhs), c.m};
      }
    }
    CmpOp op = c.op == "==" ? CmpOp::Eq
               : c.op == "!=" ? CmpOp::Ne
               : c.op == "<=" ? CmpOp::Le
               : c.op == ">=" ? CmpOp::Ge
               : c.op == "<"  ? CmpOp::Lt
                              : CmpOp::Gt;
    try {
      std::optional<VTerm> slot;
      LinForm l = lin(c.lhs, &slot), r = lin(c.rhs, &slot);
      PresAtom a = c.mod ? PresAtom::cong(l - r, 0, c.mod) : pres_cmp(l, op, r);
      if (slot) return OrdCmp{*slot, a};
      return a;
    } catch (const NotThisSort&) {
      if (c.mod || (op != CmpOp::Eq && op != CmpOp::Ne)) throw;
    }
    return ResCmp{rterm(c.lhs) - rterm(c.rhs), op == CmpOp::Ne};
  }

  CExp cexp(const NodeP& n) {
    switch (n->kind) {
      case Node::Num: return CExp::constant(LRat(n->num));
      case Node::Id:
        if (n->name == "L") return CExp::constant(LRat::L());
        reject(n, "'" + n->name + "' cannot stand as a factor");
      case Node::Call: {
        CExpTerm t;
        if (n->name == "E") t.expArg = vterm(n->kids[0]);
        else if (n->name == "e") t.resExpArg = rterm(n->kids[0]);
        else reject(n, n->name + "(...) cannot stand as a factor");
        return CExp::from_term(t);
      }
      case Node::Neg: return negate(cexp(n->kids[0]));
      case Node::Add: return add(cexp(n->kids[0]), cexp(n->kids[1]));
      case Node::Sub: return add(cexp(n->kids[0]), negate(cexp(n->kids[1])));
      case Node::Mul: return mul(cexp(n->kids[0]), cexp(n->kids[1]));
      case Node::Div: {
        auto inv = as_coeff(cexp(n->kids[1]));
        if (inv) inv = inv->try_inverse();
        if (!inv) reject(n->kids[1], "divisor is not an invertible constant");
        return scale(cexp(n->kids[0]), *inv);
      }
      case Node::Pow: {
        const NodeP& base = n->kids[0];
        if (base->kind == Node::Id && base->name == "L") {
          try {
            return CExp::constant(LRat::L(static_cast<int>(const_int(n->kids[1]))));
          } catch (const NotThisSort&) {
          }
          CExpTerm t;
          t.lexp = lin(n->kids[1], nullptr);
          return CExp::from_term(t);
        }
        int64_t k = const_int(n->kids[1]);
        CExp b = cexp(base);
        if (k < 0) {
          auto c = as_coeff(b);
          if (c) c = c->try_inverse();
          if (!c) reject(base, "negative power of a non-invertible factor");
          b = CExp::constant(*c);
          k = -k;
        }
        CExp r = CExp::constant(LRat(1));
        for (int64_t i = 0; i < k; ++i) r = mul(r, b);
        return r;
      }
      case Node::Sum: {
        CExp body = cexp(n->kids[0]);
        for (auto& t : body.terms) {
          for (auto& b : n->binders)
            if (std::find(t.sums.begin(), t.sums.end(), b) != t.sums.end())
              reject(n, "'" + b + "' is bound twice");
          t.sums.insert(t.sums.begin(), n->binders.begin(), n->binders.end());
        }
        return body;
      }
      case Node::Br: {
        CExpTerm t;
        for (auto& c : n->conds) t.conds.push_back(cond(c));
        return CExp::from_term(t);
      }
    }
    reject(n, "unexpected expression");
  }

 private:
  std::map<std::string, Sort> sorts_;

  Sort sort_of(const std::string& name) const {
    auto it = sorts_.find(name);
    return it == sorts_.end() ? Sort::Int : it->second;
  }

  static std::optional<LRat> as_coeff(const CExp& e) {
    CExp n = normalize(e);
    if (n.terms.empty()) return LRat(0);
    if (n.terms.size() != 1) return std::nullopt;
    const CExpTerm& t = n.terms[0];
    if (!t.conds.empty() || !t.sums.empty() || !t.lexp.coef.empty() || !t.lexp.constant.is_zero() ||
        !t.expArg.is_zero() || !t.resExpArg.is_zero())
      return std::nullopt;
    return t.coeff;
  }
};

template <class F>
auto converting(F f) {
  try {
    return f();
  } catch (const NotThisSort& e) {
    throw SyntaxError(e.line, e.col, e.msg);
  }
}

}  // namespace

CExp parse(const std::string& text) {
  Parser p(text);
  auto declared = p.decls();
  NodeP root = p.expr();
  p.finish();
  SortInference inf(declared);
  inf.walk(root, Mode::Cexp);
  Converter conv(inf.resolve());
  CExp e = converting([&] { return conv.cexp(root); });
  e = normalize(e);
  std::map<std::string, Sort> ctx = declared;
  for (auto& t : e.terms) {
    for (auto& n : free_vf(t)) ctx.emplace(n, Sort::VF);
    for (auto& n : free_res(t)) ctx.emplace(n, Sort::Res);
    for (auto& n : free_int(t)) ctx.emplace(n, Sort::Int);
  }
  e.ctx = ctx;
  return e;
}

VTerm parse_vterm(const std::string& text) {
  Parser p(text);
  NodeP root = p.expr();
  p.finish();
  SortInference inf({});
  inf.walk(root, Mode::VF);
  Converter conv(inf.resolve());
  return converting([&] { return conv.vterm(root); });
}

RTerm parse_rterm(const std::string& text, const std::map<std::string, Sort>& ctx) {
  Parser p(text);
  NodeP root = p.expr();
  p.finish();
  SortInference inf(ctx);
  inf.walk(root, Mode::Res);
  Converter conv(inf.resolve());
  return converting([&] { return conv.rterm(root); });
}

}  // namespace cef
