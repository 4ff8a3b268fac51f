#include <gtest/gtest.h>

#include <random>

#include "cef/dsl.hpp"
#include "random_cexp.hpp"

using namespace cef;

namespace {

bool same(const CExp& a, const CExp& b) { return print(canonical_form(a)) == print(canonical_form(b)); }

}  // namespace

TEST(Parse, OrdConditionAndExponential) {
  CExp e = parse("[ord(x) == 0] * E(x)");
  ASSERT_EQ(e.terms.size(), 1u);
  const CExpTerm& t = e.terms[0];
  ASSERT_EQ(t.conds.size(), 1u);
  auto* p = std::get_if<PresAtom>(&t.conds[0]);
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->op, PresOp::Eq);
  EXPECT_EQ(p->f, LinForm::var(ord_symbol("x")));
  EXPECT_EQ(t.expArg, VTerm::var("x"));
  EXPECT_EQ(e.ctx.at("x"), Sort::VF);
}

TEST(Parse, LExponentAndPresburger) {
  CExp e = parse("L^(-j) * [j >= 1]");
  ASSERT_EQ(e.terms.size(), 1u);
  EXPECT_EQ(e.terms[0].lexp, -LinForm::var("j"));
  ASSERT_EQ(e.terms[0].conds.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<PresAtom>(e.terms[0].conds[0]));
  EXPECT_EQ(e.ctx.at("j"), Sort::Int);
}

TEST(Parse, ResidueSum) {
  CExp e = parse("sum eta : e(eta * ac(x)) * [eta != 0]");
  ASSERT_EQ(e.terms.size(), 1u);
  EXPECT_EQ(e.terms[0].sums, std::vector<std::string>{"eta"});
  EXPECT_EQ(e.terms[0].resExpArg, RTerm::var("eta") * RTerm::ac(VTerm::var("x")));
  EXPECT_EQ(e.ctx.count("eta"), 0u);
  EXPECT_EQ(print(parse(print(e))), print(e));
}

TEST(Parse, Declarations) {
  CExp e = parse("vf x; res xi; int j; [xi == 1] * L^(j) * E(x)");
  EXPECT_EQ(e.ctx.at("xi"), Sort::Res);
  auto* r = std::get_if<ResCmp>(&e.terms[0].conds[0]);
  ASSERT_NE(r, nullptr);
  EXPECT_FALSE(r->neq);
  // An undeclared name compared with ac() becomes a residue variable.
  CExp f = parse("[ac(x) == eta]");
  EXPECT_EQ(f.ctx.at("eta"), Sort::Res);
}

TEST(Parse, CongruenceCosetsAndPowers) {
  CExp e = parse("[ord(x) == 1 mod 2, x in w P 2, ac(y) in P 3]");
  ASSERT_EQ(e.terms[0].conds.size(), 3u);
  int pres = 0, coset = 0, powres = 0;
  for (auto& c : e.terms[0].conds) {
    pres += std::holds_alternative<PresAtom>(c);
    coset += std::holds_alternative<CosetIn>(c);
    powres += std::holds_alternative<PowRes>(c);
  }
  EXPECT_EQ(pres, 1);
  EXPECT_EQ(coset, 1);
  EXPECT_EQ(powres, 1);
}

TEST(Parse, NonMonomialOrd) {
  CExp e = parse("[ord(x - 1) >= 1]");
  auto* o = std::get_if<OrdCmp>(&e.terms[0].conds[0]);
  ASSERT_NE(o, nullptr);
  EXPECT_EQ(o->v, VTerm::var("x") - VTerm(Rational(1)));
}

TEST(Parse, CoefficientForms) {
  CExp e = parse("L^(-1)/((1 - L^(-1))) * E(x)");
  EXPECT_EQ(e.terms[0].coeff, LRat::L(-1) * LRat::geometric(1));
  EXPECT_EQ(print(parse(print(e))), print(e));
  CExp h = parse("1/2 * [ord(x) >= 0]");
  EXPECT_EQ(h.terms[0].coeff, LRat(Rational(1, 2)));
}

TEST(Parse, Errors) {
  try {
    parse("[ord(x) == 0] *\n  E(x");
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GE(e.col(), 6);
  }
  EXPECT_THROW(parse("res xi; E(xi)"), SortError);
  EXPECT_THROW(parse("vf x; e(x)"), SortError);
  EXPECT_THROW(parse("E(x) * e(ac(x) + x)"), SortError);
  EXPECT_THROW(parse("[ord(x) == 1] 3"), SyntaxError);
  EXPECT_THROW(parse("L^(j*j)"), SyntaxError);
  EXPECT_THROW(parse("1/(2 - L)"), SyntaxError);
  EXPECT_THROW(parse("1/E(x)"), SyntaxError);
  EXPECT_NO_THROW(parse("1/(1 + L^(-1))"));
}

TEST(Mul, ExponentialsAdd) {
  CExp a = parse("E(x)"), b = parse("E(y)");
  CExp p = mul(a, b);
  ASSERT_EQ(p.terms.size(), 1u);
  EXPECT_EQ(p.terms[0].expArg, VTerm::var("x") + VTerm::var("y"));
}

TEST(Mul, Unit) {
  CExp a = parse("L^(-j) * [j >= 1] * E(x) + sum eta : e(eta) * [eta != 0]");
  EXPECT_TRUE(same(mul(CExp::constant(LRat(1)), a), a));
  EXPECT_TRUE(same(mul(a, CExp::constant(LRat(1))), a));
}

TEST(Normalize, AlphaEquivalentTermsMerge) {
  CExp e = add(parse("sum eta : e(eta * ac(x))"), parse("sum zeta : e(zeta * ac(x))"));
  ASSERT_EQ(normalize(e).terms.size(), 1u);
  EXPECT_EQ(normalize(e).terms[0].coeff, LRat(2));
  EXPECT_EQ(print_expr(canonical_form(e)), "sum _b1 : 2 * e(_b1*ac(x))");
}

TEST(Mul, ContradictoryOrdersVanish) {
  CExp p = mul(parse("[ord(x) == 0]"), parse("[ord(x) == 1]"));
  EXPECT_TRUE(p.is_zero());
}

TEST(Mul, BoundVariablesRenamed) {
  CExp a = parse("sum eta : e(eta)"), b = parse("sum eta : e(eta * ac(x))");
  CExp p = mul(a, b);
  ASSERT_EQ(p.terms.size(), 1u);
  EXPECT_EQ(p.terms[0].sums.size(), 2u);
  EXPECT_THROW(mul(a, b, false), VariableCapture);
  CExp free_eta = parse("res eta; e(eta)");
  EXPECT_THROW(mul(free_eta, a, false), VariableCapture);
  CExp q = mul(free_eta, a);
  EXPECT_EQ(q.terms[0].sums.size(), 1u);
  EXPECT_NE(q.terms[0].sums[0], "eta");
}

TEST(Mul, AssociativeAndCommutative) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 60; ++i) {
    CExp a = gen::random_cexp(rng, 2), b = gen::random_cexp(rng, 2), c = gen::random_cexp(rng, 2);
    EXPECT_TRUE(same(mul(mul(a, b), c), mul(a, mul(b, c)))) << print(a) << " | " << print(b) << " | " << print(c);
    EXPECT_TRUE(same(mul(a, b), mul(b, a)));
  }
}

TEST(Substitute, OrdShifts) {
  VTerm wy = VTerm::uniformizer() * VTerm::var("y");
  CExp s = substitute(parse("[ord(x) == 0]"), "x", wy);
  EXPECT_EQ(print_expr(s), "[ord(y) == -1]");
  CExp t = substitute(parse("E(x)"), "x", wy);
  EXPECT_EQ(t.terms[0].expArg, wy);
}

TEST(Substitute, AngularComponentOfScaledVariable) {
  CExp s = substitute(parse("[ac(x) == 1]"), "x", VTerm(Rational(3)) * VTerm::var("y"));
  auto* r = std::get_if<ResCmp>(&s.terms[0].conds[0]);
  ASSERT_NE(r, nullptr);
  EXPECT_TRUE(r->r.mentions_vf("y"));
}

TEST(Substitute, NonMonomialReplacement) {
  VTerm shifted = VTerm::var("y") + VTerm(Rational(1));
  CExp s = substitute(parse("[ord(x) >= 1] * E(x)"), "x", shifted);
  EXPECT_TRUE(std::holds_alternative<OrdCmp>(s.terms[0].conds[0]));
  EXPECT_THROW(substitute(parse("L^(ord(x))"), "x", shifted), NonAffineSubstitution);
}

TEST(RoundTrip, RandomExpressions) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    CExp e = normalize(gen::random_cexp(rng));
    std::string p1 = print(e);
    CExp back = parse(p1);
    EXPECT_EQ(print(back), p1);
    EXPECT_EQ(print(parse(print(back))), print(back));
  }
}
