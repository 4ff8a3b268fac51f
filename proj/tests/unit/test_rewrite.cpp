#include <gtest/gtest.h>

#include <random>

#include "cef/dsl.hpp"
#include "cef/rewrite.hpp"
#include "random_cexp.hpp"

using namespace cef;

namespace {

std::string canon(const CExp& e) { return print_expr(canonical_form(e)); }

}  // namespace

TEST(Rewrite, ShiftUnitConstant) {
  CExp r = rewrite(parse("E(x + 1)"));
  EXPECT_EQ(canon(r), canon(parse("E(x) * e(1)")));
}

TEST(Rewrite, ShiftUsesOrderConditions) {
  // ord(x*y) = 0 and ord(w*x) >= 1 are forced by the conditions.
  CExp r = rewrite(parse("[ord(x) == 0, ord(y) == 0] * E(x*y + w*x + z)"));
  ASSERT_EQ(r.terms.size(), 1u);
  EXPECT_EQ(r.terms[0].expArg, VTerm::var("z"));
  EXPECT_EQ(r.terms[0].resExpArg, RTerm::ac(VTerm::var("x")) * RTerm::ac(VTerm::var("y")));
  // Nothing is known about ord(x) here.
  CExp keep = rewrite(parse("E(x + w^(-1))"));
  EXPECT_EQ(keep.terms[0].expArg, VTerm::var("x") + VTerm::uniformizer(-1));
}

TEST(Rewrite, KillFreeCharacterSum) {
  EXPECT_TRUE(rewrite(parse("sum eta : e(eta)")).is_zero());
  EXPECT_TRUE(rewrite(parse("sum eta : e(eta * ac(x)) * [ord(x) == 0]")).is_zero());
  // ac(x) may vanish, so the sum is not killed.
  EXPECT_FALSE(rewrite(parse("sum eta : e(eta * ac(x))")).is_zero());
}

TEST(Rewrite, FreeLineGivesL) {
  CExp r = rewrite(parse("sum eta : 1"));
  ASSERT_EQ(r.terms.size(), 1u);
  EXPECT_EQ(r.terms[0].coeff, LRat::L());
  EXPECT_TRUE(r.terms[0].sums.empty());
}

TEST(Rewrite, PuncturedSums) {
  // Sum over nonzero residues of a nontrivial character is -1.
  EXPECT_EQ(canon(rewrite(parse("sum eta : e(eta) * [eta != 0]"))), "-1");
  // Count of nonzero residues.
  EXPECT_EQ(canon(rewrite(parse("sum eta : [eta != 0]"))), canon(parse("L - 1")));
  // A linear equation fixes the variable.
  EXPECT_EQ(canon(rewrite(parse("sum eta : [eta - ac(x) == 0] * e(eta)"))), canon(parse("e(ac(x))")));
}

TEST(Rewrite, DropsUnsatisfiable) {
  EXPECT_TRUE(rewrite(parse("[ord(x) >= 2, ord(x) <= 1] * E(x)")).is_zero());
}

TEST(Rewrite, ConfluentUnderRuleOrders) {
  std::vector<std::vector<Rule>> orders = {
      kDefaultRuleOrder,
      {Rule::Line, Rule::Kill, Rule::ResNeq, Rule::ResEq, Rule::Shift},
      {Rule::Kill, Rule::Shift, Rule::Line, Rule::ResNeq, Rule::ResEq},
      {Rule::ResNeq, Rule::Line, Rule::ResEq, Rule::Shift, Rule::Kill},
  };
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int i = 0; i < 250; ++i) {
    CExp e = gen::random_cexp(rng);
    std::string ref = canon(rewrite(e, {orders[0]}));
    for (size_t k = 1; k < orders.size(); ++k) EXPECT_EQ(canon(rewrite(e, {orders[k]})), ref) << print(e);
    ++checked;
  }
  EXPECT_GE(checked, 200);
}

TEST(Rewrite, Idempotent) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    CExp r = rewrite(gen::random_cexp(rng));
    EXPECT_EQ(canon(rewrite(r)), canon(r));
  }
}

TEST(Consolidate, PinOrders) {
  CExp e = parse("vf x; [ord(x) >= -1, ord(x) <= 1] * L^(-ord(x)) + [ord(x) >= 0] * L^(ord(x))");
  EXPECT_EQ(print_expr(pin_orders(e, "x")),
            print_expr(parse("vf x; L * [ord(x) == -1] + [ord(x) == 0] + L^(-1) * [ord(x) == 1] + "
                             "[ord(x) >= 0] * L^(ord(x))")));
}

TEST(Consolidate, SplitCharacters) {
  EXPECT_EQ(canon(split_characters(parse("vf x; [ord(x) >= 1] * E(x)"))), canon(parse("vf x; [ord(x) >= 1]")));
  EXPECT_EQ(canon(split_characters(parse("vf x; [ord(x) >= 0] * E(x)"))),
            canon(parse("vf x; [ord(x) >= 0, ord(x) == 0] * e(ac(x)) + [ord(x) >= 0, ord(x) >= 1]")));
  CExp free = parse("vf x; [ord(x) >= -1] * E(x)");
  EXPECT_EQ(canon(split_characters(free)), canon(free));
}

TEST(Consolidate, MergesPointIntoRay) {
  CExp e = parse("vf x; L^(-1) * L^(ord(x)) * [ord(x) <= 1] + [ord(x) >= 2] - L^(-1) * L^(ord(x)) * [ord(x) <= 0]");
  EXPECT_EQ(canon(consolidate(e)), canon(parse("vf x; [ord(x) >= 1]")));
}
