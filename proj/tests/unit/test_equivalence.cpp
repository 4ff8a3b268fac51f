#include <gtest/gtest.h>

#include "cef/dsl.hpp"
#include "cef/equivalence.hpp"

using namespace cef;

TEST(Equivalence, Verdicts) {
  CExp a = parse("vf x; [ord(x) >= 0] * E(x)");
  EXPECT_EQ(check_equal(a, a).verdict, Verdict::Syntactic);

  EXPECT_EQ(check_equal(parse("vf x; [ord(x) >= 0]"), parse("vf x; [ord(x) == 0] + [ord(x) >= 1]")).verdict,
            Verdict::Syntactic);
  EXPECT_EQ(check_equal(parse("vf x; [ord(x) >= 0, ord(x) <= 3] * L^(ord(x))"),
                        parse("vf x; [ord(x) == 0] + L * [ord(x) == 1] + L^2 * [ord(x) == 2] + L^3 * [ord(x) == 3]"))
                .verdict,
            Verdict::Syntactic);
  auto pw = check_equal(parse("int j, k; [j >= 0, k >= 0, j + k <= 1] * L^(j)"),
                        parse("int j, k; [j == 0, k == 0] + L * [j == 1, k == 0] + [j == 0, k == 1]"));
  EXPECT_EQ(pw.verdict, Verdict::Piecewise) << pw.detail;
  auto geo = check_equal(parse("int j; [j >= 0] * L^(j) - [j >= 1] * L^(j)"), parse("int j; [j == 0]"));
  EXPECT_TRUE(geo.exact()) << geo.detail;

  auto split = check_equal(parse("vf x; [ac(x) == 1] + [ac(x) != 1]"), parse("1"));
  EXPECT_EQ(split.verdict, Verdict::Piecewise) << split.detail;
  auto fixed = check_equal(parse("vf x; [ord(x) == 0, ac(x) == 3, ac(x) != 1]"), parse("vf x; [ord(x) == 0, ac(x) == 3]"));
  EXPECT_TRUE(fixed.exact()) << fixed.detail;

  // Square classes: only sampling sees this one.
  auto squares = check_equal(parse("vf x; [x in P 2]"), parse("vf x; [ord(x) == 0 mod 2, ac(x) in P 2]"));
  EXPECT_EQ(squares.verdict, Verdict::Oracle) << squares.detail;

  auto diff = check_equal(parse("vf x; [ord(x) >= 0]"), parse("vf x; [ord(x) >= 1]"));
  EXPECT_EQ(diff.verdict, Verdict::Different);
  EXPECT_FALSE(diff.detail.empty());
}

TEST(Equivalence, PiecewiseSeesSymbolicExponents) {
  // Same function written with the exponent shifted through an equality.
  auto r = check_equal(parse("vf x; int j; [ord(x) == j + 1] * L^(j)"), parse("vf x; [ord(x) >= -100] * [ord(x) - 1 == j] * L^(ord(x) - 1)"));
  EXPECT_TRUE(r.exact()) << verdict_name(r.verdict) << " " << r.detail;
  EXPECT_FALSE(vanishes_piecewise(parse("int j; [j >= 0] * L^(j)"), {}));
}
