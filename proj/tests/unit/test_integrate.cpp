#include <gtest/gtest.h>

#include "cef/dsl.hpp"
#include "cef/integrate.hpp"
#include "cef/oracle.hpp"
#include "cef/rewrite.hpp"

using namespace cef;

namespace {

bool same(const CExp& a, const CExp& b) { return rewrite(add(a, negate(b))).is_zero(); }

testing::AssertionResult Same(const CExp& a, const std::string& b) {
  CExp eb = parse(b);
  if (same(a, eb)) return testing::AssertionSuccess();
  return testing::AssertionFailure() << print(a) << "  !=  " << print(eb);
}

CExp value_of(const std::string& text, const std::vector<std::string>& order) {
  auto r = integrate_all(parse(text), order);
  EXPECT_EQ(r.status, IntegrationStatus::Integrable) << text;
  return r.value;
}

// Closed value at p through the canonical character.
double closed_value(const CExp& e, int64_t p) {
  LocalField K(FieldKind::PadicQ, p);
  return interpret(e, Character(K), Point{}).real();
}

}  // namespace

TEST(ModelIntegral, Examples) {
  EXPECT_TRUE(Same(model_integral(LinForm(), std::nullopt, VTerm(Rational(1)), VTerm()), "-L^(-1)"));
  EXPECT_TRUE(model_integral(LinForm(Rational(-3)), RTerm::var("xi"), VTerm(Rational(1)), VTerm()).is_zero());
  EXPECT_TRUE(Same(model_integral(LinForm(Rational(2)), std::nullopt, VTerm(), VTerm()), "(L - 1) * L^(-3)"));
  EXPECT_TRUE(Same(model_integral(LinForm(), RTerm::var("xi"), VTerm(Rational(1)), VTerm()), "res xi; e(xi) * L^(-1)"));
}

TEST(ModelIntegral, UnitOrderMustBeLinear) {
  EXPECT_THROW(model_integral(LinForm(), std::nullopt, parse_vterm("x + 1"), VTerm()), UndeterminedUnitOrder);
  // Symbolic j and u = x give guards on j + ord(x).
  CExp m = model_integral(LinForm::var("j"), std::nullopt, parse_vterm("x"), VTerm());
  EXPECT_EQ(m.terms.size(), 2u);
}

TEST(IntegrateVf, Examples) {
  EXPECT_TRUE(Same(value_of("vf t; [ord(t) >= 0] * E(t)", {"t"}), "0"));
  EXPECT_TRUE(Same(value_of("vf t; [ord(t) >= 1] * E(t)", {"t"}), "L^(-1)"));
  EXPECT_TRUE(Same(value_of("vf t; [ord(t) >= 0]", {"t"}), "1"));
  auto r = integrate_all(parse("vf t; int j; [ord(t) == j, j >= 1] * L^(j)"), {"t", "j"});
  EXPECT_EQ(r.status, IntegrationStatus::NonIntegrable);
  EXPECT_FALSE(r.divergent.empty());
}

TEST(IntegrateVf, WholeLineDiverges) {
  EXPECT_EQ(integrate_vf(parse("vf t; [ord(t) <= 0]"), "t").status, IntegrationStatus::NonIntegrable);
  EXPECT_EQ(integrate_vf(parse("1"), "t").status, IntegrationStatus::NonIntegrable);
  // Every shell below level 0 contributes zero, so E(t) sums over all shells.
  auto r = integrate_vf(parse("vf t; E(t)"), "t");
  EXPECT_EQ(r.status, IntegrationStatus::Integrable);
  EXPECT_TRUE(r.value.is_zero());
  auto s = integrate_vf(parse("vf t; [ord(t) >= -3]"), "t");
  EXPECT_EQ(s.status, IntegrationStatus::Integrable);
  EXPECT_TRUE(Same(s.value, "L^3"));
}

TEST(IntegrateVf, ShellsAndTranslates) {
  EXPECT_TRUE(Same(value_of("vf t; [ord(t) == 0] * E(t)", {"t"}), "-L^(-1)"));
  EXPECT_TRUE(Same(value_of("vf t; [ord(t) == -1] * E(t)", {"t"}), "0"));
  EXPECT_TRUE(Same(value_of("vf t; [ord(t) == 2] * E(t)", {"t"}), "(L - 1) * L^(-3)"));
  EXPECT_TRUE(Same(value_of("vf t; [ord(t - 1) >= 1]", {"t"}), "L^(-1)"));
  EXPECT_TRUE(Same(value_of("vf t; [ord(t) == 0, ac(t) != 1]", {"t"}), "(L - 2) * L^(-1)"));
  // ac fixed to 1 on the unit shell: e(1) L^(-1).
  EXPECT_TRUE(Same(value_of("vf t; [ord(t) == 0, ac(t) == 1] * E(t)", {"t"}), "e(1) * L^(-1)"));
}

TEST(IntegrateVf, FreeParameterInEArgument) {
  // Transform of the unit ball is the indicator of the maximal ideal.
  auto r = integrate_vf(parse("vf x, y; [ord(y) >= 0] * E(x*y)"), "y");
  ASSERT_EQ(r.status, IntegrationStatus::Integrable);
  for (int64_t p : {5, 7}) {
    LocalField K(FieldKind::PadicQ, p);
    for (int64_t o = -3; o <= 3; ++o) {
      Point pt;
      pt.vf["x"] = Element::from_digits(K, o, {1, 2});
      double want = o >= 1 ? 1.0 : 0.0;
      EXPECT_NEAR(interpret(r.value, Character(K), pt).real(), want, 1e-12) << print(r.value) << " ord " << o;
    }
  }
}

TEST(IntegrateVf, NonAffineArguments) {
  EXPECT_THROW(integrate_vf(parse("vf t; [ord(t) >= -1] * E(t^2)"), "t"), UnsupportedIntegrand);
  // On the maximal ideal the square is negligible.
  EXPECT_TRUE(Same(value_of("vf t; [ord(t) >= 1] * E(t^2 + t)", {"t"}), "L^(-1)"));
}

TEST(IntegrateVf, ShiftsAffineParameter) {
  // u = s + 1 is not a monomial; the integral is taken in s' = s + 1.
  EXPECT_TRUE(Same(value_of("vf y, s; [ord(y) >= 0] * E(s*y) * E(y)", {"y"}), "vf s; [ord(s + 1) >= 1]"));
  // Centers y = 0 and y = s + 1.
  CExp v = value_of("vf y, s; [ord(y) >= 0, ord(y - s - 1) >= 0]", {"y"});
  LocalField K(FieldKind::PadicQ, 5);
  for (auto [s, want] : std::vector<std::pair<std::string, double>>{{"4", 1}, {"1/5", 0}, {"-1", 1}, {"-6/5", 0}}) {
    Point pt;
    pt.vf["s"] = Element::from_rational(K, Rational::parse(s));
    EXPECT_NEAR(interpret(v, Character(K), pt).real(), want, 1e-12) << s << " " << print(v);
  }
}

TEST(SumRes, Examples) {
  EXPECT_TRUE(sum_res(parse("res eta; e(eta)"), "eta").is_zero());
  EXPECT_TRUE(Same(sum_res(parse("res eta, x; e(x*eta)"), "eta"), "res x; L * [x == 0]"));
  EXPECT_TRUE(Same(sum_res(parse("res eta; [eta != 0] * e(eta)"), "eta"), "-1"));
  EXPECT_TRUE(Same(sum_res(parse("res eta; [eta == 2] * e(eta)"), "eta"), "e(2)"));
  EXPECT_THROW(sum_res(parse("res eta; e(eta^2)"), "eta"), NonAffineResidueArgument);
}

TEST(IntegrateAll, Examples) {
  CExp xy = value_of("vf x, y; [ord(x) >= 0, ord(y) >= 0] * E(x*y)", {"x", "y"});
  CExp yx = value_of("vf x, y; [ord(x) >= 0, ord(y) >= 0] * E(x*y)", {"y", "x"});
  EXPECT_TRUE(same(xy, yx)) << print(xy) << " vs " << print(yx);
  EXPECT_TRUE(Same(xy, "L^(-1)"));
  EXPECT_TRUE(Same(value_of("vf x; int j; [ord(x) == j, 0 <= j, j <= 2]", {"x", "j"}), "1 - L^(-3)"));
  EXPECT_TRUE(Same(value_of("vf x; res eta; [ord(x) == 0, ac(x) == eta] * E(x)", {"x", "eta"}), "-L^(-1)"));
  EXPECT_TRUE(Same(value_of("vf x; res eta; [ord(x) == 0, ac(x) == eta] * E(x)", {"eta", "x"}), "-L^(-1)"));
}

TEST(IntegrateAll, FubiniWithConditions) {
  const std::vector<std::string> items = {
      "vf x, y; [ord(x) >= 0, ord(y) >= 1] * E(x*y)",
      "vf x, y; [ord(x) >= -1, ord(y) >= 1] * E(x*y)",
      "vf x, y; [ord(x) >= 0, ord(y) >= 0, ord(x - y) >= 1]",
      "vf x, y; [ord(x) == 0, ord(y) >= 0] * E(x + y)",
      "vf x, y; [ord(x) >= 0, ord(y) >= 0, ord(x) <= ord(y)]",
  };
  for (const auto& s : items) {
    CExp a = value_of(s, {"x", "y"});
    CExp b = value_of(s, {"y", "x"});
    EXPECT_TRUE(same(a, b)) << s << ": " << print(a) << " vs " << print(b);
    for (int64_t p : {5, 7}) EXPECT_NEAR(closed_value(a, p), closed_value(b, p), 1e-12) << s;
  }
}

TEST(IntegrateAll, MatchesOracle) {
  struct Item {
    std::string text;
    std::vector<std::string> order;
    IntegrationBox box;
  };
  auto box = [](std::vector<VfRange> vf, int depth) {
    IntegrationBox b;
    b.vf = std::move(vf);
    b.depth = depth;
    return b;
  };
  std::vector<Item> items = {
      {"vf t; [ord(t) >= 0] * E(t)", {"t"}, box({{"t", 0}}, 3)},
      {"vf t; [ord(t) >= -1] * E(t)", {"t"}, box({{"t", -1}}, 3)},
      {"vf t; [ord(t) == -1, ac(t) == 2] * E(t)", {"t"}, box({{"t", -1}}, 3)},
      {"vf t; [ord(t - 1) >= 1] * E(t)", {"t"}, box({{"t", 0}}, 3)},
      {"vf t; [ord(t) >= 0, ord(t - 1) == 0] * E(2*t)", {"t"}, box({{"t", 0}}, 3)},
      {"vf t; [ord(t) == 0, ac(t) != 1] * E(t)", {"t"}, box({{"t", 0}}, 3)},
      {"vf t; [ord(t) >= -1, ord(t) <= 2, ord(t + 1) <= 1] * L^(-ord(t))", {"t"}, box({{"t", -1}}, 5)},
      {"vf x, y; [ord(x) >= 0, ord(y) >= 0] * E(x*y)", {"x", "y"}, box({{"x", 0}, {"y", 0}}, 3)},
  };
  for (const auto& it : items) {
    CExp v = value_of(it.text, it.order);
    for (int64_t p : {5, 7}) {
      LocalField K(FieldKind::PadicQ, p);
      auto o = numeric_integrate(parse(it.text), Character(K), it.box);
      EXPECT_NEAR(closed_value(v, p), o.value.real(), 1e-9) << it.text << " = " << print(v) << " p=" << p;
      EXPECT_NEAR(o.value.imag(), interpret(v, Character(K), Point{}).imag(), 1e-9) << it.text;
    }
  }
}

TEST(IntegrateAll, LinearityAndProjection) {
  CExp e1 = parse("vf t; [ord(t) >= 1] * E(t)");
  CExp e2 = parse("vf t; [ord(t) == 0] * E(t)");
  LRat a = LRat::L() + LRat(2), b = LRat(Rational(-3, 2));
  CExp lhs = integrate_all(add(scale(e1, a), scale(e2, b)), {"t"}).value;
  CExp rhs = add(scale(integrate_all(e1, {"t"}).value, a), scale(integrate_all(e2, {"t"}).value, b));
  EXPECT_TRUE(same(lhs, rhs)) << print(lhs) << " vs " << print(rhs);

  CExp f = parse("vf x; res r; [ord(x) == 2, r != 0] * e(r) * E(x)");
  CExp prod = integrate_all(mul(f, e1), {"t"}).value;
  EXPECT_TRUE(same(prod, mul(f, integrate_all(e1, {"t"}).value)));
}

TEST(ChangeOfVariables, Examples) {
  CExp e = parse("vf t; [ord(t) >= 1]");
  CExp s = change_of_variables_affine(e, "t", "s", VTerm::uniformizer(), VTerm(), VTerm());
  EXPECT_TRUE(Same(s, "vf s; L^(-1) * [ord(s) >= 0]"));
  EXPECT_TRUE(Same(value_of(print(s), {"s"}), "L^(-1)"));

  CExp g = parse("vf t, c; [ord(t - c) >= 1] * E(t)");
  CExp h = change_of_variables_affine(g, "t", "s", VTerm(Rational(1)), VTerm(), parse_vterm("c"));
  auto before = integrate_all(g, {"t"});
  auto after = integrate_all(h, {"s"});
  EXPECT_TRUE(same(before.value, after.value)) << print(before.value) << " vs " << print(after.value);

  CExp k = parse("vf t; [ord(t) >= 0] * E(t)");
  CExp k2 = change_of_variables_affine(k, "t", "s", VTerm(Rational(2)), VTerm(), VTerm());
  LocalField Q5(FieldKind::PadicQ, 5);
  IntegrationBox bt, bs;
  bt.vf = {{"t", 0}};
  bs.vf = {{"s", 0}};
  bt.depth = bs.depth = 3;
  EXPECT_NEAR(numeric_integrate(k, Character(Q5), bt).value.real(), numeric_integrate(k2, Character(Q5), bs).value.real(),
              1e-12);
  EXPECT_TRUE(same(integrate_all(k, {"t"}).value, integrate_all(k2, {"s"}).value));
}

TEST(IntegrateVf, A5Vanishing) {
  // Single cells whose E argument has certainly negative order.
  for (const char* s : {"vf t; [ord(t) == -2] * E(t)", "vf t; [ord(t) == -1, ac(t) == 3] * E(t)",
                        "vf t; [ord(t) == -3] * E(t + 1)"}) {
    CExp v = value_of(s, {"t"});
    EXPECT_TRUE(v.is_zero()) << s << " -> " << print(v);
  }
}
