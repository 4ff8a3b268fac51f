#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cef/dsl.hpp"
#include "cef/interpret.hpp"
#include "cef/localfield.hpp"
#include "random_cexp.hpp"

using namespace cef;

namespace {

const LocalField Q5(FieldKind::PadicQ, 5);
const LocalField F5(FieldKind::LaurentF, 5);

std::complex<double> unit_root(double num, double den) {
  double a = 2 * M_PI * num / den;
  return {std::cos(a), std::sin(a)};
}

Element random_element(std::mt19937_64& rng, const LocalField& K, int64_t vmin, int len) {
  std::uniform_int_distribution<int64_t> dig(0, K.p - 1);
  std::vector<int64_t> d(static_cast<size_t>(len));
  for (auto& x : d) x = dig(rng);
  return Element::from_digits(K, vmin, d);
}

// Appends random digits below the precision of x.
Element refine(std::mt19937_64& rng, const Element& x, int extra) {
  const LocalField& K = x.field();
  std::uniform_int_distribution<int64_t> dig(0, K.p - 1);
  int64_t lo = std::min(x.ord_lower(), x.prec());
  std::vector<int64_t> d;
  for (int64_t i = lo; i < x.prec(); ++i) d.push_back(x.is_zero() ? 0 : x.digit_at(i));
  for (int i = 0; i < extra; ++i) d.push_back(dig(rng));
  return Element::from_digits(K, lo, d);
}

std::vector<LocalField> fields() {
  std::vector<LocalField> out;
  for (int64_t p : {2, 3, 5, 7, 11})
    for (auto k : {FieldKind::PadicQ, FieldKind::LaurentF}) out.emplace_back(k, p);
  return out;
}

}  // namespace

TEST(OrdAc, Examples) {
  Element a = Element::from_digits(Q5, 2, {3});
  EXPECT_EQ(a.ord(), 2);
  EXPECT_EQ(a.ac(), 3);
  Element b = Element::from_digits(F5, -1, {1, 1});
  EXPECT_EQ(b.ord(), -1);
  EXPECT_EQ(b.ac(), 1);
  Element c = Element::from_int(Q5, 10);
  EXPECT_EQ(c.ord(), 1);
  EXPECT_EQ(c.ac(), 2);
  EXPECT_THROW(Element::zero(Q5, 4).ord(), ZeroAtPrecision);
  EXPECT_THROW(Element::from_digits(Q5, 0, {0, 0}).ac(), ZeroAtPrecision);
}

TEST(Element, Arithmetic) {
  Element third = Element::from_rational(Q5, Rational(1, 3));
  Element one = third * Element::from_int(Q5, 3);
  EXPECT_EQ(one.ord(), 0);
  EXPECT_EQ(one.digits()[0], 1);
  for (size_t i = 1; i < one.digits().size(); ++i) EXPECT_EQ(one.digits()[i], 0);
  Element m1 = Element::from_int(Q5, -1);
  for (auto d : m1.digits()) EXPECT_EQ(d, 4);
  EXPECT_TRUE((m1 + Element::from_int(Q5, 1)).is_zero());
  EXPECT_THROW(Element::from_rational(F5, Rational(1, 5)), std::domain_error);
  Element x = Element::parse(F5, "v=-1 digits=[2,3,4]");
  Element y = x * x.inverse();
  EXPECT_EQ(y.ord(), 0);
  EXPECT_EQ(y.ac(), 1);
  EXPECT_EQ(y.prec(), 3);
  EXPECT_EQ(Element::parse(Q5, x.str()).str(), x.str());
  EXPECT_THROW(Element::parse(Q5, "digits=[1]"), std::invalid_argument);
  EXPECT_THROW(LocalField(FieldKind::PadicQ, 6), std::invalid_argument);
}

TEST(Psi, Examples) {
  Character can(Q5);
  EXPECT_LT(std::abs(psi(can, Element::from_int(Q5, 1)) - unit_root(1, 5)), 1e-12);
  EXPECT_LT(std::abs(psi(can, Element::from_int(Q5, 5)) - 1.0), 1e-12);
  EXPECT_LT(std::abs(psi(can, Element::from_rational(Q5, Rational(1, 5))) - unit_root(1, 25)), 1e-12);
  EXPECT_THROW(psi(can, Element::from_digits(Q5, -2, {1})), InsufficientPrecision);
}

TEST(Psi, TrivialOnMaximalIdealAndResidueOnUnits) {
  std::mt19937_64 rng(11);
  for (const auto& K : fields())
    for (const auto& ch : character_family(K, 2)) {
      for (int i = 0; i < 5; ++i) {
        Element m = random_element(rng, K, 1, 6);
        EXPECT_LT(std::abs(psi(ch, m) - 1.0), 1e-12) << K.name();
        Element u = random_element(rng, K, 0, 6);
        if (u.is_zero() || u.ord() != 0) continue;
        EXPECT_LT(std::abs(psi(ch, u) - unit_root(static_cast<double>(u.ac()), static_cast<double>(K.p))), 1e-12);
      }
    }
}

TEST(Psi, Additive) {
  std::mt19937_64 rng(7);
  for (const auto& K : fields())
    for (int i = 0; i < 60; ++i) {
      std::uniform_int_distribution<int64_t> v(-3, 1);
      Element c = random_element(rng, K, 0, 8);
      Character ch(K, c);
      Element x = random_element(rng, K, v(rng), 10);
      Element y = random_element(rng, K, v(rng), 10);
      auto lhs = psi(ch, x + y);
      auto rhs = psi(ch, x) * psi(ch, y);
      EXPECT_LT(std::abs(lhs - rhs), 1e-12) << K.name() << " x=" << x.str() << " y=" << y.str();
    }
}

TEST(Psi, TwistOnlyMattersModuloSupportDepth) {
  std::mt19937_64 rng(3);
  for (const auto& K : fields())
    for (int M = 1; M <= 3; ++M)
      for (int i = 0; i < 10; ++i) {
        Element c = random_element(rng, K, 0, 8);
        Element c2 = c + Element::uniformizer(K, M) * random_element(rng, K, 0, 8);
        Element x = random_element(rng, K, -M, 10);
        EXPECT_LT(std::abs(psi(Character(K, c), x) - psi(Character(K, c2), x)), 1e-12);
      }
  EXPECT_EQ(character_family(Q5, 2).size(), 25u);
  EXPECT_TRUE(character_family(Q5, 2)[0].twist.is_zero());
}

TEST(Precision, MonotoneUnderRefinement) {
  std::mt19937_64 rng(5);
  for (const auto& K : fields())
    for (int i = 0; i < 40; ++i) {
      Element x = random_element(rng, K, -2, 4);
      Element x2 = refine(rng, x, 4);
      Character ch(K, random_element(rng, K, 0, 4));
      if (!x.is_zero()) {
        EXPECT_EQ(x.ord(), x2.ord());
        EXPECT_EQ(x.ac(), x2.ac());
      }
      EXPECT_LT(std::abs(psi(ch, x) - psi(ch, x2)), 1e-12);
      EXPECT_EQ(in_coset(x2, Element::from_int(K, 1), 1), true);
    }
}

TEST(Precision, InterpretMonotone) {
  std::mt19937_64 rng(17);
  int decided = 0;
  for (int64_t p : {5, 7})
    for (auto kind : {FieldKind::PadicQ, FieldKind::LaurentF}) {
      LocalField K(kind, p);
      Character ch(K);
      for (int i = 0; i < 60; ++i) {
        CExp e = gen::random_cexp(rng);
        Point pt;
        pt.vf["x"] = random_element(rng, K, -1, 3);
        pt.vf["y"] = random_element(rng, K, -1, 3);
        pt.res["xi"] = static_cast<int64_t>(rng() % static_cast<uint64_t>(p));
        pt.ints["j"] = static_cast<int64_t>(rng() % 5) - 2;
        std::complex<double> v;
        try {
          v = interpret(e, ch, pt);
        } catch (const InsufficientPrecision&) {
          continue;
        }
        ++decided;
        Point pt2 = pt;
        pt2.vf["x"] = refine(rng, pt.vf["x"], 3);
        pt2.vf["y"] = refine(rng, pt.vf["y"], 3);
        EXPECT_LT(std::abs(interpret(e, ch, pt2) - v), 1e-9) << print(e);
      }
    }
  EXPECT_GT(decided, 40);
}

TEST(Interpret, Examples) {
  Character ch(Q5);
  Point pt;
  pt.vf["x"] = Element::from_int(Q5, 2);
  EXPECT_LT(std::abs(interpret(parse("[ord(x) == 0] * E(x)"), ch, pt) - unit_root(2, 5)), 1e-12);
  EXPECT_LT(std::abs(interpret(parse("-L^(-1)"), ch, {}) - (-0.2)), 1e-12);
  LocalField Q3(FieldKind::PadicQ, 3);
  Point pt3;
  pt3.vf["x"] = Element::from_int(Q3, 1);
  auto v = interpret(parse("sum eta : e(eta * ac(x)) * [eta != 0]"), Character(Q3), pt3);
  EXPECT_LT(std::abs(v - (-1.0)), 1e-12);
}

TEST(Interpret, UndecidedConditionsThrow) {
  Character ch(Q5);
  Point pt;
  pt.vf["x"] = Element::zero(Q5, 2);
  CExp e = parse("[ord(x) == 3]");
  EXPECT_THROW(interpret(e, ch, pt), InsufficientPrecision);
  EXPECT_NEAR(std::abs(interpret(parse("[ord(x) == 1]"), ch, pt)), 0, 1e-15);
  EXPECT_NEAR(std::abs(interpret(parse("[ord(x) >= 1]"), ch, pt) - 1.0), 0, 1e-15);
}

TEST(Cosets, HenselExponent) {
  EXPECT_EQ(hensel_exponent(Q5, 2), 1);
  EXPECT_EQ(hensel_exponent(Q5, 5), 2);
  EXPECT_EQ(hensel_exponent(Q5, 50), 3);
  EXPECT_EQ(hensel_exponent(LocalField(FieldKind::PadicQ, 2), 2), 3);
  EXPECT_THROW(hensel_exponent(F5, 5), HenselCapExceeded);
  EXPECT_EQ(hensel_exponent(F5, 3), 1);
}

TEST(Cosets, Membership) {
  Element one = Element::from_int(Q5, 1);
  EXPECT_TRUE(in_coset(Element::from_int(Q5, 4), one, 2));
  EXPECT_FALSE(in_coset(Element::from_int(Q5, 2), one, 2));
  EXPECT_TRUE(in_coset(Element::from_int(Q5, 6), one, 2));
  EXPECT_FALSE(in_coset(Element::from_int(Q5, 5), one, 2));
  EXPECT_TRUE(in_coset(Element::from_int(Q5, 2), Element::from_int(Q5, 2), 2));
  EXPECT_TRUE(in_coset(Element::from_int(Q5, 75), Element::from_int(Q5, 3), 2));
  LocalField Q2(FieldKind::PadicQ, 2);
  EXPECT_TRUE(in_coset(Element::from_int(Q2, 17), Element::from_int(Q2, 1), 2));
  EXPECT_FALSE(in_coset(Element::from_int(Q2, 5), Element::from_int(Q2, 1), 2));
  EXPECT_TRUE(in_coset(Element::from_int(Q5, 32), one, 5));
  EXPECT_FALSE(in_coset(Element::from_int(Q5, 2), one, 5));
}
