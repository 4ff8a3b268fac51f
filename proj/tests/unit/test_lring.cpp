#include <gtest/gtest.h>

#include <random>

#include "cef/lring.hpp"

using cef::DenFactor;
using cef::LaurentPoly;
using cef::LRat;
using cef::Rational;

namespace {

LRat geo(int i) { return LRat::geometric(i); }

struct Raw {
  LaurentPoly num;
  std::vector<DenFactor> den;
};

Raw random_raw(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-4, 4), expo(-3, 3), nden(0, 2), idx(1, 3), cst(1, 3);
  Raw r;
  int terms = 1 + static_cast<int>(rng() % 3);
  for (int t = 0; t < terms; ++t) {
    int c = coef(rng);
    if (c != 0) r.num[expo(rng)] += c;
  }
  for (auto it = r.num.begin(); it != r.num.end();) it = it->second == 0 ? r.num.erase(it) : std::next(it);
  int k = nden(rng);
  for (int t = 0; t < k; ++t) r.den.push_back({1, idx(rng), 1});
  if (rng() % 4 == 0) r.den.push_back({cst(rng), 0, 1});
  return r;
}

// Same value, different presentation: multiply through by (1 - L^-i).
Raw rewrite_same(const Raw& a, int i) {
  Raw b = a;
  LaurentPoly n;
  for (auto& [k, c] : a.num) {
    n[k] += c;
    n[k - i] -= c;
  }
  for (auto it = n.begin(); it != n.end();) it = it->second == 0 ? n.erase(it) : std::next(it);
  b.num = n;
  b.den.push_back({1, i, 1});
  return b;
}

}  // namespace

TEST(LRat, NormalizeExamples) {
  auto a = LRat::normalize({{2, 1}, {0, -1}}, {{1, 1, 1}});
  EXPECT_EQ(a, LRat::L(2) + LRat::L(1));
  EXPECT_NE(a, LRat::L(3) + LRat::L(2));
  for (int q : {2, 3, 5}) {
    Rational qq(q);
    EXPECT_EQ(a.specialize(qq), (qq * qq - 1) / (Rational(1) - qq.inverse()));
  }
  EXPECT_TRUE(LRat::normalize({}, {{1, 2, 1}}).is_zero());
  EXPECT_TRUE(LRat::normalize({}, {{1, 2, 1}}).den().empty());

  auto lhs = LRat::normalize({{-1, 1}}, {{1, 1, 1}});
  // 1/(L-1) = L^-1 / (1 - L^-1) once the factor is written in the admissible basis.
  auto rhs = LRat::L(-1) * geo(1);
  EXPECT_EQ(lhs, rhs);
  EXPECT_EQ(lhs.str(), rhs.str());
}

TEST(LRat, NonAdmissibleDenominator) {
  EXPECT_THROW(LRat::normalize({{0, 1}}, {{0, 0, 1}}), cef::NonAdmissibleDenominator);
  EXPECT_THROW(LRat::normalize({{0, 1}}, {{-2, 0, 1}}), cef::NonAdmissibleDenominator);
  EXPECT_THROW(LRat::normalize({{0, 1}}, {{1, -1, 1}}), cef::NonAdmissibleDenominator);
}

TEST(LRat, ArithExamples) {
  EXPECT_TRUE(((LRat::L(1) - 1) * LRat::L(-1) + LRat::L(-1)).is_one());
  EXPECT_EQ(geo(1) - 1, LRat::L(-1) * geo(1));
  auto prod = geo(1) * geo(2);
  EXPECT_EQ(prod.specialize(3), Rational(1) / ((Rational(1) - Rational(1, 3)) * (Rational(1) - Rational(1, 9))));
  // 1/(1-L^-1) * 1/(1-L^-2) = L^3 / ((L-1)^2 (L+1)), which needs both (1-L^-1) and (1-L^-2).
  EXPECT_EQ(prod.den().size(), 2u);
}

TEST(LRat, SpecializeExamples) {
  EXPECT_EQ(LRat::monomial(-1, -1).specialize(5), Rational(-1, 5));
  EXPECT_EQ(geo(1).specialize(2), Rational(2));
  EXPECT_EQ((LRat::L(3) + LRat::L(2)).specialize(3), Rational(36));
}

TEST(LRat, TextualForms) {
  EXPECT_EQ(LRat::monomial(-1, -1).str(), "(-1*L^-1)/1");
  EXPECT_EQ((LRat::L(-1) * geo(1)).dsl(), "L^(-1)/((1 - L^(-1)))");
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    auto r = random_raw(rng);
    auto x = LRat::normalize(r.num, r.den);
    EXPECT_EQ(LRat::parse(x.str()), x) << x.str();
  }
}

TEST(LRat, CanonicalFormMatchesSpecialization) {
  std::mt19937_64 rng(20240611);
  int equal_pairs = 0;
  for (int t = 0; t < 1000; ++t) {
    Raw ra = random_raw(rng);
    Raw rb = (t % 2 == 0) ? rewrite_same(ra, 1 + static_cast<int>(rng() % 3)) : random_raw(rng);
    auto a = LRat::normalize(ra.num, ra.den);
    auto b = LRat::normalize(rb.num, rb.den);
    bool spec_equal = true;
    for (int q : {2, 3, 5, 7}) spec_equal = spec_equal && a.specialize(q) == b.specialize(q);
    EXPECT_EQ(a == b, spec_equal) << a.str() << " vs " << b.str();
    if (a == b) ++equal_pairs;
  }
  EXPECT_GE(equal_pairs, 500);
}

TEST(LRat, SpecializationIsHomomorphism) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 300; ++t) {
    auto ra = random_raw(rng), rb = random_raw(rng);
    auto a = LRat::normalize(ra.num, ra.den);
    auto b = LRat::normalize(rb.num, rb.den);
    for (int q : {2, 3, 5, 7}) {
      Rational qa = a.specialize(q), qb = b.specialize(q);
      EXPECT_EQ((a + b).specialize(q), qa + qb);
      EXPECT_EQ((a - b).specialize(q), qa - qb);
      EXPECT_EQ((a * b).specialize(q), qa * qb);
    }
  }
}

TEST(LRat, NormalizeIsIdempotent) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    auto r = random_raw(rng);
    auto x = LRat::normalize(r.num, r.den);
    std::vector<DenFactor> den{{x.const_den(), 0, 1}};
    for (auto& [i, m] : x.den()) den.push_back({1, i, m});
    EXPECT_EQ(LRat::normalize(x.num(), den), x);
  }
}

TEST(LRat, Inverse) {
  auto lm1 = LRat::L(1) - 1;
  auto inv = lm1.try_inverse();
  ASSERT_TRUE(inv.has_value());
  EXPECT_TRUE((*inv * lm1).is_one());
  auto lp1 = LRat::L(2) + 2;
  EXPECT_FALSE(lp1.try_inverse().has_value());
  auto third = LRat(Rational(1, 3));
  EXPECT_EQ(third.try_inverse().value(), LRat(3));
  EXPECT_EQ((LRat::L(2) - 1).pow(-1).specialize(2), Rational(1, 3));
}

TEST(LRat, ModularSpecialization) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    auto r = random_raw(rng);
    auto x = LRat::normalize(r.num, r.den);
    Rational v = x.specialize(3);
    uint64_t expect = cef::modp::mul(cef::modp::from_int(v.num()), cef::modp::inv(cef::modp::from_int(v.den())));
    EXPECT_EQ(x.specialize_mod(3), expect);
  }
}
