#include <gtest/gtest.h>

#include <random>

#include "cef/cells.hpp"
#include "cef/dsl.hpp"
#include "cef/interpret.hpp"

using namespace cef;

namespace {

VTerm vt(const std::string& s) { return parse_vterm(s); }

std::vector<CondAtom> conds_of(const std::string& text) { return parse(text).terms.at(0).conds; }

Element random_element(std::mt19937_64& rng, const LocalField& K, int64_t vmin, int len) {
  std::uniform_int_distribution<int64_t> dig(0, K.p - 1);
  std::vector<int64_t> d(static_cast<size_t>(len));
  for (auto& x : d) x = dig(rng);
  d[0] = 1 + dig(rng) % (K.p - 1);
  return Element::from_digits(K, vmin, d);
}

struct Membership {
  int cells = 0;
  size_t which = 0;
};

// Cells whose conditions hold at t, with j and xi read off t - center.
Membership locate(const Decomposition& d, const LocalField& K, const Point& base, const Element& t) {
  Membership m;
  for (size_t k = 0; k < d.cells.size(); ++k) {
    const Cell& c = d.cells[k];
    Point pt = base;
    pt.vf[d.var] = t;
    Element z = t - eval_vterm(d.centers[c.center], K, pt);
    pt.ints[c.order_var] = z.ord();
    pt.res[c.ac_var] = z.ac();
    bool in = true;
    for (const auto& a : c.conds) in = in && eval_cond(a, K, pt);
    if (in) {
      ++m.cells;
      m.which = k;
    }
  }
  return m;
}

std::map<std::string, int64_t> int_env(const Point& pt) {
  std::map<std::string, int64_t> env = pt.ints;
  for (auto& [x, e] : pt.vf)
    if (!e.is_zero()) env[ord_symbol(x)] = e.ord();
  return env;
}

}  // namespace

TEST(Decompose, BallGivesOneCell) {
  auto d = decompose(conds_of("[ord(t) >= 0]"), {vt("t")}, "t");
  ASSERT_EQ(d.centers.size(), 1u);
  EXPECT_TRUE(d.centers[0].is_zero());
  ASSERT_EQ(d.cells.size(), 1u);
  EXPECT_EQ(d.prepared[0][0].ord, LinForm::var(d.cells[0].order_var));
}

TEST(Decompose, UnitAwayFromOne) {
  auto d = decompose(conds_of("[ord(t) == 0, ac(t) != 1]"), {vt("t*(t - 1)")}, "t");
  ASSERT_EQ(d.centers.size(), 2u);
  ASSERT_EQ(d.cells.size(), 1u);
  EXPECT_EQ(d.cells[0].center, 0u);
  EXPECT_EQ(d.prepared[0][0].ord, LinForm::var(d.cells[0].order_var));

  LocalField K(FieldKind::PadicQ, 5);
  std::mt19937_64 rng(1);
  int tested = 0;
  for (int i = 0; i < 300 && tested < 100; ++i) {
    Element t = random_element(rng, K, 0, 6);
    if (t.ac() == 1) continue;
    ++tested;
    auto m = locate(d, K, {}, t);
    ASSERT_EQ(m.cells, 1);
    Point pt;
    pt.vf["t"] = t;
    Element f = t * (t - Element::from_int(K, 1));
    pt.ints[d.cells[0].order_var] = t.ord();
    pt.res[d.cells[0].ac_var] = t.ac();
    EXPECT_EQ(d.prepared[0][0].ord.eval(int_env(pt)), Rational(f.ord()));
    EXPECT_EQ(eval_rterm(*d.prepared[0][0].ac, K, pt), f.ac());
  }
  EXPECT_EQ(tested, 100);
}

TEST(Decompose, ParameterCenterSplitsOnItsOrder) {
  auto d = decompose(conds_of("[ord(t) >= 0]"), {vt("t - c")}, "t");
  ASSERT_EQ(d.centers.size(), 2u);
  LocalField K(FieldKind::PadicQ, 5);
  std::mt19937_64 rng(2);
  for (int64_t oc = -2; oc <= 2; ++oc)
    for (int i = 0; i < 60; ++i) {
      Point base;
      base.vf["c"] = random_element(rng, K, oc, 6);
      Element t = random_element(rng, K, -2 + static_cast<int64_t>(rng() % 5), 6);
      Element z = t - base.vf["c"];
      if (z.is_zero()) continue;
      auto m = locate(d, K, base, t);
      EXPECT_EQ(m.cells, t.ord() >= 0 ? 1 : 0) << "ord c " << oc << " t " << t.str();
    }
}

TEST(Decompose, PartitionAndPreparationSoundness) {
  // Random condition systems over centers {0, 1, -1} or {0, c}; every
  // satisfying point lies in exactly one cell and prepared data match direct
  // computation.
  const std::vector<std::string> atom_pool[2] = {
      {"ord(t) >= -1", "ord(t - 1) == 0", "ac(t) != 1", "ord(t + 1) <= 1", "ac(t + 1) == 2", "ord(t) <= 2",
       "ord(t*(t - 1)) >= 0", "ord(t - 1) >= 1"},
      {"ord(t) >= -1", "ord(t - c) == 0", "ac(t) != 1", "ord(t - c) <= 1", "ac(t - c) == 2", "ord(t) <= 2",
       "ord(t*(t - c)) >= 0", "ord(t - c) >= 1"}};
  const std::vector<std::string> target_pools[2] = {{"t", "t - 1", "t*(t + 1)", "t^2*(t - 1)", "2*t + 2"},
                                                    {"t", "t - c", "t*(t - c)", "c*t^2", "c*t - c^2"}};
  std::mt19937_64 rng(99);
  int points = 0;
  for (int64_t p : {5, 7}) {
    LocalField K(FieldKind::PadicQ, p);
    for (int inst = 0; inst < 10; ++inst) {
      const auto& atoms = atom_pool[inst % 2];
      const auto& target_pool = target_pools[inst % 2];
      std::string text;
      for (size_t i = 0; i < atoms.size(); ++i)
        if (rng() % 3 == 0) text += (text.empty() ? "" : ", ") + atoms[i];
      if (text.empty()) text = atoms[0];
      auto conds = conds_of("vf t, c; [" + text + "]");
      std::vector<VTerm> targets;
      for (const auto& s : target_pool)
        if (rng() % 2) targets.push_back(vt(s));
      auto d = decompose(conds, targets, "t");
      for (int s = 0; s < 50; ++s) {
        Point base;
        base.vf["c"] = random_element(rng, K, static_cast<int64_t>(rng() % 5) - 2, 8);
        Element t = random_element(rng, K, static_cast<int64_t>(rng() % 6) - 2, 8);
        bool degenerate = false;
        for (const auto& c : d.centers) {
          Point pt = base;
          if ((t - eval_vterm(c, K, pt)).ord_lower() > 4) degenerate = true;
        }
        if (degenerate) continue;
        Point full = base;
        full.vf["t"] = t;
        bool expect = true;
        for (const auto& c : conds) expect = expect && eval_cond(c, K, full);
        auto m = locate(d, K, base, t);
        ASSERT_EQ(m.cells, expect ? 1 : 0) << text << " t=" << t.str() << " c=" << base.vf["c"].str();
        ++points;
        if (!expect) continue;
        const Cell& cell = d.cells[m.which];
        Point pt = full;
        Element z = t - eval_vterm(d.centers[cell.center], K, full);
        pt.ints[cell.order_var] = z.ord();
        pt.res[cell.ac_var] = z.ac();
        for (size_t i = 0; i < targets.size(); ++i) {
          Element f = eval_vterm(targets[i], K, full);
          const auto& prep = d.prepared[m.which][i];
          EXPECT_EQ(prep.ord.eval(int_env(pt)), Rational(f.ord())) << targets[i].str();
          if (prep.ac) EXPECT_EQ(eval_rterm(*prep.ac, K, pt), f.ac()) << targets[i].str();
        }
      }
    }
  }
  EXPECT_GT(points, 500);
}

TEST(Decompose, CentersNeedSeparatedDifferences) {
  EXPECT_THROW(decompose({}, {vt("t - 1"), vt("t - x")}, "t"), DegenerateCenters);
  auto base = conds_of("[ord(x - 1) == 2]");
  auto d = decompose({}, {vt("t - 1"), vt("t - x")}, "t", base);
  EXPECT_EQ(d.centers.size(), 2u);
  EXPECT_THROW(decompose({}, {vt("t^2 - x")}, "t"), UnsupportedShape);
}

TEST(PrepareAffine, Examples) {
  auto [u, w] = prepare_affine(vt("3*t + 1"), "t", VTerm());
  EXPECT_EQ(u, VTerm(Rational(3)));
  EXPECT_EQ(w, VTerm(Rational(1)));
  auto [u2, w2] = prepare_affine(vt("x*t + y"), "t", vt("c"));
  EXPECT_EQ(u2, vt("x"));
  EXPECT_EQ(w2, vt("x*c + y"));
  EXPECT_THROW(prepare_affine(vt("t^2"), "t", VTerm(Rational(1))), NotAffine);
}
