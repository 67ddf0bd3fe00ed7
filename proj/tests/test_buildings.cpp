#include <gtest/gtest.h>

#include <random>
#include <set>

#include "sftkit/buildings.hpp"
#include "sftkit/errors.hpp"

using namespace sftkit;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::InvalidInput;
}

std::set<BuildingType> types_of(const EnumerationResult& r) {
  std::set<BuildingType> out;
  for (const auto& s : r.shapes) out.insert(s.type);
  return out;
}

// Thm 1.4 right-hand side with no hidden double points, straight from windings.
int adjunction_rhs(const OrbitInstance& x) {
  const SpectralData d = spectral_data(x);
  const int m = x.multiplicity();
  return (std::gcd(m, d.alpha_plus) - 1) + (std::gcd(m, d.alpha_minus) - 1) + (m - 1) * d.parity;
}

}  // namespace

TEST(Validate, Templates) {
  for (const auto& t : theorem_templates()) {
    const auto b = template_building(t.type);
    const auto r = validate_building(b);
    EXPECT_TRUE(r.pass) << t.shape << ": " << r.failed << " " << r.detail;
    EXPECT_EQ(shape_string(b), t.shape);
  }
}

TEST(Validate, LoneTrivialCylinderLevelIsUnstable) {
  auto b = template_building(BuildingType::I);
  // Insert a level holding only a trivial cylinder between v0 and the plane.
  auto orbit = b.breakings.front().orbit;
  Component t{"t", trivial_cylinder(orbit, "t")};
  b.levels.insert(b.levels.begin() + 1, std::vector<Component>{t});
  b.breakings.front().lower = "t";
  b.breakings.push_back(Breaking{"t", 1, b.levels[2][0].id, orbit, 0});
  const auto r = validate_building(b);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.failed, "stability");
}

TEST(Validate, TwoPositivePuncturesBreakTree) {
  auto b = template_building(BuildingType::I);
  auto& plane = b.levels[1][0].curve;
  plane.punctures.push_back(Puncture::make(Sign::Positive, b.breakings.front().orbit));
  const auto r = validate_building(b);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.failed, "tree");
}

TEST(Validate, MismatchedOrbitAndDecoration) {
  auto b = template_building(BuildingType::I);
  b.breakings.front().decoration = 1;
  EXPECT_EQ(validate_building(b).failed, "decoration");
  b = template_building(BuildingType::I);
  b.breakings.front().orbit = OrbitInstance(OrbitClass::hyperbolic("other", 0), 1);
  EXPECT_EQ(validate_building(b).failed, "matching");
}

TEST(Validate, LowestLevelMustBePlanes) {
  auto b = template_building(BuildingType::I);
  auto& plane = b.levels[1][0].curve;
  plane.punctures.push_back(Puncture::make(Sign::Negative, b.breakings.front().orbit));
  const auto r = validate_building(b);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.failed, "lowest_level");
}

TEST(CnBudget, Cases) {
  EXPECT_EQ(cn_budget(template_building(BuildingType::I), 0).lemma_case, 1);
  EXPECT_EQ(cn_budget(template_building(BuildingType::II), 0).lemma_case, 2);
  EXPECT_EQ(cn_budget(template_building(BuildingType::VI), 0).lemma_case, 2);
  EXPECT_EQ(cn_budget(template_building(BuildingType::V), 0).lemma_case, 1);
}

TEST(CnBudget, TwoOddBreakingsViolate) {
  // v0 with two odd negative ends over two index-2 planes (total index 4).
  auto e = OrbitClass::elliptic("e", std::sqrt(2.0) - 1.0);
  auto top = OrbitClass::elliptic("top", 0.618);
  Building b;
  PuncturedCurve v0;
  v0.name = "v0";
  v0.embedded = true;
  v0.delta = 0;
  v0.delta_infinity = 0;
  v0.punctures.push_back(Puncture::make(Sign::Positive, {top, 1}));
  v0.punctures.push_back(Puncture::make(Sign::Negative, {e, 1}));
  v0.punctures.push_back(Puncture::make(Sign::Negative, {e, 1}));
  v0.c1_rel = 0;
  PuncturedCurve p;
  p.embedded = true;
  p.punctures.push_back(Puncture::make(Sign::Positive, {e, 1}));
  p.c1_rel = 1;
  p.name = "p1";
  auto p2 = p;
  p2.name = "p2";
  b.levels = {{Component{"v0", v0}}, {Component{"p1", p}, Component{"p2", p2}}};
  b.breakings = {Breaking{"v0", 1, "p1", {e, 1}, 0}, Breaking{"v0", 2, "p2", {e, 1}, 0}};
  ASSERT_TRUE(validate_building(b).pass);
  EXPECT_EQ(kind_of([&] { cn_budget(b, 0); }), ErrorKind::BudgetViolation);
}

TEST(IntersectionBound, Examples) {
  const auto b2 = template_building(BuildingType::II);
  const auto bounds = adjunction_lower_bounds(b2);
  EXPECT_EQ(bounds.at("v0"), -1);
  EXPECT_EQ(intersection_lower_bound(b2, bounds), 0);
  const auto b1 = template_building(BuildingType::I);
  EXPECT_EQ(intersection_lower_bound(b1, {{"v0", 0}, {"v1_1", 0}}), 0);
  // Odd double-covered breaking: m p = 2.
  Building odd2 = b1;
  const OrbitInstance e2(OrbitClass::elliptic("e", 0.3), 2);
  odd2.breakings.front().orbit = e2;
  EXPECT_EQ(intersection_lower_bound(odd2, {{"v0", 0}, {"v1_1", 0}}), 2);
  EXPECT_THROW(intersection_lower_bound(b1, {{"v0", 0}}), Error);
}

TEST(LocalAdjunction, Examples) {
  EXPECT_EQ(local_adjunction(OrbitInstance(OrbitClass::elliptic("e", 0.3), 1)).delta, 0);
  EXPECT_EQ(local_adjunction(OrbitInstance(OrbitClass::hyperbolic("h", 1), 2)).delta, 0);
  const auto r = local_adjunction(OrbitInstance(OrbitClass::elliptic("e", 0.4), 3));
  EXPECT_EQ(r.delta, 1);
  EXPECT_EQ(r.parity_term, 2);
  EXPECT_EQ(local_adjunction(OrbitInstance(OrbitClass::hyperbolic("h", 1), 2), 2, 3).delta, 5);
  EXPECT_EQ(kind_of([] { local_adjunction(SpectralData{0, 1, 1, 1, 1, 1}, 2); }),
            ErrorKind::ParityArithmeticError);
}

TEST(LocalAdjunction, TermsNonnegativeAndClassificationMatchesRhs) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> thd(-3.0, 3.0);
  std::vector<OrbitClass> orbits;
  for (int i = 0; i < 100; ++i) orbits.push_back(OrbitClass::elliptic("e", thd(rng)));
  for (int cz = -5; cz <= 5; ++cz) orbits.push_back(OrbitClass::hyperbolic("h", cz));
  for (const auto& o : orbits) {
    for (int m = 1; m <= 6; ++m) {
      OrbitInstance x(o, m);
      LocalAdjunction la;
      try {
        la = local_adjunction(x, 1, 2);
      } catch (const Error& e) {
        ASSERT_EQ(e.kind(), ErrorKind::DegenerateCover);
        continue;
      }
      EXPECT_GE(la.sigma_plus_term, 0);
      EXPECT_GE(la.sigma_minus_term, 0);
      EXPECT_GE(la.parity_term, 0);
      EXPECT_GE(la.delta, 3);
      const auto cls = classify_embedded_breaking(x);
      EXPECT_EQ(cls == EmbeddedBreaking::Forbidden, adjunction_rhs(x) > 0) << o.name() << " m=" << m;
      if (cls != EmbeddedBreaking::Forbidden) {
        EXPECT_TRUE(m == 1 || (m == 2 && o.is_hyperbolic() && o.hyperbolic_cz() % 2 != 0));
      }
    }
  }
}

TEST(EmbeddedBreaking, Examples) {
  EXPECT_EQ(classify_embedded_breaking({OrbitClass::elliptic("e", 0.3), 1}), EmbeddedBreaking::Simple);
  EXPECT_EQ(classify_embedded_breaking({OrbitClass::hyperbolic("h", 1), 2}),
            EmbeddedBreaking::BadDoubleCover);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> thd(0.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const double th = thd(rng);
    if (std::abs(2 * th - std::round(2 * th)) < 1e-6) continue;
    EXPECT_EQ(classify_embedded_breaking({OrbitClass::elliptic("e", th), 2}), EmbeddedBreaking::Forbidden);
  }
}

TEST(Decorations, CountIsMultiplicity) {
  for (int m : {1, 2, 5}) {
    const OrbitInstance x(OrbitClass::hyperbolic("h", 1), m);
    EXPECT_EQ(decoration_count(x), m);
  }
  // Both sides of a breaking see the same instance.
  const auto b = template_building(BuildingType::IV);
  for (const auto& br : b.breakings) {
    const auto* up = b.find(br.upper);
    const auto* lo = b.find(br.lower);
    EXPECT_EQ(decoration_count(up->curve.punctures[static_cast<size_t>(br.upper_end)].instance),
              decoration_count(lo->curve.punctures.front().instance));
  }
}

TEST(Classify, Templates) {
  for (const auto& t : theorem_templates()) {
    EXPECT_EQ(classify_building(template_building(t.type)).type, t.type) << t.shape;
  }
  auto lone = template_building(BuildingType::II);
  lone.levels.resize(1);
  lone.breakings.clear();
  auto& ps = lone.levels[0][0].curve.punctures;
  ps.erase(ps.begin() + 1, ps.end());
  const auto c = classify_building(lone);
  EXPECT_EQ(c.type, BuildingType::Rejected);
  EXPECT_EQ(c.reason, "needs at least one lower level");
}

TEST(Enumerate, IndexOne) {
  EnumerationOptions o;
  o.total_index = 1;
  const auto r = enumerate_degenerations(o);
  EXPECT_EQ(types_of(r), (std::set<BuildingType>{BuildingType::I}));
  ASSERT_EQ(r.shapes.size(), 1u);
}

TEST(Enumerate, IndexTwo) {
  EnumerationOptions o;
  const auto r = enumerate_degenerations(o);
  EXPECT_EQ(types_of(r), (std::set<BuildingType>{BuildingType::II, BuildingType::III, BuildingType::IV,
                                                 BuildingType::V, BuildingType::VI}));
  EXPECT_EQ(r.shapes.size(), 5u);
  for (const auto& s : r.shapes) {
    EXPECT_TRUE(validate_building(s.example).pass);
    EXPECT_NO_THROW(cn_budget(s.example, 0));
    EXPECT_LE(intersection_lower_bound(s.example, adjunction_lower_bounds(s.example)), 0);
    EXPECT_NE(classify_building(s.example).type, BuildingType::Rejected);
  }
  for (const auto& t : theorem_templates()) {
    if (t.total_index != 2) continue;
    bool found = false;
    for (const auto& s : r.shapes) found = found || s.shape == t.shape;
    EXPECT_TRUE(found) << t.shape;
  }
}

TEST(Enumerate, LevelCap) {
  EnumerationOptions o;
  o.max_levels = 2;
  EXPECT_EQ(types_of(enumerate_degenerations(o)),
            (std::set<BuildingType>{BuildingType::II, BuildingType::III, BuildingType::IV}));
}

TEST(Enumerate, ThreadedMatchesSerial) {
  EnumerationOptions serial;
  EnumerationOptions threaded;
  threaded.threads = 8;
  const auto a = enumerate_degenerations(serial);
  const auto b = enumerate_degenerations(threaded);
  ASSERT_EQ(a.shapes.size(), b.shapes.size());
  for (size_t i = 0; i < a.shapes.size(); ++i) {
    EXPECT_EQ(a.shapes[i].shape, b.shapes[i].shape);
    EXPECT_EQ(a.shapes[i].variants, b.shapes[i].variants);
  }
  EXPECT_EQ(a.candidates, b.candidates);
}

TEST(Enumerate, BudgetAndBounds) {
  EnumerationOptions o;
  o.max_candidates = 3;
  EXPECT_EQ(kind_of([&] { enumerate_degenerations(o); }), ErrorKind::SearchBudgetExceeded);
  o = {};
  o.total_index = 3;
  EXPECT_EQ(kind_of([&] { enumerate_degenerations(o); }), ErrorKind::InvalidInput);
}
