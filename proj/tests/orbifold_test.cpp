#include "orbidiff/galois.hpp"
#include "orbidiff/orbifold.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace orbidiff;

namespace {

OrbifoldChart line(const std::string& name, const std::string& var, Multiplicity m = Multiplicity::trivial()) {
  return OrbifoldChart(name, {var}, {m});
}

OrbifoldChart plane(const std::string& name, Multiplicity m1 = Multiplicity::trivial(),
                    Multiplicity m2 = Multiplicity::trivial()) {
  return OrbifoldChart(name, {name + "1", name + "2"}, {m1, m2});
}

// Oracle for the fiber product: points over x = 1 are pairs (zeta_a^s, zeta_b^t);
// the loop around x = 0 moves (s, t) to (s + 1, t + 1), and its orbits are the
// irreducible components.
std::size_t monodromy_orbits(Exponent a, Exponent b) {
  std::vector<bool> seen(a * b, false);
  std::size_t orbits = 0;
  for (Exponent s0 = 0; s0 < a; ++s0)
    for (Exponent t0 = 0; t0 < b; ++t0) {
      if (seen[s0 * b + t0]) continue;
      ++orbits;
      for (Exponent s = s0, t = t0; !seen[s * b + t]; s = (s + 1) % a, t = (t + 1) % b) seen[s * b + t] = true;
    }
  return orbits;
}

}  // namespace

TEST(Orbifold, MultiplicityCoefficients) {
  EXPECT_EQ(Multiplicity::trivial().coefficient(), 0);
  EXPECT_EQ(Multiplicity::infinite().coefficient(), 1);
  EXPECT_EQ(Multiplicity::finite(3).coefficient(), make_rational(2, 3));
  EXPECT_THROW(Multiplicity::finite(1), std::invalid_argument);
  EXPECT_THROW(Multiplicity::finite(0), std::invalid_argument);
}

TEST(Orbifold, ChartValidation) {
  EXPECT_THROW(OrbifoldChart("X", {}), std::invalid_argument);
  EXPECT_THROW(OrbifoldChart("X", {"x", "x"}), std::invalid_argument);
  EXPECT_EQ(OrbifoldChart("X", {"x", "y"}).index_of("y"), 1u);
  EXPECT_THROW(OrbifoldChart("X", {"x"}).index_of("q"), std::out_of_range);
}

TEST(Orbifold, MapValidation) {
  const auto x = line("X", "x"), y = line("Y", "y");
  EXPECT_THROW(DiagonalMap(y, x, {0}), std::invalid_argument);
  EXPECT_THROW(DiagonalMap(y, x, {Cyclotomic(2)}, {1}), std::invalid_argument);
  EXPECT_THROW(DiagonalMap(y, plane("P"), {1, 1}), std::invalid_argument);
  EXPECT_NO_THROW(DiagonalMap(y, x, {root_of_unity(1, 5)}, {2}));
}

TEST(Orbifold, AdaptednessTwoThirds) {
  const auto x = line("X", "x", Multiplicity::finite(3)), y = line("Y", "y");
  for (Exponent m = 1; m <= 30; ++m) EXPECT_EQ(is_adapted(DiagonalMap(y, x, {m})), m % 3 == 0) << m;
}

TEST(Orbifold, AdaptednessConventions) {
  const auto y = line("Y", "y");
  EXPECT_TRUE(is_adapted(DiagonalMap(y, line("X", "x", Multiplicity::infinite()), {2})));
  EXPECT_TRUE(is_adapted(DiagonalMap(y, line("X", "x"), {1})));
  const auto x = plane("X", Multiplicity::finite(2), Multiplicity::finite(3));
  EXPECT_TRUE(is_adapted(DiagonalMap(plane("Y"), x, {2, 3})));
  EXPECT_FALSE(is_adapted(DiagonalMap(plane("Y"), x, {2, 2})));
  const auto div = pullback_divisor(DiagonalMap(plane("Y"), x, {4, 2}));
  EXPECT_EQ(div[0], 2);
  EXPECT_EQ(div[1], make_rational(4, 3));
}

TEST(Orbifold, ComposeExample) {
  // Z -> Y: y = z^2; Y -> X: x = zeta_3 y^3
  const auto x = line("X", "x"), y = line("Y", "y"), z = line("Z", "z");
  const DiagonalMap f(z, y, {-1}, {2});
  const DiagonalMap g(y, x, {root_of_unity(1, 3)}, {3});
  const DiagonalMap h = compose(f, g);
  EXPECT_EQ(h.exps, std::vector<Exponent>{6});
  // x = zeta_3 (-z^2)^3 = -zeta_3 z^6
  EXPECT_EQ(h.scalars[0], -root_of_unity(1, 3));
  EXPECT_THROW(compose(g, f), std::invalid_argument);
}

TEST(Orbifold, ComposeAssociativeAndUnital) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> ex(1, 6), k(0, 11);
  for (int it = 0; it < 100; ++it) {
    const std::size_t n = 1 + it % 3;
    std::vector<OrbifoldChart> c;
    for (const char* name : {"A", "B", "C", "D"}) {
      std::vector<std::string> vars;
      for (std::size_t i = 0; i < n; ++i) vars.push_back(std::string(1, static_cast<char>(name[0] + 32)) + std::to_string(i));
      c.emplace_back(name, vars);
    }
    auto rnd = [&](std::size_t s, std::size_t t) {
      std::vector<Cyclotomic> sc;
      std::vector<Exponent> a;
      for (std::size_t i = 0; i < n; ++i) {
        sc.push_back(root_of_unity(k(rng), 12));
        a.push_back(ex(rng));
      }
      return DiagonalMap(c[s], c[t], sc, a);
    };
    const auto f = rnd(0, 1), g = rnd(1, 2), h = rnd(2, 3);
    EXPECT_EQ(compose(compose(f, g), h), compose(f, compose(g, h)));
    EXPECT_EQ(compose(DiagonalMap::identity(c[0]), f), f);
    EXPECT_EQ(compose(f, DiagonalMap::identity(c[1])), f);
  }
}

TEST(Orbifold, AdaptednessStableUnderPrecomposition) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> ex(1, 12), m(2, 4);
  for (int it = 0; it < 200; ++it) {
    const auto x = line("X", "x", Multiplicity::finite(m(rng)));
    const DiagonalMap g(line("Y", "y"), x, {static_cast<Exponent>(ex(rng))});
    const DiagonalMap f(line("Z", "z"), line("Y", "y"), {static_cast<Exponent>(ex(rng))});
    if (is_adapted(g)) {
      EXPECT_TRUE(is_adapted(compose(f, g)));
    }
  }
}

TEST(Orbifold, FiberProductThreeThree) {
  const auto x = line("X", "x");
  const DiagonalMap f(line("Y", "y"), x, {3}), g(line("Z", "z"), x, {3});
  const auto comps = normalize_fiber_product(f, g);
  ASSERT_EQ(comps.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(comps[j].to_first.scalars[0], root_of_unity(static_cast<std::int64_t>(j), 3));
    EXPECT_EQ(comps[j].to_first.exps[0], 1u);
    EXPECT_EQ(comps[j].to_second.exps[0], 1u);
    EXPECT_EQ(compose(comps[j].to_first, f), compose(comps[j].to_second, g));
  }
  EXPECT_EQ(comps[1].chart.name, "YxZ#1");
}

TEST(Orbifold, FiberProductWithIsomorphismLeg) {
  const auto x = line("X", "x");
  const DiagonalMap f(line("Y", "y"), x, {1}), g(line("Z", "z"), x, {5});
  const auto comps = normalize_fiber_product(f, g);
  ASSERT_EQ(comps.size(), 1u);
  EXPECT_EQ(comps[0].to_second.exps[0], 1u);  // W = Z
  EXPECT_EQ(comps[0].to_first.exps[0], 5u);
}

TEST(Orbifold, FiberProductFourSix) {
  const auto x = line("X", "x");
  const DiagonalMap f(line("Y", "y"), x, {4}), g(line("Z", "z"), x, {6});
  const auto comps = normalize_fiber_product(f, g);
  ASSERT_EQ(comps.size(), 2u);
  for (const auto& c : comps) {
    EXPECT_EQ(c.to_first.exps[0], 3u);
    EXPECT_EQ(c.to_second.exps[0], 2u);
    EXPECT_EQ(compose(c.to_first, f), compose(c.to_second, g));
  }
  // the branches y^2 = z^3 and y^2 = -z^3
  const Cyclotomic u0 = comps[0].to_first.scalars[0], u1 = comps[1].to_first.scalars[0];
  EXPECT_EQ(u0.pow(2), Cyclotomic(1));
  EXPECT_EQ(u1.pow(2), Cyclotomic(-1));
}

TEST(Orbifold, FiberProductCountsMatchMonodromy) {
  const auto x = line("X", "x");
  for (Exponent a = 1; a <= 8; ++a)
    for (Exponent b = 1; b <= 8; ++b) {
      const DiagonalMap f(line("Y", "y"), x, {a}), g(line("Z", "z"), x, {b});
      EXPECT_EQ(normalize_fiber_product(f, g).size(), monodromy_orbits(a, b)) << a << "," << b;
    }
}

TEST(Orbifold, FiberProductTwoVariables) {
  const auto x = plane("X");
  const DiagonalMap f(plane("Y"), x, {2, 6}), g(plane("Z"), x, {4, 9});
  const auto comps = normalize_fiber_product(f, g);
  EXPECT_EQ(comps.size(), 2u * 3u);
  for (const auto& c : comps) EXPECT_EQ(compose(c.to_first, f), compose(c.to_second, g));
  const auto a = galois_data(f);
  EXPECT_TRUE(acts_transitively(comps, a));
}

TEST(Orbifold, FiberProductRejectsScalars) {
  const auto x = line("X", "x");
  const DiagonalMap f(line("Y", "y"), x, {-1}, {2}), g(line("Z", "z"), x, {2});
  EXPECT_THROW(normalize_fiber_product(f, g), std::invalid_argument);
  EXPECT_THROW(normalize_fiber_product(g, DiagonalMap(line("Z", "z"), line("W", "x"), {2})), std::invalid_argument);
}

TEST(Orbifold, LiftedActionShiftsComponents) {
  const auto x = line("X", "x");
  const DiagonalMap f(line("Y", "y"), x, {6}), g(line("Z", "z"), x, {4});
  const auto comps = normalize_fiber_product(f, g);
  ASSERT_EQ(comps.size(), 2u);
  const auto a = galois_data(f);
  const auto k = lifted_action(comps, a, GroupElement{{1}}, 0);
  ASSERT_TRUE(k.has_value());
  EXPECT_EQ(*k, 1u);
  EXPECT_EQ(*lifted_action(comps, a, GroupElement{{2}}, 0), 0u);
  EXPECT_TRUE(acts_transitively(comps, a));
}
