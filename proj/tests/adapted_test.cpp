#include "orbidiff/adapted.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace orbidiff;

namespace {

OrbifoldChart line(const std::string& name, const std::string& var, Multiplicity m = Multiplicity::trivial()) {
  return OrbifoldChart(name, {var}, {m});
}

LogPForm mono(const OrbifoldChart& c, const IndexSet& idx, ExponentVector e, const Cyclotomic& k = 1) {
  return LogPForm::monomial(c, idx, std::move(e), k);
}

// Monomial forms y^e e_I sorted by (I, e), the order kernel_oracle returns.
std::vector<LogPForm> accepted(const AdaptedModule& m, Exponent bound) { return monomial_sections(m, bound); }

}  // namespace

TEST(Adapted, IndexSets) {
  EXPECT_EQ(index_sets(3, 2), (std::vector<IndexSet>{{0, 1}, {0, 2}, {1, 2}}));
  EXPECT_EQ(index_sets(2, 0), (std::vector<IndexSet>{{}}));
  EXPECT_TRUE(index_sets(1, 2).empty());
}

TEST(Adapted, GeneratorFiniteMultiplicity) {
  // (m-1)/m with a = m k: y^k dlog y = y^(k-1) dy
  for (Exponent m = 2; m <= 5; ++m)
    for (Exponent k = 1; k <= 4; ++k) {
      const AdaptedModule mod(DiagonalMap(line("Y", "y"), line("X", "x", Multiplicity::finite(m)), {m * k}), 1);
      const auto gens = adapted_generators(mod);
      ASSERT_EQ(gens.size(), 1u);
      EXPECT_EQ(gens[0], mono(mod.chart(), {0}, {k}));
    }
}

TEST(Adapted, GeneratorDegreeZero) {
  const AdaptedModule mod(DiagonalMap(line("Y", "y"), line("X", "x", Multiplicity::finite(3)), {3}), 0);
  const auto gens = adapted_generators(mod);
  ASSERT_EQ(gens.size(), 1u);
  EXPECT_EQ(gens[0], LogPForm::function(mod.chart(), SparsePoly::constant(1, 1)));
}

TEST(Adapted, GeneratorMixedTwoForms) {
  const OrbifoldChart x("X", {"x1", "x2"}, {Multiplicity::finite(2), Multiplicity::infinite()});
  const OrbifoldChart y("Y", {"y1", "y2"});
  const AdaptedModule mod(DiagonalMap(y, x, {4, 5}), 2);
  EXPECT_EQ(mod.depths(), (ExponentVector{2, 0}));
  const auto gens = adapted_generators(mod);
  ASSERT_EQ(gens.size(), 1u);
  EXPECT_EQ(gens[0], mono(y, {0, 1}, {2, 0}));
  // every kernel-oracle element is a multiple of the generator
  for (const auto& f : kernel_oracle(mod, 4)) EXPECT_TRUE(is_section(f, mod));
}

TEST(Adapted, OneFormDepthsMatchClassicalGenerators) {
  // p = 1: y^(k-1) dy, dy/y, y^(a-1) dy in the dlog basis
  const AdaptedModule fin(DiagonalMap(line("Y", "y"), line("X", "x", Multiplicity::finite(2)), {6}), 1);
  const AdaptedModule inf(DiagonalMap(line("Y", "y"), line("X", "x", Multiplicity::infinite()), {6}), 1);
  const AdaptedModule triv(DiagonalMap(line("Y", "y"), line("X", "x"), {6}), 1);
  EXPECT_EQ(fin.depths()[0], 3u);
  EXPECT_EQ(inf.depths()[0], 0u);
  EXPECT_EQ(triv.depths()[0], 6u);
}

TEST(Adapted, NonAdaptedModuleRejected) {
  EXPECT_THROW(AdaptedModule(DiagonalMap(line("Y", "y"), line("X", "x", Multiplicity::finite(3)), {2}), 1),
               std::invalid_argument);
}

TEST(Adapted, MembershipTwoThirds) {
  const auto y = line("Y", "y");
  const AdaptedModule mod(DiagonalMap(y, line("X", "x", Multiplicity::finite(3)), {3}), 1);
  EXPECT_FALSE(is_section(mono(y, {0}, {0}), mod));  // dy/y
  EXPECT_TRUE(is_section(mono(y, {0}, {1}), mod));   // dy
  // (1 + y) dy = (y + y^2) dlog y
  EXPECT_TRUE(is_section(mono(y, {0}, {1}) + mono(y, {0}, {2}), mod));
  for (const auto& g : adapted_generators(mod)) EXPECT_TRUE(is_section(g, mod));
  EXPECT_THROW(is_section(LogPForm::function(y, SparsePoly::constant(1, 1)), mod), std::invalid_argument);
  EXPECT_THROW(is_section(mono(line("Q", "q"), {0}, {1}), mod), std::invalid_argument);
}

TEST(Adapted, KernelOracleExamples) {
  const auto y = line("Y", "y");
  const AdaptedModule ex(DiagonalMap(y, line("X", "x", Multiplicity::finite(3)), {3}), 1);
  EXPECT_EQ(kernel_oracle(ex, 3), (std::vector<LogPForm>{mono(y, {0}, {1}), mono(y, {0}, {2}), mono(y, {0}, {3})}));
  const AdaptedModule inf(DiagonalMap(y, line("X", "x", Multiplicity::infinite()), {2}), 1);
  EXPECT_EQ(kernel_oracle(inf, 2), (std::vector<LogPForm>{mono(y, {0}, {0}), mono(y, {0}, {1}), mono(y, {0}, {2})}));
  // no boundary: multiples of y^a e
  const AdaptedModule triv(DiagonalMap(y, line("X", "x"), {2}), 1);
  EXPECT_EQ(kernel_oracle(triv, 3), (std::vector<LogPForm>{mono(y, {0}, {2}), mono(y, {0}, {3})}));
}

TEST(Adapted, KernelOracleAgreesWithMembership) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> kind(0, 4), n_d(1, 3), k_d(1, 3);
  for (int it = 0; it < 60; ++it) {
    const std::size_t n = n_d(rng);
    std::vector<std::string> xs, ys;
    std::vector<Multiplicity> mults;
    std::vector<Exponent> a;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back("x" + std::to_string(i));
      ys.push_back("y" + std::to_string(i));
      const int kd = kind(rng);
      const Multiplicity m = kd == 0 ? Multiplicity::trivial() : kd == 4 ? Multiplicity::infinite() : Multiplicity::finite(kd + 1);
      mults.push_back(m);
      a.push_back(m.is_finite() ? m.value() * k_d(rng) : k_d(rng));
    }
    const DiagonalMap g(OrbifoldChart("Y", ys), OrbifoldChart("X", xs, mults), a);
    const std::size_t p = std::uniform_int_distribution<std::size_t>(0, n)(rng);
    const AdaptedModule mod(g, p);
    EXPECT_EQ(kernel_oracle(mod, 5), accepted(mod, 5));
  }
}

TEST(Adapted, WedgeSigns) {
  const OrbifoldChart y("Y", {"y1", "y2", "y3"});
  const auto e1 = mono(y, {0}, {0, 0, 0}), e2 = mono(y, {1}, {0, 0, 0});
  EXPECT_EQ(wedge(e1, e2), mono(y, {0, 1}, {0, 0, 0}));
  EXPECT_EQ(wedge(e2, e1), mono(y, {0, 1}, {0, 0, 0}, -1));
  EXPECT_TRUE(wedge(e1, e1).is_zero());
  EXPECT_EQ(wedge(e1, e1).degree(), 2u);
  EXPECT_EQ(wedge(mono(y, {0}, {1, 0, 0}), mono(y, {1}, {0, 1, 0})), mono(y, {0, 1}, {1, 1, 0}));
  // e3 ^ e1 ^ e2 = e1 e2 e3 (cyclic, even)
  const auto e3 = mono(y, {2}, {0, 0, 0});
  EXPECT_EQ(wedge(wedge(e3, e1), e2), mono(y, {0, 1, 2}, {0, 0, 0}));
  EXPECT_EQ(wedge(e2, wedge(e1, e3)), mono(y, {0, 1, 2}, {0, 0, 0}, -1));
}

TEST(Adapted, OddFormSquaresVanish) {
  std::mt19937_64 rng(23);
  const OrbifoldChart y("Y", {"y1", "y2", "y3"});
  std::uniform_int_distribution<int> c(-3, 3), e(0, 2);
  for (int it = 0; it < 20; ++it) {
    LogPForm a(y, 1);
    for (std::size_t i = 0; i < 3; ++i)
      a += mono(y, {i}, {static_cast<Exponent>(e(rng)), static_cast<Exponent>(e(rng)), 0}, c(rng));
    EXPECT_TRUE(wedge(a, a).is_zero());
  }
}

TEST(Adapted, PullbackExamples) {
  const auto y = line("Y", "y"), z = line("Z", "z");
  // identity
  const auto w = mono(y, {0}, {2}, 5);
  EXPECT_EQ(pullback_form(DiagonalMap::identity(y), w), w);
  // y^(k-1) dy = y^k dlog y under y = z^c gives c z^(ck) dlog z
  const Exponent k = 2, c = 3;
  EXPECT_EQ(pullback_form(DiagonalMap(z, y, {c}), mono(y, {0}, {k})), mono(z, {0}, {c * k}, 3));
  // scalars enter only through the coefficients
  EXPECT_EQ(pullback_form(DiagonalMap(z, y, {root_of_unity(1, 4)}, {1}), mono(y, {0}, {1})),
            mono(z, {0}, {1}, root_of_unity(1, 4)));
  EXPECT_THROW(pullback_form(DiagonalMap(z, y, {1}), mono(z, {0}, {1})), std::invalid_argument);
}

TEST(Adapted, RootStackFactorization) {
  // x = y^(k m) through z = y^k: the pullback of dz = z dlog z generates the module
  for (Exponent m = 2; m <= 4; ++m)
    for (Exponent k = 1; k <= 4; ++k) {
      const auto x = line("X", "x", Multiplicity::finite(m));
      const auto u = line("U", "z"), y = line("Y", "y");
      const AdaptedModule mod(DiagonalMap(y, x, {k * m}), 1);
      const auto pulled = pullback_form(DiagonalMap(y, u, {k}), mono(u, {0}, {1}));
      EXPECT_EQ(pulled, mono(y, {0}, {k}, Cyclotomic(static_cast<long>(k))));
      EXPECT_EQ(pulled, Cyclotomic(static_cast<long>(k)) * adapted_generators(mod)[0]);
    }
}

TEST(Adapted, PullbackFunctorialAndWedgeCompatible) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> ex(1, 4), c(-2, 2), k(0, 5), e(0, 3);
  const OrbifoldChart x("X", {"x1", "x2"}), y("Y", {"y1", "y2"}), z("Z", {"z1", "z2"});
  for (int it = 0; it < 40; ++it) {
    auto rmap = [&](const OrbifoldChart& s, const OrbifoldChart& t) {
      return DiagonalMap(s, t, {root_of_unity(k(rng), 6), root_of_unity(k(rng), 6)},
                         {static_cast<Exponent>(ex(rng)), static_cast<Exponent>(ex(rng))});
    };
    const DiagonalMap f = rmap(y, x), g = rmap(z, y);
    auto rform = [&](std::size_t p) {
      LogPForm w(x, p);
      for (const auto& idx : index_sets(2, p))
        w += mono(x, idx, {static_cast<Exponent>(e(rng)), static_cast<Exponent>(e(rng))}, c(rng));
      return w;
    };
    const auto a = rform(1), b = rform(1);
    EXPECT_EQ(pullback_form(g, pullback_form(f, a)), pullback_form(compose(g, f), a));
    EXPECT_EQ(pullback_form(f, wedge(a, b)), wedge(pullback_form(f, a), pullback_form(f, b)));
    if (!a.is_zero()) {
      EXPECT_FALSE(pullback_form(f, a).is_zero());
    }
  }
}
