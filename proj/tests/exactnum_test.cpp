#include "orbidiff/exactnum.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace orbidiff;

namespace {

// Independent route to Phi_N: prod_{d | N} (t^d - 1)^{mu(N/d)}, evaluated as a
// quotient of two integer products.
int mobius(std::uint64_t n) {
  int mu = 1;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  return n > 1 ? -mu : mu;
}

IntPoly mobius_cyclotomic(std::uint64_t n) {
  IntPoly num{1}, den{1};
  for (std::uint64_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    IntPoly f(d + 1, 0);
    f[0] = -1;
    f[d] = 1;
    const int mu = mobius(n / d);
    if (mu == 1) num = detail::mul(num, f);
    if (mu == -1) den = detail::mul(den, f);
  }
  // den is monic up to sign
  if (den.back() < 0) {
    for (auto& c : den) c = -c;
    for (auto& c : num) c = -c;
  }
  return detail::divide_exact(num, den);
}

Cyclotomic random_element(std::mt19937_64& rng, std::uint64_t n) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
  const std::size_t deg = cyclotomic_polynomial(n).size() - 1;
  std::vector<Rational> c(deg);
  for (auto& x : c) x = make_rational(num(rng), den(rng));
  return Cyclotomic::from_coords(n, c);
}

}  // namespace

TEST(CyclotomicPolynomial, BaseCases) {
  EXPECT_EQ(cyclotomic_polynomial(1), (IntPoly{-1, 1}));
  EXPECT_EQ(cyclotomic_polynomial(2), (IntPoly{1, 1}));
}

TEST(CyclotomicPolynomial, Twelve) {
  // frozen from the Mobius product route
  const IntPoly expected{1, 0, -1, 0, 1};
  EXPECT_EQ(mobius_cyclotomic(12), expected);
  EXPECT_EQ(cyclotomic_polynomial(12), expected);
}

TEST(CyclotomicPolynomial, AgreesWithMobiusProduct) {
  for (std::uint64_t n = 1; n <= 60; ++n) EXPECT_EQ(cyclotomic_polynomial(n), mobius_cyclotomic(n)) << n;
}

TEST(CyclotomicPolynomial, RejectsZero) { EXPECT_THROW(cyclotomic_polynomial(0), std::invalid_argument); }

TEST(RootOfUnity, Examples) {
  EXPECT_EQ(root_of_unity(0, 7), Cyclotomic(1));
  const Cyclotomic m1 = root_of_unity(3, 6);
  EXPECT_EQ(m1, Cyclotomic(-1));
  EXPECT_EQ(m1 * m1, Cyclotomic(1));
  EXPECT_EQ(root_of_unity(1, 6).pow(3), m1);
  const Cyclotomic i = root_of_unity(1, 4);
  EXPECT_EQ(i.coords()[1], 1);
  EXPECT_EQ(i * i, Cyclotomic(-1));
}

TEST(RootOfUnity, NthPowerIsOne) {
  for (std::uint64_t n = 1; n <= 24; ++n)
    for (std::int64_t k = 1; k <= static_cast<std::int64_t>(n); ++k)
      EXPECT_EQ(root_of_unity(k, n).pow(static_cast<std::int64_t>(n)), Cyclotomic(1)) << k << "/" << n;
}

TEST(RootOfUnity, OrderIsNOverGcd) {
  for (std::uint64_t n = 1; n <= 18; ++n)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(n); ++k) {
      const Cyclotomic z = root_of_unity(k, n);
      const std::uint64_t expected = n / std::gcd(static_cast<std::uint64_t>(k), n);
      std::uint64_t order = 1;
      while (!(z.pow(static_cast<std::int64_t>(order)) == Cyclotomic(1))) ++order;
      EXPECT_EQ(order, expected);
    }
}

TEST(Embed, Examples) {
  const Cyclotomic one3 = Cyclotomic(1).embed(3);
  EXPECT_EQ(one3.conductor(), 3U);
  EXPECT_EQ(one3, Cyclotomic(1));
  const Cyclotomic m = Cyclotomic(Rational(-1), 2).embed(6);
  EXPECT_EQ(m.coords().size(), 2U);
  EXPECT_EQ(m, root_of_unity(3, 6));
  EXPECT_EQ(root_of_unity(1, 3).embed(6), root_of_unity(2, 6));
  EXPECT_THROW(root_of_unity(1, 4).embed(6), std::invalid_argument);
}

TEST(Cyclotomic, FieldAxioms) {
  std::mt19937_64 rng(7);
  for (std::uint64_t n : {3, 4, 5, 7, 8, 9, 12, 15}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto a = random_element(rng, n), b = random_element(rng, n), c = random_element(rng, n);
      EXPECT_EQ((a * b) * c, a * (b * c));
      EXPECT_EQ(a * (b + c), a * b + a * c);
      EXPECT_EQ(a + b, b + a);
      EXPECT_EQ(a * b, b * a);
      if (!a.is_zero()) {
        EXPECT_EQ(a * a.inverse(), Cyclotomic(1));
      }
    }
  }
}

TEST(Cyclotomic, EmbedIsRingHomomorphism) {
  std::mt19937_64 rng(11);
  for (auto [n, m] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{3, 6}, {4, 12}, {5, 15}, {6, 24}, {2, 10}}) {
    for (int rep = 0; rep < 20; ++rep) {
      const auto x = random_element(rng, n), y = random_element(rng, n);
      EXPECT_EQ((x * y).embed(m), x.embed(m) * y.embed(m));
      EXPECT_EQ((x + y).embed(m), x.embed(m) + y.embed(m));
      if (!(x == y)) {
        const auto ex = x.embed(m), ey = y.embed(m);
        EXPECT_FALSE(std::ranges::equal(ex.coords(), ey.coords()));
      }
    }
  }
}

TEST(Cyclotomic, MixedConductorsLiftToLcm) {
  const Cyclotomic w = root_of_unity(1, 3) * root_of_unity(1, 4);
  EXPECT_EQ(w.conductor(), 12U);
  EXPECT_EQ(w, root_of_unity(7, 12));
}

TEST(Cyclotomic, RootOfUnityDetection) {
  EXPECT_TRUE(root_of_unity(2, 5).is_root_of_unity());
  EXPECT_TRUE((-root_of_unity(1, 3)).is_root_of_unity());
  EXPECT_FALSE(Cyclotomic(2).is_root_of_unity());
  EXPECT_FALSE((Cyclotomic(1) + root_of_unity(1, 5)).is_root_of_unity());
  EXPECT_FALSE(Cyclotomic(0).is_root_of_unity());
}

TEST(Cyclotomic, InverseOfZeroThrows) { EXPECT_THROW(Cyclotomic(0).inverse(), std::domain_error); }

TEST(Rational, FracAndRootOfUnity) {
  EXPECT_EQ(frac(make_rational(7, 3)), make_rational(1, 3));
  EXPECT_EQ(frac(make_rational(-1, 3)), make_rational(2, 3));
  EXPECT_EQ(root_of_unity(make_rational(1, 2)), Cyclotomic(-1));
  EXPECT_EQ(root_of_unity(make_rational(-1, 3)), root_of_unity(2, 3));
}

TEST(Cyclotomic, MinimalConductor) {
  EXPECT_EQ(minimal_conductor(root_of_unity(2, 4)), 1u);
  EXPECT_EQ(minimal_conductor(root_of_unity(2, 6)), 3u);
  EXPECT_EQ(minimal_conductor(root_of_unity(3, 12)), 4u);
  EXPECT_EQ(minimal_conductor(root_of_unity(1, 12)), 12u);
  EXPECT_EQ(minimal_conductor(root_of_unity(1, 3) + root_of_unity(1, 4) - root_of_unity(1, 4)), 3u);
  // sqrt(2) = zeta_8 + zeta_8^7
  EXPECT_EQ(minimal_conductor(root_of_unity(1, 8) + root_of_unity(7, 8)), 8u);
}

TEST(Cyclotomic, ExpressAtSubfield) {
  const Cyclotomic x = root_of_unity(4, 12) + make_rational(1, 2);
  const Cyclotomic y = express_at(x, 3);
  EXPECT_EQ(y.conductor(), 3u);
  EXPECT_EQ(y, x);
  EXPECT_EQ(express_at(root_of_unity(1, 3), 6).conductor(), 6u);
  EXPECT_THROW(express_at(root_of_unity(1, 4), 3), std::invalid_argument);
}
