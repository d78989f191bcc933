// Orbifold charts (X, Delta) in the snc local model and diagonal monomial morphisms.
#pragma once

#include <cstdint>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbidiff/exactnum.hpp"
#include "orbidiff/poly.hpp"

namespace orbidiff {

/// Multiplicity of a coordinate hyperplane: no boundary, (m-1)/m with m >= 2, or a reduced log component.
class Multiplicity {
 public:
  enum class Kind { Trivial, Finite, Infinite };

  static Multiplicity trivial() { return Multiplicity(Kind::Trivial, 1); }
  static Multiplicity infinite() { return Multiplicity(Kind::Infinite, 0); }
  static Multiplicity finite(std::uint64_t m) {
    if (m < 2) throw std::invalid_argument("multiplicity must be at least 2");
    return Multiplicity(Kind::Finite, m);
  }

  Kind kind() const { return kind_; }
  bool is_trivial() const { return kind_ == Kind::Trivial; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_infinite() const { return kind_ == Kind::Infinite; }
  /// Meaningful for Finite only.
  std::uint64_t value() const { return m_; }

  /// (m-1)/m with the conventions 0 for Trivial and 1 for Infinite.
  Rational coefficient() const {
    switch (kind_) {
      case Kind::Trivial:
        return 0;
      case Kind::Infinite:
        return 1;
      case Kind::Finite:
        break;
    }
    return make_rational(Integer(m_ - 1), Integer(m_));
  }

  friend bool operator==(const Multiplicity&, const Multiplicity&) = default;

 private:
  Multiplicity(Kind k, std::uint64_t m) : kind_(k), m_(m) {}
  Kind kind_;
  std::uint64_t m_;
};

struct OrbifoldChart {
  std::string name;
  std::vector<std::string> coords;
  std::vector<Multiplicity> mults;

  OrbifoldChart() = default;
  OrbifoldChart(std::string n, std::vector<std::string> c)
      : OrbifoldChart(std::move(n), c, std::vector<Multiplicity>(c.size(), Multiplicity::trivial())) {}
  OrbifoldChart(std::string n, std::vector<std::string> c, std::vector<Multiplicity> m)
      : name(std::move(n)), coords(std::move(c)), mults(std::move(m)) {
    if (coords.empty()) throw std::invalid_argument("chart " + name + ": dimension must be positive");
    if (mults.size() != coords.size()) throw std::invalid_argument("chart " + name + ": multiplicity count");
    if (std::set<std::string>(coords.begin(), coords.end()).size() != coords.size())
      throw std::invalid_argument("chart " + name + ": coordinate names must be distinct");
  }

  std::size_t dim() const { return coords.size(); }
  bool has_boundary() const {
    for (const auto& m : mults)
      if (!m.is_trivial()) return true;
    return false;
  }
  std::size_t index_of(const std::string& var) const {
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (coords[i] == var) return i;
    throw std::out_of_range("chart " + name + " has no coordinate " + var);
  }

  friend bool operator==(const OrbifoldChart&, const OrbifoldChart&) = default;
};

/// Target coordinate i is scalars[i] * (source coordinate i)^exps[i].
struct DiagonalMap {
  OrbifoldChart source;
  OrbifoldChart target;
  std::vector<Cyclotomic> scalars;
  std::vector<Exponent> exps;

  DiagonalMap() = default;
  DiagonalMap(OrbifoldChart src, OrbifoldChart tgt, std::vector<Cyclotomic> s, std::vector<Exponent> a)
      : source(std::move(src)), target(std::move(tgt)), scalars(std::move(s)), exps(std::move(a)) {
    const std::size_t n = source.dim();
    if (target.dim() != n) throw std::invalid_argument("map " + source.name + " -> " + target.name + ": dimension mismatch");
    if (scalars.size() != n || exps.size() != n) throw std::invalid_argument("map: data length mismatch");
    for (auto e : exps)
      if (e == 0) throw std::invalid_argument("exponent must be positive");
    for (const auto& s : scalars)
      if (!s.is_root_of_unity()) throw std::invalid_argument("map scalar must be a root of unity");
  }
  DiagonalMap(OrbifoldChart src, OrbifoldChart tgt, std::vector<Exponent> a)
      : DiagonalMap(std::move(src), std::move(tgt), std::vector<Cyclotomic>(a.size(), Cyclotomic(1)), a) {}

  static DiagonalMap identity(const OrbifoldChart& chart) {
    return DiagonalMap(chart, chart, std::vector<Exponent>(chart.dim(), 1));
  }

  std::size_t dim() const { return exps.size(); }
  bool is_scalar_free() const {
    for (const auto& s : scalars)
      if (!(s == Cyclotomic(1))) return false;
    return true;
  }

  /// Pull a polynomial in the target coordinates back to the source coordinates.
  SparsePoly pullback(const SparsePoly& p) const { return p.substitute_monomial(scalars, exps); }

  friend bool operator==(const DiagonalMap&, const DiagonalMap&) = default;
};

/// g after f: source(f) -> target(g).
inline DiagonalMap compose(const DiagonalMap& f, const DiagonalMap& g) {
  if (!(f.target == g.source))
    throw std::invalid_argument("compose: target " + f.target.name + " does not match source " + g.source.name);
  const std::size_t n = f.dim();
  std::vector<Cyclotomic> s(n);
  std::vector<Exponent> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = g.scalars[i] * f.scalars[i].pow(static_cast<std::int64_t>(g.exps[i]));
    a[i] = detail::checked_mul(f.exps[i], g.exps[i]);
  }
  return DiagonalMap(f.source, g.target, std::move(s), std::move(a));
}

/// Coefficient of {w_i = 0} in gamma^* Delta.
inline std::vector<Rational> pullback_divisor(const DiagonalMap& g, const OrbifoldChart& x) {
  if (x.dim() != g.dim()) throw std::invalid_argument("pullback_divisor: dimension mismatch");
  std::vector<Rational> out;
  out.reserve(g.dim());
  for (std::size_t i = 0; i < g.dim(); ++i) out.push_back(Rational(Integer(g.exps[i])) * x.mults[i].coefficient());
  return out;
}
inline std::vector<Rational> pullback_divisor(const DiagonalMap& g) { return pullback_divisor(g, g.target); }

inline bool is_adapted(const DiagonalMap& g, const OrbifoldChart& x) {
  for (const auto& c : pullback_divisor(g, x))
    if (!is_integer(c)) return false;
  return true;
}
inline bool is_adapted(const DiagonalMap& g) { return is_adapted(g, g.target); }

/// One component of the normalized fiber product: W with projections to both factors.
struct FiberComponent {
  OrbifoldChart chart;
  DiagonalMap to_first;
  DiagonalMap to_second;
  std::vector<std::uint64_t> index;  // j in prod Z/gcd(a_i, b_i)
};

/// Normalized components of Y x_X Z for scalar-free diagonal maps f: Y -> X and g: Z -> X.
///
/// Per coordinate with exponents a, b and d = gcd(a, b), y^a = z^b splits into
/// y^(a/d) = zeta_d^j z^(b/d) for j in Z/d. Each factor is normalized by
/// y = zeta_a^j w^(b/d), z = w^(a/d); zeta_a^j is the smallest root whose
/// (a/d)-th power is zeta_d^j.
inline std::vector<FiberComponent> normalize_fiber_product(const DiagonalMap& f, const DiagonalMap& g) {
  if (!f.is_scalar_free() || !g.is_scalar_free())
    throw std::invalid_argument("normalize_fiber_product: maps must be scalar-free");
  if (!(f.target == g.target)) throw std::invalid_argument("normalize_fiber_product: targets differ");
  const std::size_t n = f.dim();
  std::vector<std::uint64_t> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = std::gcd(f.exps[i], g.exps[i]);

  std::vector<FiberComponent> out;
  std::vector<std::uint64_t> j(n, 0);
  while (true) {
    std::string name = f.source.name + "x" + g.source.name + "#";
    for (std::size_t i = 0; i < n; ++i) name += (i ? "." : "") + std::to_string(j[i]);
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < n; ++i) vars.push_back("w" + std::to_string(i + 1));
    OrbifoldChart w(name, vars);
    std::vector<Cyclotomic> ys(n);
    std::vector<Exponent> ya(n), za(n);
    for (std::size_t i = 0; i < n; ++i) {
      ys[i] = root_of_unity(static_cast<std::int64_t>(j[i]), f.exps[i]);
      ya[i] = g.exps[i] / d[i];
      za[i] = f.exps[i] / d[i];
    }
    out.push_back(FiberComponent{w, DiagonalMap(w, f.source, std::move(ys), ya), DiagonalMap(w, g.source, za), j});
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++j[k] < d[k]) break;
      j[k] = 0;
      if (k == 0) return out;
    }
    if (n == 0) return out;
  }
}

}  // namespace orbidiff
