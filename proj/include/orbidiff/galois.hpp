// Diagonal finite abelian group actions, invariants and Galois descent.
#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbidiff/adapted.hpp"
#include "orbidiff/orbifold.hpp"

namespace orbidiff {

/// A product of cyclic groups acting on a chart; generator g scales y_i by exp(2 pi i q_i).
class DiagonalAction {
 public:
  DiagonalAction() = default;
  DiagonalAction(OrbifoldChart chart, std::vector<std::vector<Rational>> generators)
      : chart_(std::move(chart)), generators_(std::move(generators)) {
    for (auto& g : generators_) {
      if (g.size() != chart_.dim()) throw std::invalid_argument("action generator length differs from chart dimension");
      std::uint64_t order = 1;
      for (auto& q : g) {
        q = frac(q);
        if (!q.get_den().fits_ulong_p()) throw std::overflow_error("action: rotation order too large");
        order = detail::checked_lcm(order, q.get_den().get_ui());
      }
      orders_.push_back(order);
    }
  }

  const OrbifoldChart& chart() const { return chart_; }
  const std::vector<std::vector<Rational>>& generators() const { return generators_; }
  const std::vector<std::uint64_t>& orders() const { return orders_; }

  std::uint64_t group_order() const {
    std::uint64_t n = 1;
    for (auto o : orders_) n = detail::checked_mul(n, o);
    return n;
  }

  friend bool operator==(const DiagonalAction&, const DiagonalAction&) = default;

 private:
  OrbifoldChart chart_;
  std::vector<std::vector<Rational>> generators_;
  std::vector<std::uint64_t> orders_;
};

/// Exponents over the generator list, reduced modulo the generator orders.
struct GroupElement {
  std::vector<std::uint64_t> exponents;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

inline GroupElement reduce(const DiagonalAction& a, std::vector<std::uint64_t> ex) {
  if (ex.size() != a.orders().size()) throw std::invalid_argument("group element length differs from generator count");
  for (std::size_t i = 0; i < ex.size(); ++i) ex[i] %= a.orders()[i];
  return GroupElement{std::move(ex)};
}

inline GroupElement identity_element(const DiagonalAction& a) {
  return GroupElement{std::vector<std::uint64_t>(a.orders().size(), 0)};
}

inline GroupElement multiply(const DiagonalAction& a, const GroupElement& g, const GroupElement& h) {
  std::vector<std::uint64_t> ex(g.exponents.size());
  for (std::size_t i = 0; i < ex.size(); ++i) ex[i] = g.exponents[i] + h.exponents[i];
  return reduce(a, std::move(ex));
}

/// Every element, first generator slowest.
inline std::vector<GroupElement> elements(const DiagonalAction& a) {
  std::vector<GroupElement> out;
  std::vector<std::uint64_t> ex(a.orders().size(), 0);
  while (true) {
    out.push_back(GroupElement{ex});
    std::size_t k = ex.size();
    while (k > 0) {
      --k;
      if (++ex[k] < a.orders()[k]) break;
      ex[k] = 0;
      if (k == 0) return out;
    }
    if (ex.empty()) return out;
  }
}

/// Rotation vector of an element, entries in [0, 1).
inline std::vector<Rational> rotation(const DiagonalAction& a, const GroupElement& g) {
  std::vector<Rational> q(a.chart().dim(), 0);
  for (std::size_t j = 0; j < g.exponents.size(); ++j)
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += Rational(Integer(g.exponents[j])) * a.generators()[j][i];
  for (auto& x : q) x = frac(x);
  return q;
}

/// <q, e> mod 1.
inline Rational weight(const ExponentVector& e, const std::vector<Rational>& q) {
  if (e.size() != q.size()) throw std::invalid_argument("weight: dimension mismatch");
  Rational w = 0;
  for (std::size_t i = 0; i < e.size(); ++i) w += Rational(Integer(e[i])) * q[i];
  return frac(w);
}

/// The automorphism phi_g as a diagonal map chart -> chart.
inline DiagonalMap automorphism(const DiagonalAction& a, const GroupElement& g) {
  std::vector<Cyclotomic> s;
  for (const auto& q : rotation(a, g)) s.push_back(root_of_unity(q));
  return DiagonalMap(a.chart(), a.chart(), std::move(s), std::vector<Exponent>(a.chart().dim(), 1));
}

/// Each term y^e e_I picks up zeta^{<q_g, e>}; e_I itself is invariant under diagonal scaling.
inline LogPForm act(const GroupElement& g, const DiagonalAction& a, const LogPForm& w) {
  if (!(w.chart() == a.chart())) throw std::invalid_argument("act: form is not on the action's chart");
  const auto q = rotation(a, g);
  LogPForm out(w.chart(), w.degree());
  for (const auto& [idx, c] : w.components()) {
    SparsePoly img(c.nvars());
    for (const auto& [e, coef] : c.terms()) img.add_term(e, root_of_unity(weight(e, q)) * coef);
    out.add(idx, img);
  }
  return out;
}

/// The group prod Z/a_i of a scalar-free cover, generator i scaling w_i by zeta_{a_i}.
/// Coordinates with a_i = 1 contribute no generator.
inline DiagonalAction galois_data(const DiagonalMap& g) {
  if (!g.is_scalar_free()) throw std::invalid_argument("galois_data: map carries nontrivial scalars");
  std::vector<std::vector<Rational>> gens;
  for (std::size_t i = 0; i < g.dim(); ++i) {
    if (g.exps[i] == 1) continue;
    std::vector<Rational> q(g.dim(), 0);
    q[i] = make_rational(1, Integer(g.exps[i]));
    gens.push_back(std::move(q));
  }
  return DiagonalAction(g.source, std::move(gens));
}

inline bool is_invariant_monomial(const DiagonalAction& a, const ExponentVector& e) {
  for (const auto& q : a.generators())
    if (weight(e, q) != 0) return false;
  return true;
}

inline std::vector<LogPForm> invariant_monomials(const DiagonalAction& a, const AdaptedModule& m, Exponent bound) {
  if (!(a.chart() == m.chart())) throw std::invalid_argument("invariant_monomials: action and module charts differ");
  std::vector<LogPForm> out;
  for (auto& f : monomial_sections(m, bound)) {
    const auto& e = f.components().begin()->second.terms().begin()->first;
    if (is_invariant_monomial(a, e)) out.push_back(std::move(f));
  }
  return out;
}

/// Raised when a form is not invariant under the Galois group of a cover.
class DescentError : public std::runtime_error {
 public:
  DescentError(const std::string& what, IndexSet idx, ExponentVector term, std::size_t generator)
      : std::runtime_error(what), index_set(std::move(idx)), exponent(std::move(term)), generator(generator) {}
  IndexSet index_set;
  ExponentVector exponent;
  std::size_t generator;
};

/// The unique eta on the target of f with pullback_form(f, eta) == w.
inline LogPForm descend(const LogPForm& w, const DiagonalMap& f) {
  if (!(w.chart() == f.source)) throw std::invalid_argument("descend: form is not on the source chart");
  const DiagonalAction a = galois_data(f);
  LogPForm out(f.target, w.degree());
  for (const auto& [idx, c] : w.components()) {
    Exponent factor = 1;
    for (auto i : idx) factor = detail::checked_mul(factor, f.exps[i]);
    const Cyclotomic inv(make_rational(1, Integer(factor)));
    SparsePoly img(c.nvars());
    for (const auto& [e, coef] : c.terms()) {
      for (std::size_t g = 0; g < a.generators().size(); ++g) {
        if (weight(e, a.generators()[g]) != 0) {
          std::ostringstream msg;
          msg << "term of weight " << weight(e, a.generators()[g]) << " is not invariant under generator " << g;
          throw DescentError(msg.str(), idx, e, g);
        }
      }
      ExponentVector down(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] % f.exps[i] != 0) throw std::logic_error("descend: invariant exponent not divisible by cover degree");
        down[i] = e[i] / f.exps[i];
      }
      img.add_term(std::move(down), inv * coef);
    }
    out.add(idx, img);
  }
  return out;
}

namespace detail {

/// Some eta in mu_N with base * eta^e == want, N a multiple of the needed order.
inline bool solvable_twist(const Cyclotomic& base, Exponent e, const Cyclotomic& want, Exponent other_e,
                           const Cyclotomic& other_base, const Cyclotomic& other_want) {
  const Cyclotomic ratio = want / base;
  const std::uint64_t n = checked_mul(e, checked_lcm(2, ratio.conductor()));
  for (std::uint64_t t = 0; t < n; ++t) {
    const Cyclotomic eta = Cyclotomic::root_of_unity(static_cast<std::int64_t>(t), n);
    if (!(base * eta.pow(static_cast<std::int64_t>(e)) == want)) continue;
    if (other_base * eta.pow(static_cast<std::int64_t>(other_e)) == other_want) return true;
  }
  return false;
}

}  // namespace detail

/// Where phi_g carries component k of Y x_X Z, acting through the first factor.
/// Components are compared up to a diagonal automorphism of W.
inline std::optional<std::size_t> lifted_action(const std::vector<FiberComponent>& comps, const DiagonalAction& a,
                                                const GroupElement& g, std::size_t k) {
  const FiberComponent& c = comps.at(k);
  if (!(c.to_first.target == a.chart())) throw std::invalid_argument("lifted_action: action is not on the first factor");
  const DiagonalMap twisted = compose(c.to_first, automorphism(a, g));
  for (std::size_t other = 0; other < comps.size(); ++other) {
    const FiberComponent& d = comps[other];
    bool ok = d.to_first.exps == twisted.exps && d.to_second.exps == c.to_second.exps;
    for (std::size_t i = 0; ok && i < twisted.dim(); ++i)
      ok = detail::solvable_twist(d.to_second.scalars[i], d.to_second.exps[i], c.to_second.scalars[i],
                                  d.to_first.exps[i], d.to_first.scalars[i], twisted.scalars[i]);
    if (ok) return other;
  }
  return std::nullopt;
}

/// True when the orbit of the first component under the lifted action is everything.
inline bool acts_transitively(const std::vector<FiberComponent>& comps, const DiagonalAction& a) {
  if (comps.empty()) return false;
  std::vector<bool> seen(comps.size(), false);
  for (const auto& g : elements(a)) {
    const auto k = lifted_action(comps, a, g, 0);
    if (!k) return false;
    seen[*k] = true;
  }
  for (bool b : seen)
    if (!b) return false;
  return true;
}

}  // namespace orbidiff
