// Canonical text rendering of numbers, polynomials, forms and maps.
//
// Every rendering is exact and parses back to the same value under the
// script grammar. Cyclotomic numbers are shown at a display conductor so
// that a whole report uses one set of root-of-unity literals.
#pragma once

#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "orbidiff/adapted.hpp"
#include "orbidiff/exactnum.hpp"
#include "orbidiff/orbifold.hpp"
#include "orbidiff/poly.hpp"

namespace orbidiff {

/// Non-negative integers bare, everything else in parentheses: 5, (-5), (2/3).
inline std::string render(const Rational& r) {
  if (is_integer(r) && r >= 0) return r.get_num().get_str();
  return "(" + r.get_str() + ")";
}

namespace detail {

inline std::string root_literal(std::uint64_t n, std::uint64_t k) {
  return "z" + std::to_string(n) + "^" + std::to_string(k);
}

inline std::string scaled_root(const Rational& r, std::uint64_t n, std::uint64_t k) {
  if (k == 0) return render(r);
  if (r == 1) return root_literal(n, k);
  return render(r) + "*" + root_literal(n, k);
}

}  // namespace detail

/// Rendering at conductor lcm(display, own conductor). Values of the form
/// r * zeta_N^k print as a single literal (smallest k, preferring r > 0);
/// anything else prints as a parenthesised power-basis sum.
inline std::string render(const Cyclotomic& x, std::uint64_t display = 1) {
  if (x.is_zero()) return "0";
  if (x.is_rational()) return render(x.rational_part());
  std::uint64_t n = detail::checked_lcm(display, minimal_conductor(x));
  // an odd conductor may only reach -r zeta^k; the doubled one then gives r > 0
  for (const std::uint64_t m : {n, detail::checked_lcm(2, n)}) {
    const Cyclotomic y = express_at(x, m);
    std::optional<std::pair<Rational, std::uint64_t>> best;
    for (std::uint64_t k = 0; k < m; ++k) {
      const Cyclotomic q = y * Cyclotomic::root_of_unity(-static_cast<std::int64_t>(k), m);
      if (!q.is_rational()) continue;
      const Rational r = q.rational_part();
      if (r > 0) {
        best = {r, k};
        break;
      }
      if (!best) best = {r, k};
    }
    if (best && (best->first > 0 || m != n || n % 2 == 0)) return detail::scaled_root(best->first, m, best->second);
    if (!best) break;
  }
  const Cyclotomic y = express_at(x, n);
  std::string out = "(";
  bool first = true;
  for (std::size_t j = 0; j < y.coords().size(); ++j) {
    if (y.coords()[j] == 0) continue;
    if (!first) out += " + ";
    first = false;
    out += detail::scaled_root(y.coords()[j], n, j);
  }
  return out + ")";
}

/// y1^2 y2^0: every variable, every exponent.
inline std::string render_monomial(const ExponentVector& e, const std::vector<std::string>& vars) {
  std::string out;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += ' ';
    out += vars.at(i) + "^" + std::to_string(e[i]);
  }
  return out;
}

inline std::string render_term(const Cyclotomic& c, const ExponentVector& e, const std::vector<std::string>& vars,
                               std::uint64_t display) {
  const std::string mono = render_monomial(e, vars);
  if (c == Cyclotomic(1)) return mono;
  return render(c, display) + " * " + mono;
}

inline std::string render(const SparsePoly& p, const std::vector<std::string>& vars, std::uint64_t display = 1) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [e, c] : p.terms()) {
    if (!out.empty()) out += " + ";
    out += render_term(c, e, vars, display);
  }
  return out;
}

inline std::string render_dlogs(const IndexSet& idx, const std::vector<std::string>& vars) {
  std::string out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) out += '^';
    out += "dlog(" + vars.at(idx[k]) + ")";
  }
  return out;
}

/// Terms ordered by index set, then exponent vector. A zero p-form keeps its
/// degree visible as 0 dlog(v1)^...^dlog(vp).
inline std::string render(const LogPForm& f, std::uint64_t display = 1) {
  const auto& vars = f.chart().coords;
  if (f.is_zero()) {
    if (f.degree() == 0) return "0";
    IndexSet idx(f.degree());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    return "0 " + render_dlogs(idx, vars);
  }
  std::string out;
  for (const auto& [idx, c] : f.components()) {
    for (const auto& [e, coef] : c.terms()) {
      if (!out.empty()) out += " + ";
      out += render_term(coef, e, vars, display);
      if (!idx.empty()) out += " " + render_dlogs(idx, vars);
    }
  }
  return out;
}

/// { x = z3^1 * y^3, ... } in target order.
inline std::string render_assignments(const DiagonalMap& m, std::uint64_t display = 1) {
  std::string out = "{ ";
  for (std::size_t i = 0; i < m.dim(); ++i) {
    if (i) out += ", ";
    out += m.target.coords[i] + " = ";
    if (!(m.scalars[i] == Cyclotomic(1))) out += render(m.scalars[i], display) + " * ";
    out += m.source.coords[i] + "^" + std::to_string(m.exps[i]);
  }
  return out + " }";
}

inline std::string render(const DiagonalMap& m, std::uint64_t display = 1) {
  return m.source.name + " -> " + m.target.name + " " + render_assignments(m, display);
}

inline std::string render(const Multiplicity& m) {
  switch (m.kind()) {
    case Multiplicity::Kind::Trivial:
      return "1";
    case Multiplicity::Kind::Infinite:
      return "inf";
    case Multiplicity::Kind::Finite:
      break;
  }
  return std::to_string(m.value());
}

template <class T>
std::string render_list(const std::vector<T>& xs) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
  os << ']';
  return os.str();
}

}  // namespace orbidiff
