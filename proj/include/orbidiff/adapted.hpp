// Logarithmic p-forms in the dlog basis and the modules of adapted differentials.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "orbidiff/orbifold.hpp"
#include "orbidiff/poly.hpp"

namespace orbidiff {

/// Strictly increasing coordinate indices; e_I = dlog y_{I[0]} ^ ... ^ dlog y_{I[p-1]}.
using IndexSet = std::vector<std::size_t>;

/// All p-element subsets of {0..n-1} in lexicographic order.
inline std::vector<IndexSet> index_sets(std::size_t n, std::size_t p) {
  std::vector<IndexSet> out;
  if (p > n) return out;
  IndexSet cur(p);
  std::iota(cur.begin(), cur.end(), std::size_t{0});
  while (true) {
    out.push_back(cur);
    std::size_t i = p;
    while (i > 0 && cur[i - 1] == n - p + (i - 1)) --i;
    if (i == 0) return out;
    ++cur[i - 1];
    for (std::size_t k = i; k < p; ++k) cur[k] = cur[k - 1] + 1;
  }
}

/// A p-form sum_I c_I e_I on a chart with polynomial coefficients.
class LogPForm {
 public:
  using Components = std::map<IndexSet, SparsePoly>;

  LogPForm() = default;
  LogPForm(OrbifoldChart chart, std::size_t degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree_ > chart_.dim()) throw std::invalid_argument("form degree exceeds chart dimension");
  }

  static LogPForm monomial(const OrbifoldChart& chart, const IndexSet& idx, ExponentVector e,
                           const Cyclotomic& coef = Cyclotomic(1)) {
    LogPForm f(chart, idx.size());
    f.add(idx, SparsePoly::monomial(std::move(e), coef));
    return f;
  }
  static LogPForm function(const OrbifoldChart& chart, const SparsePoly& p) {
    LogPForm f(chart, 0);
    f.add({}, p);
    return f;
  }

  const OrbifoldChart& chart() const { return chart_; }
  std::size_t degree() const { return degree_; }
  const Components& components() const { return components_; }
  bool is_zero() const { return components_.empty(); }

  SparsePoly component(const IndexSet& idx) const {
    auto it = components_.find(idx);
    return it == components_.end() ? SparsePoly(chart_.dim()) : it->second;
  }

  void add(const IndexSet& idx, const SparsePoly& c) {
    if (idx.size() != degree_) throw std::invalid_argument("LogPForm: index set size differs from degree");
    if (!std::is_sorted(idx.begin(), idx.end()) || std::adjacent_find(idx.begin(), idx.end()) != idx.end())
      throw std::invalid_argument("LogPForm: index set must be strictly increasing");
    if (!idx.empty() && idx.back() >= chart_.dim()) throw std::invalid_argument("LogPForm: index out of range");
    if (c.nvars() != chart_.dim()) throw std::invalid_argument("LogPForm: coefficient variable count");
    if (c.is_zero()) return;
    auto [it, inserted] = components_.try_emplace(idx, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) components_.erase(it);
    }
  }

  /// Largest total degree among all coefficient monomials.
  Exponent coefficient_degree() const {
    Exponent d = 0;
    for (const auto& [idx, c] : components_) d = std::max(d, c.total_degree());
    return d;
  }

  LogPForm operator-() const {
    LogPForm out = *this;
    for (auto& [idx, c] : out.components_) c = -c;
    return out;
  }
  LogPForm& operator+=(const LogPForm& o) {
    check_compatible(o);
    for (const auto& [idx, c] : o.components_) add(idx, c);
    return *this;
  }
  friend LogPForm operator+(LogPForm a, const LogPForm& b) { return a += b; }
  friend LogPForm operator-(LogPForm a, const LogPForm& b) { return a += -b; }

  friend LogPForm operator*(const Cyclotomic& s, const LogPForm& f) {
    LogPForm out(f.chart_, f.degree_);
    for (const auto& [idx, c] : f.components_) out.add(idx, s * c);
    return out;
  }
  friend LogPForm operator*(const SparsePoly& p, const LogPForm& f) {
    LogPForm out(f.chart_, f.degree_);
    for (const auto& [idx, c] : f.components_) out.add(idx, p * c);
    return out;
  }

  friend bool operator==(const LogPForm&, const LogPForm&) = default;

 private:
  void check_compatible(const LogPForm& o) const {
    if (!(o.chart_ == chart_)) throw std::invalid_argument("LogPForm: chart mismatch");
    if (o.degree_ != degree_) throw std::invalid_argument("LogPForm: degree mismatch");
  }

  OrbifoldChart chart_;
  std::size_t degree_ = 0;
  Components components_;
};

/// Each term c y^e e_I of a form as a separate single-term form.
inline std::vector<LogPForm> monomial_terms(const LogPForm& f) {
  std::vector<LogPForm> out;
  for (const auto& [idx, c] : f.components())
    for (const auto& [e, coef] : c.terms()) out.push_back(LogPForm::monomial(f.chart(), idx, e, coef));
  return out;
}

/// Exterior product. The sign is that of the permutation sorting I followed by J.
inline LogPForm wedge(const LogPForm& a, const LogPForm& b) {
  if (!(a.chart() == b.chart())) throw std::invalid_argument("wedge: chart mismatch");
  LogPForm out(a.chart(), a.degree() + b.degree());
  for (const auto& [ia, ca] : a.components()) {
    for (const auto& [ib, cb] : b.components()) {
      IndexSet merged;
      merged.reserve(ia.size() + ib.size());
      // count inversions: pairs (i in I, j in J) with i > j
      std::size_t inversions = 0;
      bool repeated = false;
      for (auto i : ia)
        for (auto j : ib) {
          if (i == j) repeated = true;
          if (i > j) ++inversions;
        }
      if (repeated) continue;
      std::merge(ia.begin(), ia.end(), ib.begin(), ib.end(), std::back_inserter(merged));
      SparsePoly c = ca * cb;
      out.add(merged, inversions % 2 ? -c : c);
    }
  }
  return out;
}

/// e_I -> (prod_{i in I} c_i) e_I; coefficients substituted. The dlog basis is
/// insensitive to the unit scalars of f, so those only enter the coefficients.
inline LogPForm pullback_form(const DiagonalMap& f, const LogPForm& w) {
  if (!(w.chart() == f.target)) throw std::invalid_argument("pullback_form: form is not on the target chart");
  LogPForm out(f.source, w.degree());
  for (const auto& [idx, c] : w.components()) {
    Exponent factor = 1;
    for (auto i : idx) factor = detail::checked_mul(factor, f.exps[i]);
    out.add(idx, Cyclotomic(Rational(Integer(factor))) * f.pullback(c));
  }
  return out;
}

/// The module of adapted p-forms on the source of an adapted map gamma.
///
/// Sections are sum c_I e_I with y^(r restricted to I) dividing c_I, where the
/// depth r_i is a_i/m_i for Finite, 0 for Infinite and a_i for Trivial.
class AdaptedModule {
 public:
  AdaptedModule(DiagonalMap gamma, std::size_t degree) : gamma_(std::move(gamma)), degree_(degree) {
    if (!is_adapted(gamma_)) throw std::invalid_argument("AdaptedModule: map " + gamma_.source.name + " -> " + gamma_.target.name + " is not adapted");
    if (degree_ > gamma_.dim()) throw std::invalid_argument("AdaptedModule: degree exceeds dimension");
    const auto& mults = gamma_.target.mults;
    for (std::size_t i = 0; i < gamma_.dim(); ++i) {
      switch (mults[i].kind()) {
        case Multiplicity::Kind::Finite:
          depths_.push_back(gamma_.exps[i] / mults[i].value());
          break;
        case Multiplicity::Kind::Infinite:
          depths_.push_back(0);
          break;
        case Multiplicity::Kind::Trivial:
          depths_.push_back(gamma_.exps[i]);
          break;
      }
    }
  }

  const OrbifoldChart& chart() const { return gamma_.source; }
  const DiagonalMap& gamma() const { return gamma_; }
  std::size_t degree() const { return degree_; }
  const ExponentVector& depths() const { return depths_; }

  /// y^(r_i) on I, 0 elsewhere.
  ExponentVector depth_on(const IndexSet& idx) const {
    ExponentVector e(depths_.size(), 0);
    for (auto i : idx) e[i] = depths_[i];
    return e;
  }

 private:
  DiagonalMap gamma_;
  std::size_t degree_;
  ExponentVector depths_;
};

inline std::vector<LogPForm> adapted_generators(const AdaptedModule& m) {
  std::vector<LogPForm> out;
  for (const auto& idx : index_sets(m.chart().dim(), m.degree()))
    out.push_back(LogPForm::monomial(m.chart(), idx, m.depth_on(idx)));
  return out;
}

inline bool is_section(const LogPForm& w, const AdaptedModule& m) {
  if (!(w.chart() == m.chart())) throw std::invalid_argument("is_section: chart mismatch");
  if (w.degree() != m.degree()) throw std::invalid_argument("is_section: degree mismatch");
  for (const auto& [idx, c] : w.components())
    if (!c.divisible_by(m.depth_on(idx))) return false;
  return true;
}

/// Monomial forms y^e e_I (unit coefficient) with |e| <= bound accepted by is_section.
inline std::vector<LogPForm> monomial_sections(const AdaptedModule& m, Exponent bound) {
  std::vector<LogPForm> out;
  const auto exps = exponents_up_to(m.chart().dim(), bound);
  for (const auto& idx : index_sets(m.chart().dim(), m.degree())) {
    const ExponentVector lower = m.depth_on(idx);
    for (const auto& e : exps)
      if (detail::dominates(e, lower)) out.push_back(LogPForm::monomial(m.chart(), idx, e));
  }
  return out;
}

namespace detail {

// A truncated element of gamma^* Omega^1_X(log ceil Delta): f * gamma^*(basis_i).
// For boundary coordinates the basis is dx_i/x_i, for the others dx_i.
struct PulledBackLogTerm {
  std::size_t index;
  SparsePoly f;
};

// The composite q o gamma^*(res) on one term, evaluated as a polynomial in
// O_Y / (y_i^{k_i}); zero means the term lies in the kernel.
inline SparsePoly residue_image(const DiagonalMap& gamma, const PulledBackLogTerm& t) {
  const std::size_t i = t.index;
  const Multiplicity& m = gamma.target.mults[i];
  SparsePoly out(gamma.dim());
  if (!m.is_finite()) return out;  // no quotient condition off I_0
  // residue along D_i lives in gamma^* O_{D_i} = O_Y / (y_i^{a_i}); q then reduces
  // modulo the ideal of gamma^*(D_i / m_i), which is (y_i^{a_i/m_i})
  const Exponent ai = gamma.exps[i];
  const Rational depth = Rational(Integer(ai)) / Rational(Integer(m.value()));
  const Exponent ki = depth.get_num().get_ui();
  for (const auto& [e, c] : t.f.terms()) {
    if (e[i] >= ai) continue;  // zero in gamma^* O_{D_i}
    if (e[i] >= ki) continue;  // zero in O_{gamma^*(D_i/m_i)}
    out.add_term(e, c);
  }
  return out;
}

}  // namespace detail

/// Brute-force evaluation of the defining kernel on the truncated monomial basis.
///
/// Every candidate y^e e_i is rewritten in the basis gamma^*(dx_i/x_i) or
/// gamma^*(dx_i) of gamma^* Omega^1_X(log ceil Delta); the candidate belongs to
/// the kernel iff it lies in that image and its residue image vanishes. Higher
/// degrees are wedges of the degree-one output.
inline std::vector<LogPForm> kernel_oracle(const DiagonalMap& gamma, std::size_t degree, Exponent bound) {
  if (!is_adapted(gamma)) throw std::invalid_argument("kernel_oracle: map is not adapted");
  const OrbifoldChart& y = gamma.source;
  const std::size_t n = y.dim();
  const auto exps = exponents_up_to(n, bound);

  std::vector<std::vector<LogPForm>> one_forms(n);  // per coordinate index
  for (std::size_t i = 0; i < n; ++i) {
    const bool log_basis = !gamma.target.mults[i].is_trivial();
    const Cyclotomic ai(Rational(Integer(gamma.exps[i])));
    for (const auto& e : exps) {
      detail::PulledBackLogTerm term{i, SparsePoly(n)};
      if (log_basis) {
        // gamma^*(dx/x) = a_i dlog y_i
        term.f = SparsePoly::monomial(e, ai.inverse());
      } else {
        // gamma^*(dx) = s a_i y_i^{a_i} dlog y_i; only multiples of y_i^{a_i} are in the image
        if (e[i] < gamma.exps[i]) continue;
        ExponentVector rest = e;
        rest[i] -= gamma.exps[i];
        term.f = SparsePoly::monomial(rest, (gamma.scalars[i] * ai).inverse());
      }
      if (detail::residue_image(gamma, term).is_zero()) one_forms[i].push_back(LogPForm::monomial(y, {i}, e));
    }
  }

  if (degree == 0) {
    std::vector<LogPForm> out;
    for (const auto& e : exps) out.push_back(LogPForm::function(y, SparsePoly::monomial(e)));
    return out;
  }

  std::vector<LogPForm> out;
  for (const auto& idx : index_sets(n, degree)) {
    std::set<ExponentVector> seen;
    // depth-first over one oracle 1-form per index, pruning on total degree
    auto rec = [&](auto&& self, std::size_t pos, const LogPForm& acc, Exponent used) -> void {
      if (pos == idx.size()) {
        const auto& [I, c] = *acc.components().begin();
        const auto& [e, coef] = *c.terms().begin();
        if (seen.insert(e).second) out.push_back(LogPForm::monomial(y, I, e));
        return;
      }
      for (const auto& f : one_forms[idx[pos]]) {
        const Exponent d = f.coefficient_degree();
        if (used + d > bound) continue;
        self(self, pos + 1, pos == 0 ? f : wedge(acc, f), used + d);
      }
    };
    rec(rec, 0, LogPForm(y, 0), 0);
  }
  // canonical order: index set, then exponent vector
  std::sort(out.begin(), out.end(), [](const LogPForm& a, const LogPForm& b) {
    const auto& [ia, ca] = *a.components().begin();
    const auto& [ib, cb] = *b.components().begin();
    if (ia != ib) return ia < ib;
    return ca.terms().begin()->first < cb.terms().begin()->first;
  });
  return out;
}

inline std::vector<LogPForm> kernel_oracle(const AdaptedModule& m, Exponent bound) {
  return kernel_oracle(m.gamma(), m.degree(), bound);
}

}  // namespace orbidiff
