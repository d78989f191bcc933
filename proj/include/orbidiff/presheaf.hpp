// Sections of the Kan-extended presheaf on finite diagrams: compatible
// families, restriction, qfh covers, gluing along one cover and the
// identification of sections over X with log forms.
#pragma once

#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbidiff/adapted.hpp"
#include "orbidiff/galois.hpp"
#include "orbidiff/orbifold.hpp"

namespace orbidiff {

/// Finite diagram of adapted objects t_j: Y_j -> T over a base T with structure map T -> X.
class AdaptedDiagram {
 public:
  struct Object {
    std::string name;
    DiagonalMap to_base;  // t_j
  };
  struct Arrow {
    std::string name;
    DiagonalMap map;  // Y_from -> Y_to
    std::size_t from;
    std::size_t to;
  };

  AdaptedDiagram(DiagonalMap structure, std::vector<Object> objects, std::vector<Arrow> arrows)
      : structure_(std::move(structure)), objects_(std::move(objects)), arrows_(std::move(arrows)) {
    for (const auto& o : objects_) {
      if (!(o.to_base.target == base()))
        throw std::invalid_argument("diagram object " + o.name + " does not map to the base " + base().name);
      if (!is_adapted(compose(o.to_base, structure_)))
        throw std::invalid_argument("diagram object " + o.name + " is not adapted over " + orbifold().name);
    }
    for (const auto& a : arrows_) {
      if (a.from >= objects_.size() || a.to >= objects_.size())
        throw std::invalid_argument("diagram arrow " + a.name + " references a missing object");
      if (!(a.map.source == objects_[a.from].to_base.source) || !(a.map.target == objects_[a.to].to_base.source))
        throw std::invalid_argument("diagram arrow " + a.name + " has the wrong endpoints");
      if (!(compose(a.map, objects_[a.to].to_base) == objects_[a.from].to_base))
        throw std::invalid_argument("diagram arrow " + a.name + " does not commute over the base");
    }
  }

  /// Diagram over the orbifold chart itself.
  static AdaptedDiagram over(const OrbifoldChart& x, std::vector<Object> objects, std::vector<Arrow> arrows = {}) {
    return AdaptedDiagram(DiagonalMap::identity(x), std::move(objects), std::move(arrows));
  }

  const OrbifoldChart& base() const { return structure_.source; }
  const OrbifoldChart& orbifold() const { return structure_.target; }
  const DiagonalMap& structure() const { return structure_; }
  const std::vector<Object>& objects() const { return objects_; }
  const std::vector<Arrow>& arrows() const { return arrows_; }

  /// The composite Y_j -> X.
  DiagonalMap to_orbifold(std::size_t j) const { return compose(objects_.at(j).to_base, structure_); }

  AdaptedModule module(std::size_t j, std::size_t degree) const { return AdaptedModule(to_orbifold(j), degree); }

 private:
  DiagonalMap structure_;
  std::vector<Object> objects_;
  std::vector<Arrow> arrows_;
};

/// One adapted form per diagram object.
struct CompatibleFamily {
  std::shared_ptr<const AdaptedDiagram> diagram;
  std::size_t degree = 0;
  std::vector<LogPForm> sections;  // indexed like diagram->objects()

  friend bool operator==(const CompatibleFamily& a, const CompatibleFamily& b) {
    return a.diagram == b.diagram && a.degree == b.degree && a.sections == b.sections;
  }
};

struct Violation {
  enum class Kind { NotASection, ArrowMismatch };
  Kind kind;
  std::size_t index;  // object index for NotASection, arrow index for ArrowMismatch
  std::string detail;
};

/// Empty iff every section lies in its adapted module and f^*(sigma_t) = sigma_{t o f} on every arrow.
inline std::vector<Violation> check_compatible(const CompatibleFamily& fam) {
  std::vector<Violation> out;
  const auto& d = *fam.diagram;
  if (fam.sections.size() != d.objects().size())
    throw std::invalid_argument("check_compatible: section count differs from object count");
  for (std::size_t j = 0; j < d.objects().size(); ++j) {
    const auto& s = fam.sections[j];
    if (s.degree() != fam.degree || !(s.chart() == d.objects()[j].to_base.source)) {
      out.push_back({Violation::Kind::NotASection, j, "section on object " + d.objects()[j].name + " has the wrong chart or degree"});
      continue;
    }
    if (!is_section(s, d.module(j, fam.degree)))
      out.push_back({Violation::Kind::NotASection, j, "section on object " + d.objects()[j].name + " is not adapted"});
  }
  for (std::size_t k = 0; k < d.arrows().size(); ++k) {
    const auto& a = d.arrows()[k];
    const auto& src = fam.sections[a.to];
    const auto& dst = fam.sections[a.from];
    if (!(src.chart() == a.map.target) || !(dst.chart() == a.map.source)) continue;  // reported above
    if (!(pullback_form(a.map, src) == dst))
      out.push_back({Violation::Kind::ArrowMismatch, k,
                     "arrow " + a.name + ": pullback of the section on " + d.objects()[a.to].name +
                         " differs from the section on " + d.objects()[a.from].name});
  }
  return out;
}

/// The family (t_j^* sigma)_j of a form sigma on the base.
inline CompatibleFamily pullback_family(std::shared_ptr<const AdaptedDiagram> d, const LogPForm& sigma) {
  if (!(sigma.chart() == d->base())) throw std::invalid_argument("pullback_family: form is not on the base");
  CompatibleFamily fam{d, sigma.degree(), {}};
  for (const auto& o : d->objects()) fam.sections.push_back(pullback_form(o.to_base, sigma));
  return fam;
}

/// Reindex a family over T along pi: T' -> T: the component at t' is sigma_{pi o t'}.
inline CompatibleFamily restrict_family(const CompatibleFamily& fam, const DiagonalMap& pi,
                                        std::shared_ptr<const AdaptedDiagram> target) {
  const auto& d = *fam.diagram;
  if (!(pi.target == d.base())) throw std::invalid_argument("restrict_family: map does not land in the base");
  if (!(target->base() == pi.source)) throw std::invalid_argument("restrict_family: diagram is not over the source of the map");
  if (!(target->structure() == compose(pi, d.structure())))
    throw std::invalid_argument("restrict_family: structure maps are not compatible");
  CompatibleFamily out{target, fam.degree, {}};
  for (const auto& o : target->objects()) {
    const DiagonalMap composite = compose(o.to_base, pi);
    std::optional<std::size_t> hit;
    for (std::size_t j = 0; j < d.objects().size() && !hit; ++j)
      if (d.objects()[j].to_base == composite) hit = j;
    if (!hit) throw std::out_of_range("restrict_family: no object of the source diagram matches the composite through " + o.name);
    out.sections.push_back(fam.sections[*hit]);
  }
  return out;
}

/// A diagonal map whose source is restricted to the complement of some coordinate hyperplanes.
struct CoverMember {
  DiagonalMap map;
  std::vector<bool> away;  // away[i]: source coordinate i is inverted

  explicit CoverMember(DiagonalMap m) : map(std::move(m)), away(map.dim(), false) {}
  CoverMember(DiagonalMap m, std::vector<bool> inverted) : map(std::move(m)), away(std::move(inverted)) {
    if (away.size() != map.dim()) throw std::invalid_argument("cover member: inverted-coordinate mask length");
  }
};

/// Coordinate strata of T (as zero-sets Z: x_i = 0 exactly for i in Z) missed by every member.
///
/// A diagonal map with positive exponents sends the stratum Z of its source
/// onto the stratum Z of its target; an open coordinate complement contains
/// exactly the strata disjoint from its inverted coordinates.
inline std::vector<std::vector<bool>> uncovered_strata(const OrbifoldChart& t, const std::vector<CoverMember>& members) {
  for (const auto& m : members)
    if (!(m.map.target == t)) throw std::invalid_argument("qfh cover member does not map to " + t.name);
  const std::size_t n = t.dim();
  if (n >= 63) throw std::overflow_error("uncovered_strata: dimension too large");
  std::vector<std::vector<bool>> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<bool> zero(n);
    for (std::size_t i = 0; i < n; ++i) zero[i] = (mask >> i) & 1U;
    bool covered = false;
    for (const auto& m : members) {
      bool hits = true;
      for (std::size_t i = 0; i < n; ++i)
        if (zero[i] && m.away[i]) hits = false;
      covered = covered || hits;
    }
    if (!covered) out.push_back(std::move(zero));
  }
  return out;
}

inline bool is_qfh_cover(const OrbifoldChart& t, const std::vector<CoverMember>& members) {
  return uncovered_strata(t, members).empty();
}

/// Failure of the descent condition on one normalized component of Y x_T Y.
class GlueObstruction : public std::runtime_error {
 public:
  GlueObstruction(const std::string& what, std::size_t component, std::string component_name, LogPForm mismatch)
      : std::runtime_error(what), component(component), component_name(std::move(component_name)), mismatch(std::move(mismatch)) {}
  std::size_t component;
  std::string component_name;
  LogPForm mismatch;  // difference of the two pullbacks
};

/// Glue a section on the cover f: Y -> T to a section on T.
///
/// The descent condition is tested by comparing both pullbacks of w to every
/// normalized component of Y x_T Y; when they agree everywhere w descends
/// uniquely. structure: T -> X carries the orbifold.
inline LogPForm glue(const DiagonalMap& structure, const DiagonalMap& f, const LogPForm& w) {
  if (!(f.target == structure.source)) throw std::invalid_argument("glue: cover does not map to the base");
  if (!f.is_scalar_free()) throw std::invalid_argument("glue: cover must be scalar-free");
  if (!is_section(w, AdaptedModule(compose(f, structure), w.degree())))
    throw std::invalid_argument("glue: form is not an adapted section on the cover");
  const auto comps = normalize_fiber_product(f, f);
  for (std::size_t k = 0; k < comps.size(); ++k) {
    const LogPForm diff = pullback_form(comps[k].to_first, w) - pullback_form(comps[k].to_second, w);
    if (!diff.is_zero())
      throw GlueObstruction("descent obstruction on component " + comps[k].chart.name, k, comps[k].chart.name, diff);
  }
  LogPForm eta = descend(w, f);
  if (!(pullback_form(f, eta) == w)) throw std::logic_error("glue: descended form does not pull back to the input");
  return eta;
}

/// Monomial basis of Omega^p_X(log floor Delta) up to the bound, in the dlog basis.
/// Only Infinite coordinates keep a log pole; every other index needs one factor x_i.
inline std::vector<LogPForm> global_sections_basis(const OrbifoldChart& x, std::size_t degree, Exponent bound) {
  std::vector<LogPForm> out;
  const auto exps = exponents_up_to(x.dim(), bound);
  for (const auto& idx : index_sets(x.dim(), degree)) {
    ExponentVector lower(x.dim(), 0);
    for (auto i : idx) lower[i] = x.mults[i].is_infinite() ? 0 : 1;
    for (const auto& e : exps)
      if (detail::dominates(e, lower)) out.push_back(LogPForm::monomial(x, idx, e));
  }
  return out;
}

/// x_i = y_i^{m_i} on Finite coordinates, identity elsewhere.
inline DiagonalMap canonical_cover(const OrbifoldChart& x) {
  std::vector<std::string> vars;
  std::vector<Exponent> a;
  for (std::size_t i = 0; i < x.dim(); ++i) {
    vars.push_back(x.coords[i] + "0");
    a.push_back(x.mults[i].is_finite() ? x.mults[i].value() : 1);
  }
  return DiagonalMap(OrbifoldChart(x.name + "0", vars), x, a);
}

struct GlobalSectionsReport {
  Exponent bound = 0;
  Exponent upstairs_bound = 0;
  std::vector<LogPForm> invariants;  // upstairs, invariant monomial sections
  std::vector<LogPForm> descended;   // normalized to unit coefficient, degree <= bound
  std::vector<LogPForm> basis;       // global_sections_basis
  std::size_t matched = 0;
  bool match = false;
};

inline LogPForm normalized_monomial(const LogPForm& f) {
  const auto& [idx, c] = *f.components().begin();
  return LogPForm::monomial(f.chart(), idx, c.terms().begin()->first);
}

/// Descend every invariant monomial section of the cover gamma0 and compare with the log basis on X.
inline GlobalSectionsReport verify_global_sections(const DiagonalMap& gamma0, std::size_t degree, Exponent bound) {
  if (!gamma0.is_scalar_free()) throw std::invalid_argument("verify_global_sections: cover must be scalar-free");
  GlobalSectionsReport rep;
  rep.bound = bound;
  Exponent cmax = 1;
  for (auto c : gamma0.exps) cmax = std::max(cmax, c);
  rep.upstairs_bound = detail::checked_mul(cmax, bound);
  const AdaptedModule m(gamma0, degree);
  rep.invariants = invariant_monomials(galois_data(gamma0), m, rep.upstairs_bound);
  for (const auto& inv : rep.invariants) {
    LogPForm down = descend(inv, gamma0);
    if (down.coefficient_degree() <= bound) rep.descended.push_back(normalized_monomial(down));
  }
  rep.basis = global_sections_basis(gamma0.target, degree, bound);
  for (const auto& b : rep.basis)
    for (const auto& d : rep.descended)
      if (b == d) {
        ++rep.matched;
        break;
      }
  rep.match = rep.matched == rep.basis.size() && rep.descended.size() == rep.basis.size();
  return rep;
}

inline GlobalSectionsReport verify_global_sections(const OrbifoldChart& x, std::size_t degree, Exponent bound) {
  return verify_global_sections(canonical_cover(x), degree, bound);
}

}  // namespace orbidiff
