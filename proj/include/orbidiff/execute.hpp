// Runs the @commands of a parsed script against the declarations before them.
#pragma once

#include <sstream>
#include <string>

#include "orbidiff/script.hpp"

namespace orbidiff::script {

struct ExecResult {
  std::string text;
  bool failed = false;
};

namespace detail {

inline std::uint64_t conductor_of(const LogPForm& f) {
  std::uint64_t n = 1;
  for (const auto& [idx, c] : f.components())
    for (const auto& [e, coef] : c.terms()) n = orbidiff::detail::checked_lcm(n, minimal_conductor(coef));
  return n;
}

/// lcm of the conductors of every number written in the declarations.
inline std::uint64_t session_conductor(const Script& s) {
  std::uint64_t n = 1;
  auto lift = [&n](std::uint64_t k) { n = orbidiff::detail::checked_lcm(n, k); };
  for (const auto& st : s.statements) {
    if (const auto* m = std::get_if<MapDecl>(&st)) {
      for (const auto& e : m->entries) lift(minimal_conductor(e.scalar));
    } else if (const auto* f = std::get_if<FormDecl>(&st)) {
      lift(conductor_of(f->value));
    } else if (const auto* fam = std::get_if<FamilyDecl>(&st)) {
      for (const auto& [o, w] : fam->entries) lift(conductor_of(w));
    }
  }
  return n;
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

class Runner {
 public:
  Runner(const Env& env, std::uint64_t display, Exponent default_bound)
      : env_(env), display_(display), default_bound_(default_bound) {}

  /// Appends the result lines; returns false when the command reports a failure.
  bool run(const Command& c, std::ostringstream& out) {
    out_ = &out;
    const std::string& v = c.verb;
    const Exponent bound = c.bound.value_or(default_bound_);
    if (v == "check-adapted") {
      const auto& g = env_.map(c.args[0]);
      line("divisor: " + render_list(pullback_divisor(g)));
      line("adapted: " + yes_no(is_adapted(g)));
      return true;
    }
    if (v == "generators") {
      const AdaptedModule m(env_.map(c.args[0]), *c.degree);
      for (const auto& g : adapted_generators(m)) line("gen: " + show(g));
      return true;
    }
    if (v == "kernel") {
      const AdaptedModule m(env_.map(c.args[0]), *c.degree);
      const auto ker = kernel_oracle(m, bound);
      const auto sec = monomial_sections(m, bound);
      line("kernel: " + std::to_string(ker.size()) + " monomials up to degree " + std::to_string(bound));
      for (const auto& f : ker) line("section: " + show(f));
      line("agree: " + yes_no(ker == sec));
      return ker == sec;
    }
    if (v == "member") {
      const auto& w = env_.form(c.args[0]);
      line("member: " + yes_no(is_section(w, AdaptedModule(env_.map(c.args[1]), w.degree()))));
      return true;
    }
    if (v == "pullback") {
      line("pullback: " + show(pullback_form(env_.map(c.args[1]), env_.form(c.args[0]))));
      return true;
    }
    if (v == "wedge") {
      line("wedge: " + show(wedge(env_.form(c.args[0]), env_.form(c.args[1]))));
      return true;
    }
    if (v == "compose") {
      line("compose: " + render(compose(env_.map(c.args[0]), env_.map(c.args[1])), display_));
      return true;
    }
    if (v == "invariants") {
      const auto& a = env_.action(c.args[0]);
      const auto inv = invariant_monomials(a, AdaptedModule(env_.map(c.args[1]), *c.degree), bound);
      line("invariants: " + std::to_string(inv.size()) + " up to degree " + std::to_string(bound));
      for (const auto& f : inv) line("inv: " + show(f));
      return true;
    }
    if (v == "act") {
      const auto& a = env_.action(c.args[0]);
      line("act: " + show(act(reduce(a, c.element), a, env_.form(c.args[1]))));
      return true;
    }
    if (v == "descend") {
      try {
        line("descend: " + show(descend(env_.form(c.args[0]), env_.map(c.args[1]))));
        return true;
      } catch (const DescentError& e) {
        line(std::string("obstruction: ") + e.what());
        return false;
      }
    }
    if (v == "glue") {
      const auto& f = env_.map(c.args[1]);
      const DiagonalMap structure = c.via ? env_.map(*c.via) : DiagonalMap::identity(f.target);
      try {
        line("glue: " + show(glue(structure, f, env_.form(c.args[0]))));
        return true;
      } catch (const GlueObstruction& e) {
        line("obstruction: component " + e.component_name + ": " + show(e.mismatch));
        return false;
      }
    }
    if (v == "fiber-product") {
      const auto& f = env_.map(c.args[0]);
      const auto& g = env_.map(c.args[1]);
      const auto comps = normalize_fiber_product(f, g);
      line("components: " + std::to_string(comps.size()));
      bool commutes = true;
      for (const auto& k : comps) {
        line("component " + k.chart.name + ": " + render_assignments(k.to_first, display_) + " " +
             render_assignments(k.to_second, display_));
        commutes = commutes && compose(k.to_first, f) == compose(k.to_second, g);
      }
      const bool transitive = acts_transitively(comps, galois_data(f));
      line("commutes: " + yes_no(commutes));
      line("transitive: " + yes_no(transitive));
      return commutes && transitive;
    }
    if (v == "qfh-check") {
      const auto& t = env_.chart(c.args[0]);
      std::vector<CoverMember> members;
      for (const auto& m : c.members) {
        const auto& map = env_.map(m.map);
        std::vector<bool> away(map.dim(), false);
        for (const auto& var : m.away) away[map.source.index_of(var)] = true;
        members.emplace_back(map, std::move(away));
      }
      const auto missed = uncovered_strata(t, members);
      line("qfh-cover: " + yes_no(missed.empty()));
      for (const auto& z : missed) {
        std::string s = "{";
        bool first = true;
        for (std::size_t i = 0; i < z.size(); ++i)
          if (z[i]) {
            s += (first ? " " : ", ") + t.coords[i] + " = 0";
            first = false;
          }
        line("uncovered: " + s + " }");
      }
      return true;
    }
    if (v == "global-basis") {
      const auto basis = global_sections_basis(env_.chart(c.args[0]), *c.degree, bound);
      line("dimension: " + std::to_string(basis.size()) + " up to degree " + std::to_string(bound));
      for (const auto& f : basis) line("basis: " + show(f));
      return true;
    }
    if (v == "verify-global") {
      const auto rep = env_.kind_of(c.args[0]) == Env::Kind::Map
                           ? verify_global_sections(env_.map(c.args[0]), *c.degree, bound)
                           : verify_global_sections(env_.chart(c.args[0]), *c.degree, bound);
      line("invariants: " + std::to_string(rep.invariants.size()) + " up to degree " + std::to_string(rep.upstairs_bound));
      for (const auto& f : rep.invariants) line("inv: " + show(f));
      for (const auto& f : rep.descended) line("descend: " + show(f));
      for (const auto& f : rep.basis) line("basis: " + show(f));
      line("match: " + yes_no(rep.match) + " (" + std::to_string(rep.matched) + " of " + std::to_string(rep.basis.size()) +
           " up to degree " + std::to_string(bound) + ")");
      return rep.match;
    }
    if (v == "check-family") {
      const auto viol = check_compatible(env_.family(c.args[0]));
      line("violations: " + std::to_string(viol.size()));
      for (const auto& x : viol) line("violation: " + x.detail);
      return viol.empty();
    }
    if (v == "restrict") {
      const auto& d = env_.diagram(c.args[2]);
      const auto fam = restrict_family(env_.family(c.args[0]), env_.map(c.args[1]), d);
      for (std::size_t j = 0; j < fam.sections.size(); ++j)
        line("section " + d->objects()[j].name + ": " + show(fam.sections[j]));
      return true;
    }
    throw std::logic_error("no handler for @" + v);
  }

 private:
  void line(const std::string& s) { *out_ << s << '\n'; }
  std::string show(const LogPForm& f) const { return render(f, display_); }

  const Env& env_;
  std::uint64_t display_;
  Exponent default_bound_;
  std::ostringstream* out_ = nullptr;
};

}  // namespace detail

/// Output is one block per command: the command itself, then its result lines;
/// blocks are separated by blank lines. Failed commands still print their block.
inline ExecResult execute(const Script& s, Exponent default_bound = 6) {
  ExecResult res;
  Env env;
  const std::uint64_t display = detail::session_conductor(s);
  detail::Runner runner(env, display, default_bound);
  std::ostringstream out;
  bool first = true;
  for (std::size_t i = 0; i < s.statements.size(); ++i) {
    const auto& st = s.statements[i];
    const auto* c = std::get_if<Command>(&st);
    if (!c) {
      env.apply(st);
      continue;
    }
    if (!first) out << '\n';
    first = false;
    out << render_command(*c) << '\n';
    try {
      if (!runner.run(*c, out)) res.failed = true;
    } catch (const std::exception& e) {
      const std::size_t line = i < s.lines.size() ? s.lines[i] : 0;
      out << "error (line " << line << ", @" << c->verb << "): " << e.what() << '\n';
      res.failed = true;
    }
  }
  res.text = out.str();
  return res;
}

}  // namespace orbidiff::script
