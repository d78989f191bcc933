// The text format: declarations of charts, boundaries, maps, forms, actions,
// diagrams and families, followed by @commands. Parsing validates names,
// dimensions and multiplicities; rendering produces text that parses back to
// an equal Script.
#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "orbidiff/adapted.hpp"
#include "orbidiff/galois.hpp"
#include "orbidiff/orbifold.hpp"
#include "orbidiff/presheaf.hpp"
#include "orbidiff/render.hpp"

namespace orbidiff::script {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : std::runtime_error(msg), line(line), column(column) {}
  std::size_t line;
  std::size_t column;
};

// ---------------------------------------------------------------------------
// Statements

struct ChartDecl {
  std::string name;
  std::vector<std::string> vars;
  friend bool operator==(const ChartDecl&, const ChartDecl&) = default;
};

struct DeltaDecl {
  std::string chart;
  std::vector<std::pair<std::string, Multiplicity>> entries;
  friend bool operator==(const DeltaDecl&, const DeltaDecl&) = default;
};

struct MapEntry {
  std::string target_var;
  Cyclotomic scalar;
  std::string source_var;
  Exponent exponent = 1;
  friend bool operator==(const MapEntry&, const MapEntry&) = default;
};

struct MapDecl {
  std::string name;
  std::string source;
  std::string target;
  std::vector<MapEntry> entries;
  friend bool operator==(const MapDecl&, const MapDecl&) = default;
};

struct FormDecl {
  std::string name;
  std::string chart;
  LogPForm value;
  friend bool operator==(const FormDecl&, const FormDecl&) = default;
};

struct ActionDecl {
  std::string name;
  std::string chart;
  std::vector<std::vector<Rational>> generators;  // entries in [0, 1)
  friend bool operator==(const ActionDecl&, const ActionDecl&) = default;
};

struct ArrowDecl {
  std::string map;
  std::string from;
  std::string to;
  friend bool operator==(const ArrowDecl&, const ArrowDecl&) = default;
};

struct DiagramDecl {
  std::string name;
  std::string base;
  std::optional<std::string> via;
  std::vector<std::string> objects;  // map names Y_j -> base
  std::vector<ArrowDecl> arrows;
  friend bool operator==(const DiagramDecl&, const DiagramDecl&) = default;
};

struct FamilyDecl {
  std::string name;
  std::string diagram;
  std::size_t degree = 0;
  std::vector<std::pair<std::string, LogPForm>> entries;
  friend bool operator==(const FamilyDecl&, const FamilyDecl&) = default;
};

struct CoverSpec {
  std::string map;
  std::vector<std::string> away;
  friend bool operator==(const CoverSpec&, const CoverSpec&) = default;
};

struct Command {
  std::string verb;
  std::vector<std::string> args;
  std::optional<std::size_t> degree;
  std::optional<Exponent> bound;
  std::optional<std::string> via;
  std::vector<std::uint64_t> element;
  std::vector<CoverSpec> members;
  friend bool operator==(const Command&, const Command&) = default;
};

using Statement = std::variant<ChartDecl, DeltaDecl, MapDecl, FormDecl, ActionDecl, DiagramDecl, FamilyDecl, Command>;

struct Script {
  std::vector<Statement> statements;
  std::vector<std::size_t> lines;  // source line of each statement

  friend bool operator==(const Script& a, const Script& b) { return a.statements == b.statements; }
};

// ---------------------------------------------------------------------------
// Symbol table

/// True for z<digits>, the root-of-unity literals.
inline bool is_root_literal(std::string_view s) {
  if (s.size() < 2 || s[0] != 'z') return false;
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

class Env {
 public:
  enum class Kind { Chart, Map, Form, Action, Diagram, Family };

  std::optional<Kind> kind_of(const std::string& name) const {
    auto it = kinds_.find(name);
    if (it == kinds_.end()) return std::nullopt;
    return it->second;
  }

  const OrbifoldChart& chart(const std::string& n) const { return get(charts_, n, Kind::Chart); }
  const DiagonalMap& map(const std::string& n) const { return get(maps_, n, Kind::Map); }
  const LogPForm& form(const std::string& n) const { return get(forms_, n, Kind::Form); }
  const DiagonalAction& action(const std::string& n) const { return get(actions_, n, Kind::Action); }
  const std::shared_ptr<const AdaptedDiagram>& diagram(const std::string& n) const { return get(diagrams_, n, Kind::Diagram); }
  const CompatibleFamily& family(const std::string& n) const { return get(families_, n, Kind::Family); }

  /// Register a declaration. Throws std::invalid_argument on semantic errors.
  void apply(const Statement& s) {
    std::visit([this](const auto& d) { this->apply_decl(d); }, s);
  }

  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::Chart:
        return "chart";
      case Kind::Map:
        return "map";
      case Kind::Form:
        return "form";
      case Kind::Action:
        return "action";
      case Kind::Diagram:
        return "diagram";
      case Kind::Family:
        return "family";
    }
    return "name";
  }

 private:
  template <class M>
  const typename M::mapped_type& get(const M& m, const std::string& n, Kind k) const {
    auto it = m.find(n);
    if (it == m.end()) {
      auto other = kind_of(n);
      if (other) throw std::invalid_argument(n + " is a " + kind_name(*other) + ", not a " + kind_name(k));
      throw std::invalid_argument("unknown identifier " + n);
    }
    return it->second;
  }

  void declare(const std::string& name, Kind k) {
    if (kinds_.count(name)) throw std::invalid_argument(name + " is already declared");
    kinds_[name] = k;
  }

  static void check_var(const std::string& v) {
    if (is_root_literal(v)) throw std::invalid_argument("coordinate name " + v + " is reserved for roots of unity");
    if (v == "dlog") throw std::invalid_argument("coordinate name dlog is reserved");
  }

  const OrbifoldChart& use_chart(const std::string& n) {
    const auto& c = chart(n);
    used_.insert(n);
    return c;
  }

  void apply_decl(const ChartDecl& d) {
    for (const auto& v : d.vars) check_var(v);
    OrbifoldChart c(d.name, d.vars);
    declare(d.name, Kind::Chart);
    charts_[d.name] = std::move(c);
  }

  void apply_decl(const DeltaDecl& d) {
    (void)chart(d.chart);
    OrbifoldChart& c = charts_.at(d.chart);
    if (used_.count(d.chart)) throw std::invalid_argument("delta on " + d.chart + " must precede every use of the chart");
    if (has_delta_.count(d.chart)) throw std::invalid_argument("chart " + d.chart + " already has a delta");
    std::vector<Multiplicity> mults = c.mults;
    std::set<std::string> seen;
    for (const auto& [v, m] : d.entries) {
      if (!seen.insert(v).second) throw std::invalid_argument("coordinate " + v + " appears twice in delta");
      mults[c.index_of(v)] = m;
    }
    c.mults = std::move(mults);
    has_delta_.insert(d.chart);
  }

  void apply_decl(const MapDecl& d) {
    const OrbifoldChart target = use_chart(d.target);
    if (d.entries.size() != target.dim())
      throw std::invalid_argument("map " + d.name + ": dimension mismatch (" + d.target + " has " +
                                  std::to_string(target.dim()) + " coordinates, " + std::to_string(d.entries.size()) +
                                  " assigned)");
    std::vector<const MapEntry*> by_target(target.dim(), nullptr);
    for (const auto& e : d.entries) {
      const std::size_t i = target.index_of(e.target_var);
      if (by_target[i]) throw std::invalid_argument("map " + d.name + ": " + e.target_var + " is assigned twice");
      by_target[i] = &e;
      if (e.exponent == 0) throw std::invalid_argument("exponent must be positive");
      if (!e.scalar.is_root_of_unity()) throw std::invalid_argument("map scalar must be a root of unity");
    }
    OrbifoldChart source;
    if (!kind_of(d.source)) {
      std::vector<std::string> vars;
      for (const auto* e : by_target) vars.push_back(e->source_var);
      ChartDecl implicit{d.source, vars};
      apply_decl(implicit);
      source = use_chart(d.source);
    } else {
      source = use_chart(d.source);
      if (source.dim() != target.dim())
        throw std::invalid_argument("map " + d.name + ": dimension mismatch between " + d.source + " and " + d.target);
    }
    std::vector<Cyclotomic> scalars;
    std::vector<Exponent> exps;
    for (std::size_t i = 0; i < target.dim(); ++i) {
      if (by_target[i]->source_var != source.coords[i])
        throw std::invalid_argument("map " + d.name + " is not diagonal: " + target.coords[i] + " must be a power of " +
                                    source.coords[i]);
      scalars.push_back(by_target[i]->scalar);
      exps.push_back(by_target[i]->exponent);
    }
    DiagonalMap m(source, target, std::move(scalars), std::move(exps));
    declare(d.name, Kind::Map);
    maps_[d.name] = std::move(m);
  }

  void apply_decl(const FormDecl& d) {
    const auto& c = use_chart(d.chart);
    if (!(d.value.chart() == c)) throw std::invalid_argument("form " + d.name + " does not live on " + d.chart);
    declare(d.name, Kind::Form);
    forms_[d.name] = d.value;
  }

  void apply_decl(const ActionDecl& d) {
    const auto& c = use_chart(d.chart);
    for (const auto& g : d.generators)
      if (g.size() != c.dim()) throw std::invalid_argument("action " + d.name + ": dimension mismatch");
    DiagonalAction a(c, d.generators);
    declare(d.name, Kind::Action);
    actions_[d.name] = std::move(a);
  }

  void apply_decl(const DiagramDecl& d) {
    const auto& base = use_chart(d.base);
    const DiagonalMap structure = d.via ? map(*d.via) : DiagonalMap::identity(base);
    if (!(structure.source == base)) throw std::invalid_argument("diagram " + d.name + ": " + *d.via + " does not start at " + d.base);
    std::vector<AdaptedDiagram::Object> objects;
    std::map<std::string, std::size_t> index;
    for (const auto& o : d.objects) {
      if (!index.emplace(o, objects.size()).second) throw std::invalid_argument("diagram " + d.name + ": object " + o + " listed twice");
      objects.push_back({o, map(o)});
    }
    std::vector<AdaptedDiagram::Arrow> arrows;
    for (const auto& a : d.arrows) {
      auto from = index.find(a.from), to = index.find(a.to);
      if (from == index.end()) throw std::invalid_argument("diagram " + d.name + ": " + a.from + " is not an object");
      if (to == index.end()) throw std::invalid_argument("diagram " + d.name + ": " + a.to + " is not an object");
      arrows.push_back({a.map, map(a.map), from->second, to->second});
    }
    auto diag = std::make_shared<const AdaptedDiagram>(structure, std::move(objects), std::move(arrows));
    declare(d.name, Kind::Diagram);
    diagrams_[d.name] = std::move(diag);
  }

  void apply_decl(const FamilyDecl& d) {
    const auto& diag = diagram(d.diagram);
    CompatibleFamily fam{diag, d.degree, {}};
    for (const auto& o : diag->objects()) fam.sections.emplace_back(o.to_base.source, d.degree);
    std::set<std::string> seen;
    for (const auto& [obj, form] : d.entries) {
      if (!seen.insert(obj).second) throw std::invalid_argument("family " + d.name + ": object " + obj + " given twice");
      std::optional<std::size_t> j;
      for (std::size_t k = 0; k < diag->objects().size(); ++k)
        if (diag->objects()[k].name == obj) j = k;
      if (!j) throw std::invalid_argument("family " + d.name + ": " + obj + " is not an object of " + d.diagram);
      if (!(form.chart() == diag->objects()[*j].to_base.source))
        throw std::invalid_argument("family " + d.name + ": section on " + obj + " lives on the wrong chart");
      if (form.degree() != d.degree) throw std::invalid_argument("family " + d.name + ": section on " + obj + " has the wrong degree");
      fam.sections[*j] = form;
    }
    declare(d.name, Kind::Family);
    families_[d.name] = std::move(fam);
  }

  void apply_decl(const Command&) {}

  std::map<std::string, Kind> kinds_;
  std::map<std::string, OrbifoldChart> charts_;
  std::set<std::string> used_;
  std::set<std::string> has_delta_;
  std::map<std::string, DiagonalMap> maps_;
  std::map<std::string, LogPForm> forms_;
  std::map<std::string, DiagonalAction> actions_;
  std::map<std::string, std::shared_ptr<const AdaptedDiagram>> diagrams_;
  std::map<std::string, CompatibleFamily> families_;
};

// ---------------------------------------------------------------------------
// Command signatures

/// Argument slots: a kind name consumes an identifier, a plain word is a
/// literal keyword, and "degree", "bound?", "via?", "element", "members" are
/// the structured slots.
struct Signature {
  std::string verb;
  std::vector<std::string> slots;
};

inline const std::vector<Signature>& signatures() {
  static const std::vector<Signature> table{
      {"check-adapted", {"$map"}},
      {"generators", {"$map", "degree"}},
      {"kernel", {"$map", "degree", "bound?"}},
      {"member", {"$form", "in", "$map"}},
      {"pullback", {"$form", "along", "$map"}},
      {"wedge", {"$form", "$form"}},
      {"compose", {"$map", "$map"}},
      {"invariants", {"$action", "in", "$map", "degree", "bound?"}},
      {"act", {"$action", "by", "element", "on", "$form"}},
      {"descend", {"$form", "along", "$map"}},
      {"glue", {"$form", "along", "$map", "via?"}},
      {"fiber-product", {"$map", "$map"}},
      {"qfh-check", {"$chart", "by", "members"}},
      {"global-basis", {"$chart", "degree", "bound?"}},
      {"verify-global", {"$map|chart", "degree", "bound?"}},
      {"check-family", {"$family"}},
      {"restrict", {"$family", "along", "$map", "to", "$diagram"}},
  };
  return table;
}

inline const Signature* find_signature(const std::string& verb) {
  for (const auto& s : signatures())
    if (s.verb == verb) return &s;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Ident, Int, Sym, Verb, End };
  Kind kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const std::size_t l = line, k = col, start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && ident_char(src[i])) advance(1);
      out.push_back({Token::Kind::Ident, std::string(src.substr(start, i - start)), l, k});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance(1);
      if (i < src.size() && (std::isalpha(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        throw ParseError("malformed number", l, k);
      out.push_back({Token::Kind::Int, std::string(src.substr(start, i - start)), l, k});
    } else if (c == '@') {
      advance(1);
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '-')) advance(1);
      if (i == start + 1) throw ParseError("expected a command name after @", l, k);
      out.push_back({Token::Kind::Verb, std::string(src.substr(start + 1, i - start - 1)), l, k});
    } else if (c == '-' && i + 1 < src.size() && src[i + 1] == '>') {
      advance(2);
      out.push_back({Token::Kind::Sym, "->", l, k});
    } else if (std::string_view(";,{}[]():=^*/+-").find(c) != std::string_view::npos) {
      advance(1);
      out.push_back({Token::Kind::Sym, std::string(1, c), l, k});
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", l, k);
    }
  }
  out.push_back({Token::Kind::End, "", line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Expressions

struct Expr {
  enum class Kind { Num, Root, Name, Dlog, Neg, Add, Sub, Mul, Div, Pow };
  Kind kind;
  Rational num;        // Num
  std::uint64_t n = 0;  // Root conductor, Pow exponent
  std::string name;    // Name, Dlog
  std::vector<Expr> kids;
  std::size_t line = 0, col = 0;
};

namespace detail {

inline Cyclotomic eval_scalar(const Expr& e) {
  auto fail = [&](const std::string& m) -> Cyclotomic { throw ParseError(m, e.line, e.col); };
  switch (e.kind) {
    case Expr::Kind::Num:
      return Cyclotomic(e.num);
    case Expr::Kind::Root:
      return root_of_unity(1, e.n);
    case Expr::Kind::Name:
      return fail("unknown identifier " + e.name);
    case Expr::Kind::Dlog:
      return fail("dlog is not allowed here");
    case Expr::Kind::Neg:
      return -eval_scalar(e.kids[0]);
    case Expr::Kind::Add:
      return eval_scalar(e.kids[0]) + eval_scalar(e.kids[1]);
    case Expr::Kind::Sub:
      return eval_scalar(e.kids[0]) - eval_scalar(e.kids[1]);
    case Expr::Kind::Mul:
      return eval_scalar(e.kids[0]) * eval_scalar(e.kids[1]);
    case Expr::Kind::Div: {
      const Cyclotomic d = eval_scalar(e.kids[1]);
      if (d.is_zero()) return fail("division by zero");
      return eval_scalar(e.kids[0]) / d;
    }
    case Expr::Kind::Pow:
      return eval_scalar(e.kids[0]).pow(static_cast<std::int64_t>(e.n));
  }
  return fail("bad expression");
}

/// Sum with the convention that a zero form takes the other summand's degree.
inline LogPForm add_forms(const LogPForm& a, const LogPForm& b, const Expr& at) {
  if (a.degree() == b.degree()) return a + b;
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  throw ParseError("cannot add forms of degree " + std::to_string(a.degree()) + " and " + std::to_string(b.degree()), at.line,
                   at.col);
}

inline LogPForm eval_form(const Expr& e, const OrbifoldChart& chart, const Env& env) {
  const std::size_t n = chart.dim();
  auto constant = [&](const Cyclotomic& c) { return LogPForm::function(chart, SparsePoly::constant(n, c)); };
  auto fail = [&](const std::string& m) -> LogPForm { throw ParseError(m, e.line, e.col); };
  try {
    switch (e.kind) {
      case Expr::Kind::Num:
      case Expr::Kind::Root:
        return constant(eval_scalar(e));
      case Expr::Kind::Name: {
        for (std::size_t i = 0; i < n; ++i)
          if (chart.coords[i] == e.name) return LogPForm::function(chart, SparsePoly::variable(n, i));
        if (env.kind_of(e.name) == Env::Kind::Form) {
          const LogPForm& f = env.form(e.name);
          if (!(f.chart() == chart)) return fail("form " + e.name + " does not live on " + chart.name);
          return f;
        }
        return fail("unknown identifier " + e.name + " on chart " + chart.name);
      }
      case Expr::Kind::Dlog: {
        for (std::size_t i = 0; i < n; ++i)
          if (chart.coords[i] == e.name) return LogPForm::monomial(chart, {i}, ExponentVector(n, 0));
        return fail("unknown coordinate " + e.name + " on chart " + chart.name);
      }
      case Expr::Kind::Neg:
        return -eval_form(e.kids[0], chart, env);
      case Expr::Kind::Add:
        return add_forms(eval_form(e.kids[0], chart, env), eval_form(e.kids[1], chart, env), e);
      case Expr::Kind::Sub:
        return add_forms(eval_form(e.kids[0], chart, env), -eval_form(e.kids[1], chart, env), e);
      case Expr::Kind::Mul:
        return wedge(eval_form(e.kids[0], chart, env), eval_form(e.kids[1], chart, env));
      case Expr::Kind::Div: {
        const LogPForm d = eval_form(e.kids[1], chart, env);
        const SparsePoly c = d.degree() == 0 ? d.component({}) : SparsePoly(n);
        if (d.degree() != 0 || c.size() != 1 || c.terms().begin()->first != ExponentVector(n, 0))
          return fail("can only divide by a nonzero constant");
        return c.terms().begin()->second.inverse() * eval_form(e.kids[0], chart, env);
      }
      case Expr::Kind::Pow: {
        const LogPForm b = eval_form(e.kids[0], chart, env);
        if (b.degree() != 0) return fail("only functions can be raised to a power");
        SparsePoly acc = SparsePoly::constant(n, 1);
        const SparsePoly base = b.component({});
        for (std::uint64_t k = 0; k < e.n; ++k) acc = acc * base;
        return LogPForm::function(chart, acc);
      }
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ParseError(ex.what(), e.line, e.col);
  }
  return fail("bad expression");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  Script parse() {
    Script s;
    while (peek().kind != Token::Kind::End) {
      const Token start = peek();
      Statement st = statement();
      try {
        env_.apply(st);
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception& e) {
        throw ParseError(e.what(), start.line, start.col);
      }
      s.statements.push_back(std::move(st));
      s.lines.push_back(start.line);
    }
    return s;
  }

  const Env& env() const { return env_; }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() {
    Token t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void error(const std::string& m, const Token& t) const { throw ParseError(m, t.line, t.col); }
  [[noreturn]] void error(const std::string& m) const { error(m, peek()); }

  bool at_sym(const char* s) const { return peek().kind == Token::Kind::Sym && peek().text == s; }
  bool at_word(const char* s) const { return peek().kind == Token::Kind::Ident && peek().text == s; }
  void expect_sym(const char* s) {
    if (!at_sym(s)) error(std::string("expected '") + s + "'" + found());
    next();
  }
  void expect_word(const char* s) {
    if (!at_word(s)) error(std::string("expected '") + s + "'" + found());
    next();
  }
  std::string found() const {
    if (peek().kind == Token::Kind::End) return " at end of input";
    return " before '" + peek().text + "'";
  }
  std::string ident(const char* what) {
    if (peek().kind != Token::Kind::Ident) error(std::string("expected ") + what + found());
    return next().text;
  }
  std::uint64_t integer(const char* what) {
    if (peek().kind != Token::Kind::Int) error(std::string("expected ") + what + found());
    const Token t = next();
    const Integer v(t.text);
    if (!v.fits_ulong_p()) error("integer too large", t);
    return v.get_ui();
  }

  /// A name of the given kind, validated against the symbol table.
  std::string name_of(Env::Kind k) {
    const Token t = peek();
    const std::string n = ident(Env::kind_name(k));
    const auto actual = env_.kind_of(n);
    if (!actual) error("unknown identifier " + n, t);
    if (*actual != k) error(n + " is a " + Env::kind_name(*actual) + ", not a " + Env::kind_name(k), t);
    return n;
  }

  Statement statement() {
    const Token t = peek();
    if (t.kind == Token::Kind::Verb) return command();
    if (t.kind != Token::Kind::Ident) error("expected a declaration or command" + found());
    if (t.text == "chart") return chart_decl();
    if (t.text == "delta") return delta_decl();
    if (t.text == "map") return map_decl();
    if (t.text == "form") return form_decl();
    if (t.text == "action") return action_decl();
    if (t.text == "diagram") return diagram_decl();
    if (t.text == "family") return family_decl();
    error("unknown declaration " + t.text);
  }

  ChartDecl chart_decl() {
    next();
    ChartDecl d{ident("chart name"), {}};
    expect_word("vars");
    while (peek().kind == Token::Kind::Ident) d.vars.push_back(next().text);
    if (d.vars.empty()) error("dimension must be positive");
    expect_sym(";");
    return d;
  }

  DeltaDecl delta_decl() {
    next();
    expect_word("on");
    DeltaDecl d{name_of(Env::Kind::Chart), {}};
    expect_sym("{");
    if (!at_sym("}")) {
      while (true) {
        const std::string v = ident("coordinate");
        expect_sym(":");
        if (at_word("inf")) {
          next();
          d.entries.emplace_back(v, Multiplicity::infinite());
        } else {
          const Token t = peek();
          const std::uint64_t m = integer("multiplicity");
          if (m < 2) error("multiplicity must be at least 2", t);
          d.entries.emplace_back(v, Multiplicity::finite(m));
        }
        if (!at_sym(",")) break;
        next();
      }
    }
    expect_sym("}");
    expect_sym(";");
    return d;
  }

  MapDecl map_decl() {
    next();
    MapDecl d;
    d.name = ident("map name");
    expect_sym(":");
    d.source = ident("source chart");
    expect_sym("->");
    d.target = name_of(Env::Kind::Chart);
    expect_sym("{");
    while (true) {
      MapEntry e;
      e.target_var = ident("coordinate");
      expect_sym("=");
      const Token at = peek();
      map_entry_rhs(expression(), e, at);
      d.entries.push_back(std::move(e));
      if (!at_sym(",")) break;
      next();
    }
    expect_sym("}");
    expect_sym(";");
    return d;
  }

  /// [scalar *] var [^ k]
  void map_entry_rhs(const Expr& rhs, MapEntry& e, const Token& at) {
    auto var_power = [](const Expr& x) -> const Expr* {
      if (x.kind == Expr::Kind::Name) return &x;
      if (x.kind == Expr::Kind::Pow && x.kids[0].kind == Expr::Kind::Name) return &x;
      return nullptr;
    };
    const Expr* body = &rhs;
    e.scalar = Cyclotomic(1);
    while (body->kind == Expr::Kind::Neg) {
      e.scalar = -e.scalar;
      body = &body->kids[0];
    }
    const Expr* vp = var_power(*body);
    if (!vp && body->kind == Expr::Kind::Mul && var_power(body->kids[1])) {
      vp = &body->kids[1];
      e.scalar = e.scalar * detail::eval_scalar(body->kids[0]);
    }
    if (!vp) error("map entry must be a root of unity times a power of a coordinate", at);
    if (vp->kind == Expr::Kind::Name) {
      e.source_var = vp->name;
      e.exponent = 1;
    } else {
      e.source_var = vp->kids[0].name;
      e.exponent = vp->n;
    }
    if (e.exponent == 0) throw ParseError("exponent must be positive", vp->line, vp->col);
    if (!e.scalar.is_root_of_unity()) error("map scalar must be a root of unity", at);
  }

  FormDecl form_decl() {
    next();
    FormDecl d;
    d.name = ident("form name");
    expect_word("on");
    d.chart = name_of(Env::Kind::Chart);
    expect_sym("=");
    d.value = detail::eval_form(expression(), env_.chart(d.chart), env_);
    expect_sym(";");
    return d;
  }

  Rational rational_literal() {
    bool neg = false;
    if (at_sym("-")) {
      next();
      neg = true;
    }
    const Token t = peek();
    if (t.kind != Token::Kind::Int) error("expected a rational number" + found());
    next();
    Integer num(t.text), den(1);
    if (at_sym("/")) {
      next();
      const Token d = peek();
      if (d.kind != Token::Kind::Int) error("expected a denominator" + found());
      next();
      den = Integer(d.text);
      if (den == 0) error("zero denominator", d);
    }
    if (neg) num = -num;
    return make_rational(num, den);
  }

  ActionDecl action_decl() {
    next();
    ActionDecl d;
    d.name = ident("action name");
    expect_word("on");
    d.chart = name_of(Env::Kind::Chart);
    expect_word("generators");
    while (at_sym("[")) {
      next();
      std::vector<Rational> g;
      if (!at_sym("]")) {
        while (true) {
          g.push_back(frac(rational_literal()));
          if (!at_sym(",")) break;
          next();
        }
      }
      expect_sym("]");
      d.generators.push_back(std::move(g));
      if (!at_sym(",")) break;
      next();
    }
    expect_sym(";");
    return d;
  }

  DiagramDecl diagram_decl() {
    next();
    DiagramDecl d;
    d.name = ident("diagram name");
    expect_word("over");
    d.base = name_of(Env::Kind::Chart);
    if (at_word("via")) {
      next();
      d.via = name_of(Env::Kind::Map);
    }
    expect_sym("{");
    if (at_word("objects")) {
      next();
      while (peek().kind == Token::Kind::Ident) {
        d.objects.push_back(name_of(Env::Kind::Map));
        if (!at_sym(",")) break;
        next();
      }
      expect_sym(";");
    }
    if (at_word("arrows")) {
      next();
      while (peek().kind == Token::Kind::Ident) {
        ArrowDecl a;
        a.map = name_of(Env::Kind::Map);
        expect_sym(":");
        a.from = ident("object");
        expect_sym("->");
        a.to = ident("object");
        d.arrows.push_back(std::move(a));
        if (!at_sym(",")) break;
        next();
      }
      expect_sym(";");
    }
    expect_sym("}");
    expect_sym(";");
    return d;
  }

  FamilyDecl family_decl() {
    next();
    FamilyDecl d;
    d.name = ident("family name");
    expect_word("on");
    d.diagram = name_of(Env::Kind::Diagram);
    const auto& diag = env_.diagram(d.diagram);
    std::optional<std::size_t> degree;
    if (at_word("degree")) {
      next();
      degree = integer("degree");
    }
    expect_sym("{");
    if (!at_sym("}")) {
      while (true) {
        const Token ot = peek();
        const std::string obj = ident("object");
        const AdaptedDiagram::Object* o = nullptr;
        for (const auto& x : diag->objects())
          if (x.name == obj) o = &x;
        if (!o) error(obj + " is not an object of " + d.diagram, ot);
        expect_sym(":");
        const Token ft = peek();
        LogPForm f = detail::eval_form(expression(), o->to_base.source, env_);
        if (!degree) degree = f.degree();
        if (f.degree() != *degree) {
          if (!f.is_zero()) error("section on " + obj + " has degree " + std::to_string(f.degree()), ft);
          f = LogPForm(f.chart(), *degree);
        }
        d.entries.emplace_back(obj, std::move(f));
        if (!at_sym(",")) break;
        next();
      }
    }
    expect_sym("}");
    expect_sym(";");
    d.degree = degree.value_or(0);
    return d;
  }

  Command command() {
    const Token vt = next();
    const Signature* sig = find_signature(vt.text);
    if (!sig) error("unknown command @" + vt.text, vt);
    Command c;
    c.verb = vt.text;
    for (const auto& slot : sig->slots) {
      if (slot == "$map|chart") {
        const Token t = peek();
        const std::string n = ident("map or chart");
        const auto k = env_.kind_of(n);
        if (!k) error("unknown identifier " + n, t);
        if (*k != Env::Kind::Map && *k != Env::Kind::Chart) error(n + " is a " + std::string(Env::kind_name(*k)) + ", not a map or chart", t);
        c.args.push_back(n);
      } else if (slot[0] == '$') {
        static const std::map<std::string, Env::Kind> kinds{{"$map", Env::Kind::Map},       {"$form", Env::Kind::Form},
                                                           {"$action", Env::Kind::Action}, {"$chart", Env::Kind::Chart},
                                                           {"$family", Env::Kind::Family}, {"$diagram", Env::Kind::Diagram}};
        c.args.push_back(name_of(kinds.at(slot)));
      } else if (slot == "degree") {
        expect_word("degree");
        c.degree = integer("degree");
      } else if (slot == "bound?") {
        if (at_word("bound")) {
          next();
          c.bound = integer("bound");
        }
      } else if (slot == "via?") {
        if (at_word("via")) {
          next();
          c.via = name_of(Env::Kind::Map);
        }
      } else if (slot == "element") {
        expect_sym("[");
        if (!at_sym("]")) {
          while (true) {
            c.element.push_back(integer("group element exponent"));
            if (!at_sym(",")) break;
            next();
          }
        }
        expect_sym("]");
        const auto& a = env_.action(c.args.at(0));
        if (c.element.size() != a.generators().size())
          error("dimension mismatch: " + c.args[0] + " has " + std::to_string(a.generators().size()) + " generators", vt);
      } else if (slot == "members") {
        while (true) {
          CoverSpec m;
          const Token mt = peek();
          m.map = name_of(Env::Kind::Map);
          if (at_word("away")) {
            next();
            while (peek().kind == Token::Kind::Ident) {
              const Token at = peek();
              m.away.push_back(next().text);
              const auto& src = env_.map(m.map).source;
              if (std::find(src.coords.begin(), src.coords.end(), m.away.back()) == src.coords.end())
                error("unknown coordinate " + m.away.back() + " on " + src.name, at);
            }
          }
          (void)mt;
          c.members.push_back(std::move(m));
          if (!at_sym(",")) break;
          next();
        }
      } else {
        expect_word(slot.c_str());
      }
    }
    expect_sym(";");
    return c;
  }

  // sum := product (('+' | '-') product)*
  Expr expression() {
    Expr lhs = product();
    while (at_sym("+") || at_sym("-")) {
      const Token op = next();
      Expr rhs = product();
      lhs = Expr{op.text == "+" ? Expr::Kind::Add : Expr::Kind::Sub, {}, 0, {}, {std::move(lhs), std::move(rhs)}, op.line, op.col};
    }
    return lhs;
  }

  bool starts_atom() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::Ident || t.kind == Token::Kind::Int) return true;
    return t.kind == Token::Kind::Sym && t.text == "(";
  }

  // product := unary (('*' | '/' | juxtaposition) unary)*
  Expr product() {
    Expr lhs = unary();
    while (true) {
      const Token op = peek();
      Expr::Kind k;
      if (at_sym("*")) {
        next();
        k = Expr::Kind::Mul;
      } else if (at_sym("/")) {
        next();
        k = Expr::Kind::Div;
      } else if (starts_atom()) {
        k = Expr::Kind::Mul;
      } else {
        return lhs;
      }
      Expr rhs = unary();
      lhs = Expr{k, {}, 0, {}, {std::move(lhs), std::move(rhs)}, op.line, op.col};
    }
  }

  // unary := '-' unary | power
  Expr unary() {
    if (at_sym("-")) {
      const Token op = next();
      return Expr{Expr::Kind::Neg, {}, 0, {}, {unary()}, op.line, op.col};
    }
    return power();
  }

  // power := atom ('^' (int | atom))*; an integer exponent is a power, anything else a wedge
  Expr power() {
    Expr lhs = atom();
    while (at_sym("^")) {
      const Token op = next();
      if (peek().kind == Token::Kind::Int) {
        const std::uint64_t k = integer("exponent");
        lhs = Expr{Expr::Kind::Pow, {}, k, {}, {std::move(lhs)}, op.line, op.col};
      } else {
        Expr rhs = atom();
        lhs = Expr{Expr::Kind::Mul, {}, 0, {}, {std::move(lhs), std::move(rhs)}, op.line, op.col};
      }
    }
    return lhs;
  }

  Expr atom() {
    const Token t = peek();
    if (t.kind == Token::Kind::Int) {
      next();
      return Expr{Expr::Kind::Num, Rational(Integer(t.text)), 0, {}, {}, t.line, t.col};
    }
    if (at_sym("(")) {
      next();
      Expr e = expression();
      expect_sym(")");
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      next();
      if (t.text == "dlog") {
        expect_sym("(");
        const std::string v = ident("coordinate");
        expect_sym(")");
        return Expr{Expr::Kind::Dlog, {}, 0, v, {}, t.line, t.col};
      }
      if (is_root_literal(t.text)) {
        const Integer n(t.text.substr(1));
        if (n == 0 || !n.fits_ulong_p()) error("root of unity order must be positive", t);
        return Expr{Expr::Kind::Root, {}, n.get_ui(), {}, {}, t.line, t.col};
      }
      return Expr{Expr::Kind::Name, {}, 0, t.text, {}, t.line, t.col};
    }
    error("expected an expression" + found());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Env env_;
};

inline Script parse(std::string_view src) { return Parser(src).parse(); }

// ---------------------------------------------------------------------------
// Rendering

inline std::string render_rotation(const Rational& q) { return q.get_str(); }

inline std::string render_statement(const Statement& s, std::uint64_t display = 1) {
  struct V {
    std::uint64_t display;
    std::string operator()(const ChartDecl& d) const {
      std::string out = "chart " + d.name + " vars";
      for (const auto& v : d.vars) out += " " + v;
      return out + ";";
    }
    std::string operator()(const DeltaDecl& d) const {
      std::string out = "delta on " + d.chart + " {";
      for (std::size_t i = 0; i < d.entries.size(); ++i)
        out += (i ? ", " : " ") + d.entries[i].first + " : " + render(d.entries[i].second);
      return out + (d.entries.empty() ? "};" : " };");
    }
    std::string operator()(const MapDecl& d) const {
      std::string out = "map " + d.name + " : " + d.source + " -> " + d.target + " {";
      for (std::size_t i = 0; i < d.entries.size(); ++i) {
        const auto& e = d.entries[i];
        out += (i ? ", " : " ") + e.target_var + " = ";
        if (!(e.scalar == Cyclotomic(1))) out += orbidiff::render(e.scalar, display) + " * ";
        out += e.source_var + "^" + std::to_string(e.exponent);
      }
      return out + " };";
    }
    std::string operator()(const FormDecl& d) const {
      return "form " + d.name + " on " + d.chart + " = " + orbidiff::render(d.value, display) + ";";
    }
    std::string operator()(const ActionDecl& d) const {
      std::string out = "action " + d.name + " on " + d.chart + " generators";
      for (std::size_t i = 0; i < d.generators.size(); ++i) {
        out += i ? ", [" : " [";
        for (std::size_t j = 0; j < d.generators[i].size(); ++j) out += (j ? ", " : "") + render_rotation(d.generators[i][j]);
        out += "]";
      }
      return out + ";";
    }
    std::string operator()(const DiagramDecl& d) const {
      std::string out = "diagram " + d.name + " over " + d.base;
      if (d.via) out += " via " + *d.via;
      out += " {";
      if (!d.objects.empty()) {
        out += " objects";
        for (std::size_t i = 0; i < d.objects.size(); ++i) out += (i ? ", " : " ") + d.objects[i];
        out += ";";
      }
      if (!d.arrows.empty()) {
        out += " arrows";
        for (std::size_t i = 0; i < d.arrows.size(); ++i)
          out += (i ? ", " : " ") + d.arrows[i].map + " : " + d.arrows[i].from + " -> " + d.arrows[i].to;
        out += ";";
      }
      return out + " };";
    }
    std::string operator()(const FamilyDecl& d) const {
      std::string out = "family " + d.name + " on " + d.diagram + " degree " + std::to_string(d.degree) + " {";
      for (std::size_t i = 0; i < d.entries.size(); ++i)
        out += (i ? ", " : " ") + d.entries[i].first + " : " + orbidiff::render(d.entries[i].second, display);
      return out + (d.entries.empty() ? "};" : " };");
    }
    std::string operator()(const Command& c) const { return render_command(c) + ";"; }

    static std::string render_command(const Command& c) {
      const Signature* sig = find_signature(c.verb);
      std::string out = "@" + c.verb;
      std::size_t arg = 0;
      for (const auto& slot : sig->slots) {
        if (slot[0] == '$') {
          out += " " + c.args.at(arg++);
        } else if (slot == "degree") {
          out += " degree " + std::to_string(c.degree.value_or(0));
        } else if (slot == "bound?") {
          if (c.bound) out += " bound " + std::to_string(*c.bound);
        } else if (slot == "via?") {
          if (c.via) out += " via " + *c.via;
        } else if (slot == "element") {
          out += " [";
          for (std::size_t i = 0; i < c.element.size(); ++i) out += (i ? ", " : "") + std::to_string(c.element[i]);
          out += "]";
        } else if (slot == "members") {
          for (std::size_t i = 0; i < c.members.size(); ++i) {
            out += (i ? ", " : " ") + c.members[i].map;
            if (!c.members[i].away.empty()) {
              out += " away";
              for (const auto& v : c.members[i].away) out += " " + v;
            }
          }
        } else {
          out += " " + slot;
        }
      }
      return out;
    }
  };
  return std::visit(V{display}, s);
}

/// The command as written, without the trailing semicolon.
inline std::string render_command(const Command& c) {
  const std::string s = render_statement(c);
  return s.substr(0, s.size() - 1);
}

inline std::string render_script(const Script& s, std::uint64_t display = 1) {
  std::string out;
  for (const auto& st : s.statements) out += render_statement(st, display) + "\n";
  return out;
}

}  // namespace orbidiff::script
