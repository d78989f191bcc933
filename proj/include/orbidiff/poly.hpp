// Sparse multivariate polynomials over cyclotomic fields.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "orbidiff/exactnum.hpp"

namespace orbidiff {

using Exponent = std::uint64_t;
using ExponentVector = std::vector<Exponent>;

namespace detail {

inline Exponent checked_mul(Exponent a, Exponent b) {
  Exponent out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("exponent overflow");
  return out;
}

inline Exponent checked_add(Exponent a, Exponent b) {
  Exponent out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("exponent overflow");
  return out;
}

inline Exponent total_degree(const ExponentVector& e) {
  Exponent d = 0;
  for (auto x : e) d = checked_add(d, x);
  return d;
}

inline bool dominates(const ExponentVector& e, const ExponentVector& lower) {
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] < lower[i]) return false;
  return true;
}

}  // namespace detail

/// Finite map from exponent vectors to nonzero coefficients. Terms are kept in
/// lexicographic order of their exponent vectors.
class SparsePoly {
 public:
  using Terms = std::map<ExponentVector, Cyclotomic>;

  explicit SparsePoly(std::size_t nvars = 0) : nvars_(nvars) {}

  static SparsePoly constant(std::size_t nvars, const Cyclotomic& c) {
    return monomial(ExponentVector(nvars, 0), c);
  }
  static SparsePoly monomial(ExponentVector e, const Cyclotomic& c = Cyclotomic(1)) {
    SparsePoly p(e.size());
    p.add_term(std::move(e), c);
    return p;
  }
  static SparsePoly variable(std::size_t nvars, std::size_t i) {
    ExponentVector e(nvars, 0);
    e.at(i) = 1;
    return monomial(std::move(e));
  }

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  Cyclotomic coefficient(const ExponentVector& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Cyclotomic(0) : it->second;
  }

  Exponent total_degree() const {
    Exponent d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, detail::total_degree(e));
    return d;
  }

  void add_term(ExponentVector e, const Cyclotomic& c) {
    if (e.size() != nvars_) throw std::invalid_argument("SparsePoly: exponent length mismatch");
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.try_emplace(std::move(e), c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  SparsePoly operator-() const {
    SparsePoly out = *this;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }

  SparsePoly& operator+=(const SparsePoly& o) {
    check_dim(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  SparsePoly& operator-=(const SparsePoly& o) { return *this += -o; }

  friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { return a += b; }
  friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { return a -= b; }

  friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
    a.check_dim(b);
    SparsePoly out(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        ExponentVector e(a.nvars_);
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = detail::checked_add(ea[i], eb[i]);
        out.add_term(std::move(e), ca * cb);
      }
    }
    return out;
  }

  friend SparsePoly operator*(const Cyclotomic& s, const SparsePoly& p) {
    SparsePoly out(p.nvars_);
    if (s.is_zero()) return out;
    for (const auto& [e, c] : p.terms_) out.terms_.emplace(e, s * c);
    return out;
  }

  friend bool operator==(const SparsePoly& a, const SparsePoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  /// y_i -> scalars[i] * w_i^exponents[i].
  SparsePoly substitute_monomial(const std::vector<Cyclotomic>& scalars,
                                 const std::vector<Exponent>& exponents) const {
    if (scalars.size() != nvars_ || exponents.size() != nvars_)
      throw std::invalid_argument("substitute_monomial: dimension mismatch");
    SparsePoly out(nvars_);
    for (const auto& [e, c] : terms_) {
      ExponentVector img(nvars_);
      Cyclotomic coef = c;
      for (std::size_t i = 0; i < nvars_; ++i) {
        img[i] = detail::checked_mul(exponents[i], e[i]);
        if (e[i] != 0) coef *= scalars[i].pow(static_cast<std::int64_t>(e[i]));
      }
      // distinct monomials stay distinct because every exponent is positive
      out.add_term(std::move(img), coef);
    }
    return out;
  }

  /// True iff every stored monomial dominates e entrywise.
  bool divisible_by(const ExponentVector& e) const {
    if (e.size() != nvars_) throw std::invalid_argument("divisible_by: dimension mismatch");
    for (const auto& [m, c] : terms_)
      if (!detail::dominates(m, e)) return false;
    return true;
  }

  /// The quotient q with y^e * q == *this; requires divisible_by(e).
  SparsePoly divide_by_monomial(const ExponentVector& e) const {
    if (!divisible_by(e)) throw std::invalid_argument("divide_by_monomial: not divisible");
    SparsePoly out(nvars_);
    for (const auto& [m, c] : terms_) {
      ExponentVector q(nvars_);
      for (std::size_t i = 0; i < nvars_; ++i) q[i] = m[i] - e[i];
      out.terms_.emplace(std::move(q), c);
    }
    return out;
  }

 private:
  void check_dim(const SparsePoly& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("SparsePoly: variable count mismatch");
  }

  std::size_t nvars_;
  Terms terms_;
};

inline SparsePoly poly_add(const SparsePoly& p, const SparsePoly& q) { return p + q; }
inline SparsePoly poly_mul(const SparsePoly& p, const SparsePoly& q) { return p * q; }
inline SparsePoly poly_substitute_monomial(const SparsePoly& p, const std::vector<Cyclotomic>& scalars,
                                           const std::vector<Exponent>& exponents) {
  return p.substitute_monomial(scalars, exponents);
}
inline bool poly_divisible(const SparsePoly& p, const ExponentVector& e) { return p.divisible_by(e); }

/// All exponent vectors of length n with total degree <= bound, in lexicographic order.
inline std::vector<ExponentVector> exponents_up_to(std::size_t n, Exponent bound) {
  std::vector<ExponentVector> out;
  ExponentVector cur(n, 0);
  auto rec = [&](auto&& self, std::size_t i, Exponent left) -> void {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (Exponent k = 0; k <= left; ++k) {
      cur[i] = k;
      self(self, i + 1, left - k);
    }
    cur[i] = 0;
  };
  rec(rec, 0, bound);
  return out;
}

}  // namespace orbidiff
