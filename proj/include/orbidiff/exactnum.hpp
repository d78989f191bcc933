// Exact arithmetic: arbitrary-precision rationals and cyclotomic fields Q(zeta_N).
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace orbidiff {

using Integer = mpz_class;
using Rational = mpq_class;  // gmp keeps it canonical after every operation

/// num/den in lowest terms; mpq_class(num, den) alone does not canonicalize.
inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

/// Dense polynomial with integer coefficients, lowest degree first.
using IntPoly = std::vector<Integer>;

namespace detail {

using QPoly = std::vector<Rational>;

inline void trim(QPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

inline void trim(IntPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Exact division by a monic integer polynomial; throws if the remainder is nonzero.
inline IntPoly divide_exact(IntPoly num, const IntPoly& den) {
  trim(num);
  const std::size_t dd = den.size() - 1;
  if (num.size() < den.size()) {
    if (num.empty()) return {};
    throw std::logic_error("divide_exact: nonzero remainder");
  }
  IntPoly quot(num.size() - dd, 0);
  for (std::size_t i = num.size(); i-- > dd;) {
    const Integer c = num[i];
    if (c == 0) continue;
    quot[i - dd] = c;
    for (std::size_t j = 0; j <= dd; ++j) num[i - dd + j] -= c * den[j];
  }
  trim(num);
  if (!num.empty()) throw std::logic_error("divide_exact: nonzero remainder");
  return quot;
}

inline IntPoly mul(const IntPoly& a, const IntPoly& b) {
  if (a.empty() || b.empty()) return {};
  IntPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// Quotient and remainder over Q.
inline std::pair<QPoly, QPoly> divmod(QPoly num, const QPoly& den) {
  QPoly quot;
  trim(num);
  const std::size_t dsz = den.size();
  if (num.size() >= dsz) {
    quot.assign(num.size() - dsz + 1, 0);
    const Rational lead = den.back();
    for (std::size_t k = num.size() - dsz + 1; k-- > 0;) {
      const Rational c = num[k + dsz - 1] / lead;
      quot[k] = c;
      if (c != 0)
        for (std::size_t j = 0; j < dsz; ++j) num[k + j] -= c * den[j];
    }
  }
  trim(num);
  trim(quot);
  return {std::move(quot), std::move(num)};
}

inline QPoly sub_mul(const QPoly& a, const QPoly& q, const QPoly& b) {
  // a - q*b
  QPoly r = a;
  if (!q.empty() && !b.empty()) {
    r.resize(std::max(r.size(), q.size() + b.size() - 1), 0);
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] -= q[i] * b[j];
  }
  trim(r);
  return r;
}

inline std::uint64_t checked_lcm(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t g = std::gcd(a, b);
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a / g, b, &out)) throw std::overflow_error("conductor overflow");
  return out;
}

}  // namespace detail

/// Phi_N via exact division of t^N - 1 by the cyclotomic polynomials of the proper divisors.
inline const IntPoly& cyclotomic_polynomial(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("cyclotomic_polynomial: N must be positive");
  static std::mutex mu;
  static std::map<std::uint64_t, std::unique_ptr<IntPoly>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return *it->second;
  }
  IntPoly num(n + 1, 0);
  num[0] = -1;
  num[n] = 1;
  IntPoly den{1};
  for (std::uint64_t d = 1; d < n; ++d)
    if (n % d == 0) den = detail::mul(den, cyclotomic_polynomial(d));
  auto phi = std::make_unique<IntPoly>(detail::divide_exact(std::move(num), den));
  std::lock_guard lock(mu);
  auto [it, inserted] = cache.emplace(n, std::move(phi));
  return *it->second;
}

/// Precomputed data for Q(zeta_N): t^j mod Phi_N for every j < N.
struct CyclotomicField {
  std::uint64_t conductor;
  std::size_t degree;
  detail::QPoly modulus;
  std::vector<std::vector<Rational>> powers;

  static std::shared_ptr<const CyclotomicField> get(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("cyclotomic field: conductor must be positive");
    static std::mutex mu;
    static std::map<std::uint64_t, std::shared_ptr<const CyclotomicField>> cache;
    {
      std::lock_guard lock(mu);
      if (auto it = cache.find(n); it != cache.end()) return it->second;
    }
    auto field = std::make_shared<CyclotomicField>();
    field->conductor = n;
    const IntPoly& phi = cyclotomic_polynomial(n);
    field->degree = phi.size() - 1;
    for (const auto& c : phi) field->modulus.emplace_back(c);
    const std::size_t deg = field->degree;
    field->powers.reserve(n);
    std::vector<Rational> cur(deg, 0);
    cur[0] = 1;
    for (std::uint64_t j = 0; j < n; ++j) {
      field->powers.push_back(cur);
      // multiply by t, then reduce the t^deg overflow with the monic modulus
      std::vector<Rational> next(deg, 0);
      for (std::size_t i = 0; i + 1 < deg; ++i) next[i + 1] = cur[i];
      const Rational top = cur[deg - 1];
      if (top != 0)
        for (std::size_t i = 0; i < deg; ++i) next[i] -= top * field->modulus[i];
      cur = std::move(next);
    }
    std::lock_guard lock(mu);
    auto [it, inserted] = cache.emplace(n, std::move(field));
    return it->second;
  }
};

/// An element of Q(zeta_N) in the power basis modulo Phi_N.
///
/// Binary operations on operands of different conductors lift both sides to
/// the lcm conductor first, so values from separate computations combine
/// without bookkeeping. Equality is field equality, independent of the
/// conductor an element happens to be stored at.
class Cyclotomic {
 public:
  Cyclotomic() : Cyclotomic(Rational(0)) {}
  Cyclotomic(const Rational& r, std::uint64_t conductor = 1)  // NOLINT: implicit from Q
      : field_(CyclotomicField::get(conductor)), coords_(field_->degree, 0) {
    coords_[0] = r;
  }
  Cyclotomic(long v) : Cyclotomic(Rational(v)) {}  // NOLINT
  Cyclotomic(int v) : Cyclotomic(Rational(v)) {}   // NOLINT

  static Cyclotomic from_coords(std::uint64_t conductor, std::vector<Rational> coords) {
    Cyclotomic out(Rational(0), conductor);
    if (coords.size() != out.coords_.size())
      throw std::invalid_argument("Cyclotomic: coordinate count must equal the totient of N");
    out.coords_ = std::move(coords);
    return out;
  }

  /// zeta_N^k.
  static Cyclotomic root_of_unity(std::int64_t k, std::uint64_t n) {
    Cyclotomic out(Rational(0), n);
    const auto nn = static_cast<std::int64_t>(n);
    const auto j = static_cast<std::uint64_t>(((k % nn) + nn) % nn);
    out.coords_ = out.field_->powers[j];
    return out;
  }

  std::uint64_t conductor() const { return field_->conductor; }
  std::span<const Rational> coords() const { return coords_; }

  bool is_zero() const {
    for (const auto& c : coords_)
      if (c != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (std::size_t i = 1; i < coords_.size(); ++i)
      if (coords_[i] != 0) return false;
    return true;
  }
  /// Valid when is_rational().
  const Rational& rational_part() const { return coords_[0]; }

  /// The same element expressed at conductor m; the current conductor must divide m.
  Cyclotomic embed(std::uint64_t m) const {
    const std::uint64_t n = conductor();
    if (m == 0 || m % n != 0) throw std::invalid_argument("embed: conductor must divide target");
    if (m == n) return *this;
    Cyclotomic out(Rational(0), m);
    const std::uint64_t step = m / n;
    for (std::size_t j = 0; j < coords_.size(); ++j) {
      if (coords_[j] == 0) continue;
      const auto& pw = out.field_->powers[(j * step) % m];
      for (std::size_t i = 0; i < pw.size(); ++i)
        if (pw[i] != 0) out.coords_[i] += coords_[j] * pw[i];
    }
    return out;
  }

  Cyclotomic operator-() const {
    Cyclotomic out = *this;
    for (auto& c : out.coords_) c = -c;
    return out;
  }

  friend Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b) {
    auto [x, y] = lift(a, b);
    for (std::size_t i = 0; i < x.coords_.size(); ++i) x.coords_[i] += y.coords_[i];
    return x;
  }
  friend Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b) { return a + (-b); }

  friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b) {
    if (a.is_rational()) return b.embed(detail::checked_lcm(a.conductor(), b.conductor())).scaled(a.coords_[0]);
    if (b.is_rational()) return a.embed(detail::checked_lcm(a.conductor(), b.conductor())).scaled(b.coords_[0]);
    auto [x, y] = lift(a, b);
    const auto& field = *x.field_;
    const std::size_t deg = field.degree;
    // raw product has degree <= 2(deg-1) < 2N; fold t^j through t^(j mod N)
    std::vector<Rational> raw(2 * deg - 1, 0);
    for (std::size_t i = 0; i < deg; ++i) {
      if (x.coords_[i] == 0) continue;
      for (std::size_t j = 0; j < deg; ++j)
        if (y.coords_[j] != 0) raw[i + j] += x.coords_[i] * y.coords_[j];
    }
    Cyclotomic out(Rational(0), field.conductor);
    for (std::size_t j = 0; j < raw.size(); ++j) {
      if (raw[j] == 0) continue;
      if (j < deg) {
        out.coords_[j] += raw[j];
        continue;
      }
      const auto& pw = field.powers[j % field.conductor];
      for (std::size_t i = 0; i < deg; ++i)
        if (pw[i] != 0) out.coords_[i] += raw[j] * pw[i];
    }
    return out;
  }

  Cyclotomic scaled(const Rational& r) const {
    Cyclotomic out = *this;
    for (auto& c : out.coords_) c *= r;
    return out;
  }

  /// Multiplicative inverse by the extended Euclidean algorithm modulo Phi_N.
  Cyclotomic inverse() const {
    if (is_zero()) throw std::domain_error("Cyclotomic: inverse of zero");
    if (is_rational()) return Cyclotomic(1 / coords_[0], conductor());
    // invariant: r_i = s_i * x (mod Phi)
    detail::QPoly r0 = field_->modulus, r1(coords_.begin(), coords_.end());
    detail::trim(r1);
    detail::QPoly s0, s1{1};
    while (r1.size() > 1) {
      auto [q, rem] = detail::divmod(r0, r1);
      detail::QPoly s2 = detail::sub_mul(s0, q, s1);
      r0 = std::move(r1);
      r1 = std::move(rem);
      s0 = std::move(s1);
      s1 = std::move(s2);
    }
    // r1 is a nonzero constant since Phi_N is irreducible
    const Rational c = r1.at(0);
    std::vector<Rational> out(coords_.size(), 0);
    auto [q, red] = detail::divmod(s1, field_->modulus);
    for (std::size_t i = 0; i < red.size(); ++i) out[i] = red[i] / c;
    return from_coords(conductor(), std::move(out));
  }

  friend Cyclotomic operator/(const Cyclotomic& a, const Cyclotomic& b) { return a * b.inverse(); }

  Cyclotomic& operator+=(const Cyclotomic& o) { return *this = *this + o; }
  Cyclotomic& operator-=(const Cyclotomic& o) { return *this = *this - o; }
  Cyclotomic& operator*=(const Cyclotomic& o) { return *this = *this * o; }

  Cyclotomic pow(std::int64_t e) const {
    if (e < 0) return inverse().pow(-e);
    Cyclotomic result(Rational(1), conductor()), base = *this;
    auto k = static_cast<std::uint64_t>(e);
    while (k > 0) {
      if (k & 1U) result = result * base;
      k >>= 1U;
      if (k > 0) base = base * base;
    }
    return result;
  }

  /// True when some power equals 1. Roots of unity in Q(zeta_N) have order dividing lcm(2, N).
  bool is_root_of_unity() const {
    if (is_zero()) return false;
    return pow(static_cast<std::int64_t>(detail::checked_lcm(2, conductor()))) == Cyclotomic(1);
  }

  friend bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
    if (a.conductor() == b.conductor()) return a.coords_ == b.coords_;
    if (a.is_rational() && b.is_rational()) return a.coords_[0] == b.coords_[0];
    auto [x, y] = lift(a, b);
    return x.coords_ == y.coords_;
  }

 private:
  static std::pair<Cyclotomic, Cyclotomic> lift(const Cyclotomic& a, const Cyclotomic& b) {
    if (a.conductor() == b.conductor()) return {a, b};
    const std::uint64_t m = detail::checked_lcm(a.conductor(), b.conductor());
    return {a.embed(m), b.embed(m)};
  }

  std::shared_ptr<const CyclotomicField> field_;
  std::vector<Rational> coords_;
};

inline Cyclotomic root_of_unity(std::int64_t k, std::uint64_t n) { return Cyclotomic::root_of_unity(k, n); }

inline Cyclotomic embed(const Cyclotomic& x, std::uint64_t m) { return x.embed(m); }

/// exp(2 pi i q) for a rational q.
inline Cyclotomic root_of_unity(const Rational& q) {
  const Integer& den = q.get_den();
  const Integer num = q.get_num() % den;
  if (!den.fits_ulong_p()) throw std::overflow_error("root_of_unity: order too large");
  return Cyclotomic::root_of_unity(num.get_si(), den.get_ui());
}

/// The fractional part of q, in [0, 1).
inline Rational frac(const Rational& q) {
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return q - Rational(fl);
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// x rewritten in the power basis of Q(zeta_m); x must lie in that subfield.
inline Cyclotomic express_at(const Cyclotomic& x, std::uint64_t m) {
  if (x.conductor() == m) return x;
  const std::uint64_t big = detail::checked_lcm(x.conductor(), m);
  if (big == m) return x.embed(m);
  const Cyclotomic target = x.embed(big);
  const std::size_t rows = target.coords().size();
  const std::size_t cols = Cyclotomic(Rational(0), m).coords().size();
  // augmented system: columns are zeta_m^j = zeta_big^{j big/m}
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(cols + 1, 0));
  for (std::size_t j = 0; j < cols; ++j) {
    const Cyclotomic col = root_of_unity(static_cast<std::int64_t>(j * (big / m)), big);
    for (std::size_t i = 0; i < rows; ++i) a[i][j] = col.coords()[i];
  }
  for (std::size_t i = 0; i < rows; ++i) a[i][cols] = target.coords()[i];
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      const Rational f = a[i][c] / a[r][c];
      for (std::size_t k = c; k <= cols; ++k) a[i][k] -= f * a[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (a[i][cols] != 0) throw std::invalid_argument("express_at: value does not lie in the requested subfield");
  std::vector<Rational> out(cols, 0);
  for (std::size_t i = 0; i < r; ++i) out[pivots[i]] = a[i][cols] / a[i][pivots[i]];
  return Cyclotomic::from_coords(m, std::move(out));
}

/// Smallest d with x in Q(zeta_d): x is fixed by every zeta_N -> zeta_N^k with k = 1 mod d.
inline std::uint64_t minimal_conductor(const Cyclotomic& x) {
  if (x.is_rational()) return 1;
  const std::uint64_t n = x.conductor();
  for (std::uint64_t d = 2; d < n; ++d) {
    if (n % d != 0) continue;
    bool fixed = true;
    for (std::uint64_t k = 1 + d; k < n && fixed; k += d) {
      if (std::gcd(k, n) != 1) continue;
      Cyclotomic image(Rational(0), n);
      for (std::size_t j = 0; j < x.coords().size(); ++j)
        if (x.coords()[j] != 0) image += x.coords()[j] * root_of_unity(static_cast<std::int64_t>(j * k % n), n);
      fixed = image == x;
    }
    if (fixed) return d;
  }
  return n;
}

}  // namespace orbidiff
