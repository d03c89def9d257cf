#pragma once

#include <string>
#include <vector>

#include "orefactor/poly.hpp"

namespace orefactor {

// F[t]/(P) for a monic P. A field when P is irreducible; inversion of a
// zero divisor throws ZeroInverse.
template <class F>
class ExtensionField {
 public:
  using Base = typename F::Elem;
  using Elem = std::vector<Base>;
  static constexpr bool exact = F::exact;

  ExtensionField() = default;
  explicit ExtensionField(const Poly<F>& modulus)
      : f_(modulus.field()), m_(modulus.monic()), k_(modulus.degree()) {
    if (k_ < 1) throw InvalidArgument("extension modulus must have degree >= 1");
  }

  const F& base() const { return f_; }
  const Poly<F>& modulus() const { return m_; }
  int degree() const { return k_; }
  uint64_t characteristic() const { return f_.characteristic(); }

  Elem zero() const { return Elem(k_, f_.zero()); }
  Elem one() const {
    Elem e = zero();
    e[0] = f_.one();
    return e;
  }
  Elem generator() const { return embed(Poly<F>::x(f_)); }
  Elem lift(const Base& a) const {
    Elem e = zero();
    e[0] = a;
    return e;
  }
  bool is_zero(const Elem& a) const {
    for (auto& x : a)
      if (!f_.is_zero(x)) return false;
    return true;
  }
  bool eq(const Elem& a, const Elem& b) const {
    for (int i = 0; i < k_; ++i)
      if (!f_.eq(a[i], b[i])) return false;
    return true;
  }
  // True when a lies in the base field; its value is written to *out.
  bool in_base(const Elem& a, Base* out) const {
    for (int i = 1; i < k_; ++i)
      if (!f_.is_zero(a[i])) return false;
    if (out) *out = a[0];
    return true;
  }

  Elem add(const Elem& a, const Elem& b) const {
    Elem r(k_);
    for (int i = 0; i < k_; ++i) r[i] = f_.add(a[i], b[i]);
    return r;
  }
  Elem sub(const Elem& a, const Elem& b) const {
    Elem r(k_);
    for (int i = 0; i < k_; ++i) r[i] = f_.sub(a[i], b[i]);
    return r;
  }
  Elem neg(const Elem& a) const {
    Elem r(k_);
    for (int i = 0; i < k_; ++i) r[i] = f_.neg(a[i]);
    return r;
  }
  Elem mul(const Elem& a, const Elem& b) const {
    return embed(Poly<F>(f_, a) * Poly<F>(f_, b));
  }
  Elem inv(const Elem& a) const {
    auto [g, s, t] = poly_xgcd(Poly<F>(f_, a), m_);
    if (g.degree() != 0) throw ZeroInverse("non-invertible extension element");
    return embed(s);
  }
  Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }
  Elem pow(const Elem& a, uint64_t e) const {
    Elem r = one(), b = a;
    while (e) {
      if (e & 1) r = mul(r, b);
      e >>= 1;
      if (e) b = mul(b, b);
    }
    return r;
  }
  Elem from_int(int64_t v) const { return lift(f_.from_int(v)); }
  Elem from_integer(const Integer& v) const { return lift(f_.from_integer(v)); }
  Elem from_rational(const Rational& v) const {
    return lift(f_.from_rational(v));
  }
  Elem embed(const Poly<F>& p) const {
    Poly<F> r = p.degree() >= k_ ? p % m_ : p;
    Elem e = zero();
    for (int i = 0; i <= r.degree(); ++i) e[i] = r.coeff(i);
    return e;
  }
  std::string str(const Elem& a) const { return Poly<F>(f_, a).str("t"); }

  bool operator==(const ExtensionField& o) const { return m_ == o.m_; }
  bool operator!=(const ExtensionField& o) const { return !(*this == o); }

 private:
  F f_{};
  Poly<F> m_;
  int k_ = 0;
};

// Field of rational functions F(w), kept reduced with monic denominator.
template <class F>
struct RatFunc {
  Poly<F> num, den;
};

template <class F>
class RatFuncField {
 public:
  using Elem = RatFunc<F>;
  using P = Poly<F>;
  static constexpr bool exact = true;

  RatFuncField() = default;
  explicit RatFuncField(F f) : f_(std::move(f)) {}
  const F& base() const { return f_; }
  uint64_t characteristic() const { return f_.characteristic(); }

  Elem make(P n, P d) const {
    if (d.is_zero()) throw ZeroInverse("rational function with zero denominator");
    if (n.is_zero()) return zero();
    P g = poly_gcd(n, d);
    if (g.degree() > 0) {
      n = n / g;
      d = d / g;
    }
    auto li = f_.inv(d.lead());
    return {n.scaled(li), d.scaled(li)};
  }
  Elem from_poly(const P& p) const { return {p, P::constant(f_, f_.one())}; }
  Elem zero() const { return from_poly(P(f_)); }
  Elem one() const { return from_poly(P::constant(f_, f_.one())); }
  bool is_zero(const Elem& a) const { return a.num.is_zero(); }
  bool eq(const Elem& a, const Elem& b) const {
    return a.num == b.num && a.den == b.den;
  }
  Elem add(const Elem& a, const Elem& b) const {
    if (a.den == b.den) return make(a.num + b.num, a.den);
    return make(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  Elem sub(const Elem& a, const Elem& b) const { return add(a, neg(b)); }
  Elem neg(const Elem& a) const { return {-a.num, a.den}; }
  Elem mul(const Elem& a, const Elem& b) const {
    if (is_zero(a) || is_zero(b)) return zero();
    return make(a.num * b.num, a.den * b.den);
  }
  Elem inv(const Elem& a) const {
    if (is_zero(a)) throw ZeroInverse("inverse of zero rational function");
    return make(a.den, a.num);
  }
  Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }
  Elem derivative(const Elem& a) const {
    return make(a.num.derivative() * a.den - a.num * a.den.derivative(),
                a.den * a.den);
  }
  Elem from_int(int64_t v) const { return from_poly(P::constant(f_, f_.from_int(v))); }
  Elem from_rational(const Rational& v) const {
    return from_poly(P::constant(f_, f_.from_rational(v)));
  }
  std::string str(const Elem& a) const {
    return "(" + a.num.str() + ")/(" + a.den.str() + ")";
  }

 private:
  F f_{};
};

}  // namespace orefactor
