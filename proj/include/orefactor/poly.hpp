#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "orefactor/field.hpp"

namespace orefactor {

// Dense univariate polynomial over a field policy F, trailing zeros trimmed.
template <class F>
class Poly {
 public:
  using Elem = typename F::Elem;

  Poly() = default;
  explicit Poly(F f) : f_(std::move(f)) {}
  Poly(F f, std::vector<Elem> c) : f_(std::move(f)), c_(std::move(c)) {
    trim();
  }

  static Poly constant(const F& f, const Elem& a) { return Poly(f, {a}); }
  static Poly monomial(const F& f, const Elem& a, int k) {
    std::vector<Elem> c(k + 1, f.zero());
    c[k] = a;
    return Poly(f, std::move(c));
  }
  static Poly x(const F& f) { return monomial(f, f.one(), 1); }
  static Poly from_ints(const F& f, const std::vector<int64_t>& v) {
    std::vector<Elem> c;
    c.reserve(v.size());
    for (auto a : v) c.push_back(f.from_int(a));
    return Poly(f, std::move(c));
  }

  const F& field() const { return f_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  size_t size() const { return c_.size(); }
  Elem coeff(int i) const {
    return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : f_.zero();
  }
  const Elem& lead() const { return c_.back(); }
  const std::vector<Elem>& coeffs() const { return c_; }
  std::vector<Elem>& mutable_coeffs() { return c_; }

  void set_coeff(int i, const Elem& a) {
    if (i >= static_cast<int>(c_.size())) c_.resize(i + 1, f_.zero());
    c_[i] = a;
    trim();
  }

  void trim() {
    while (!c_.empty() && f_.is_zero(c_.back())) c_.pop_back();
  }

  int valuation() const {
    for (size_t i = 0; i < c_.size(); ++i)
      if (!f_.is_zero(c_[i])) return static_cast<int>(i);
    return -1;
  }

  Poly operator+(const Poly& o) const {
    std::vector<Elem> r(std::max(c_.size(), o.c_.size()), f_.zero());
    for (size_t i = 0; i < r.size(); ++i) r[i] = f_.add(coeff(i), o.coeff(i));
    return Poly(f_, std::move(r));
  }
  Poly operator-(const Poly& o) const {
    std::vector<Elem> r(std::max(c_.size(), o.c_.size()), f_.zero());
    for (size_t i = 0; i < r.size(); ++i) r[i] = f_.sub(coeff(i), o.coeff(i));
    return Poly(f_, std::move(r));
  }
  Poly operator-() const {
    std::vector<Elem> r(c_);
    for (auto& a : r) a = f_.neg(a);
    return Poly(f_, std::move(r));
  }
  Poly operator*(const Poly& o) const {
    if (c_.empty() || o.c_.empty()) return Poly(f_);
    std::vector<Elem> r(c_.size() + o.c_.size() - 1, f_.zero());
    for (size_t i = 0; i < c_.size(); ++i) {
      if (f_.is_zero(c_[i])) continue;
      for (size_t j = 0; j < o.c_.size(); ++j)
        r[i + j] = f_.add(r[i + j], f_.mul(c_[i], o.c_[j]));
    }
    return Poly(f_, std::move(r));
  }
  Poly scaled(const Elem& a) const {
    std::vector<Elem> r(c_);
    for (auto& x : r) x = f_.mul(x, a);
    return Poly(f_, std::move(r));
  }
  Poly shifted(int k) const {  // multiply by x^k (k >= 0) or drop low terms
    if (c_.empty()) return *this;
    if (k >= 0) {
      std::vector<Elem> r(k, f_.zero());
      r.insert(r.end(), c_.begin(), c_.end());
      return Poly(f_, std::move(r));
    }
    if (-k >= static_cast<int>(c_.size())) return Poly(f_);
    return Poly(f_, std::vector<Elem>(c_.begin() - k, c_.end()));
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  bool operator==(const Poly& o) const {
    if (c_.size() != o.c_.size()) return false;
    for (size_t i = 0; i < c_.size(); ++i)
      if (!f_.eq(c_[i], o.c_[i])) return false;
    return true;
  }
  bool operator!=(const Poly& o) const { return !(*this == o); }

  Elem eval(const Elem& x) const {
    Elem r = f_.zero();
    for (size_t i = c_.size(); i-- > 0;) r = f_.add(f_.mul(r, x), c_[i]);
    return r;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly(f_);
    std::vector<Elem> r(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i)
      r[i - 1] = f_.mul(c_[i], f_.from_int(static_cast<int64_t>(i)));
    return Poly(f_, std::move(r));
  }

  Poly monic() const {
    if (c_.empty()) return *this;
    return scaled(f_.inv(lead()));
  }

  Poly pow(unsigned e) const {
    Poly r = constant(f_, f_.one()), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      e >>= 1;
      if (e) b = b * b;
    }
    return r;
  }

  // Euclidean division; divisor must be nonzero.
  std::pair<Poly, Poly> divmod(const Poly& d) const {
    if (d.is_zero()) throw ZeroInverse("polynomial division by zero");
    if (degree() < d.degree()) return {Poly(f_), *this};
    std::vector<Elem> r(c_);
    std::vector<Elem> q(c_.size() - d.c_.size() + 1, f_.zero());
    Elem li = f_.inv(d.lead());
    int dd = d.degree();
    for (int i = degree(); i >= dd; --i) {
      if (f_.is_zero(r[i])) continue;
      Elem t = f_.mul(r[i], li);
      q[i - dd] = t;
      for (int j = 0; j <= dd; ++j)
        r[i - dd + j] = f_.sub(r[i - dd + j], f_.mul(t, d.c_[j]));
    }
    r.resize(dd);
    return {Poly(f_, std::move(q)), Poly(f_, std::move(r))};
  }
  Poly operator/(const Poly& d) const { return divmod(d).first; }
  Poly operator%(const Poly& d) const { return divmod(d).second; }

  // Composition p(x + s).
  Poly taylor_shift(const Elem& s) const {
    std::vector<Elem> r(c_);
    int n = static_cast<int>(r.size());
    for (int i = 0; i < n; ++i)
      for (int j = n - 2; j >= i; --j) r[j] = f_.add(r[j], f_.mul(s, r[j + 1]));
    return Poly(f_, std::move(r));
  }

  // p(c x)
  Poly scale_arg(const Elem& cst) const {
    std::vector<Elem> r(c_);
    Elem pw = f_.one();
    for (auto& a : r) {
      a = f_.mul(a, pw);
      pw = f_.mul(pw, cst);
    }
    return Poly(f_, std::move(r));
  }

  // x^deg p(1/x) padded to the given degree.
  Poly reversed(int deg) const {
    std::vector<Elem> r(deg + 1, f_.zero());
    for (int i = 0; i <= degree(); ++i) r[deg - i] = c_[i];
    return Poly(f_, std::move(r));
  }

  std::string str(const std::string& var = "w") const {
    if (c_.empty()) return "0";
    std::string s;
    for (size_t i = 0; i < c_.size(); ++i) {
      if (f_.is_zero(c_[i])) continue;
      if (!s.empty()) s += " + ";
      s += "(" + f_.str(c_[i]) + ")";
      if (i >= 1) s += "*" + var;
      if (i >= 2) s += "^" + std::to_string(i);
    }
    return s;
  }

 private:
  F f_{};
  std::vector<Elem> c_;
};

template <class F>
Poly<F> poly_gcd(Poly<F> a, Poly<F> b) {
  while (!b.is_zero()) {
    Poly<F> r = a % b;
    if constexpr (F::exact) {
      // keep rational coefficient growth in check
      if (!r.is_zero()) r = r.monic();
    }
    a = std::move(b);
    b = std::move(r);
  }
  return a.is_zero() ? a : a.monic();
}

// Extended gcd: returns (g, s, t) with s a + t b = g, g monic.
template <class F>
std::tuple<Poly<F>, Poly<F>, Poly<F>> poly_xgcd(const Poly<F>& a,
                                                 const Poly<F>& b) {
  const F& f = a.field();
  Poly<F> r0 = a, r1 = b;
  Poly<F> s0 = Poly<F>::constant(f, f.one()), s1(f);
  Poly<F> t0(f), t1 = Poly<F>::constant(f, f.one());
  while (!r1.is_zero()) {
    auto [q, r] = r0.divmod(r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly<F> s2 = s0 - q * s1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    Poly<F> t2 = t0 - q * t1;
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  auto li = f.inv(r0.lead());
  return {r0.scaled(li), s0.scaled(li), t0.scaled(li)};
}

// Exact division test: returns true and sets q when d | p.
template <class F>
bool poly_divides(const Poly<F>& d, const Poly<F>& p, Poly<F>* q = nullptr) {
  auto [qq, r] = p.divmod(d);
  if (!r.is_zero()) return false;
  if (q) *q = std::move(qq);
  return true;
}

// Newton interpolation through (xs[i], ys[i]); xs pairwise distinct.
template <class F>
Poly<F> interpolate(const F& f, const std::vector<typename F::Elem>& xs,
                    std::vector<typename F::Elem> ys) {
  const size_t n = xs.size();
  for (size_t k = 1; k < n; ++k)
    for (size_t i = n - 1; i >= k; --i)
      ys[i] = f.div(f.sub(ys[i], ys[i - 1]), f.sub(xs[i], xs[i - k]));
  Poly<F> r(f);
  for (size_t i = n; i-- > 0;)
    r = r * Poly<F>(f, {f.neg(xs[i]), f.one()}) + Poly<F>::constant(f, ys[i]);
  return r;
}

using PolyQ = Poly<RationalField>;
using PolyP = Poly<PrimeContext>;

// Helpers specific to rational polynomials.
Integer poly_content_lcm_den(const PolyQ& p);  // lcm of denominators
PolyQ primitive_integer(const PolyQ& p);        // integer, content 1, lead > 0
PolyP reduce_poly(const PolyQ& p, const PrimeContext& ctx);

}  // namespace orefactor
