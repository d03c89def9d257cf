#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "orefactor/field.hpp"
#include "orefactor/poly.hpp"

namespace orefactor {

// Truncated power series sum_{k} c[k] w^(valuation + k). Coefficients below
// the valuation are zero; coefficients past the stored window are unknown.
template <class F>
class Series {
 public:
  using Elem = typename F::Elem;

  Series() = default;
  Series(F f, int valuation, std::vector<Elem> c)
      : f_(std::move(f)), v_(valuation), c_(std::move(c)) {}
  static Series zeros(const F& f, int valuation, int len) {
    return Series(f, valuation, std::vector<Elem>(len, f.zero()));
  }

  const F& field() const { return f_; }
  int valuation() const { return v_; }
  int length() const { return static_cast<int>(c_.size()); }
  int end() const { return v_ + length(); }  // first unknown exponent
  const std::vector<Elem>& coeffs() const { return c_; }
  std::vector<Elem>& mutable_coeffs() { return c_; }

  // Coefficient of w^k; k must be below end().
  Elem at(int k) const {
    if (k < v_) return f_.zero();
    if (k >= end()) throw InvalidArgument("coefficient past the series window");
    return c_[k - v_];
  }

  bool is_zero() const {
    for (auto& a : c_)
      if (!f_.is_zero(a)) return false;
    return true;
  }
  // Index of the first nonzero coefficient, or end() when none.
  int first_nonzero() const {
    for (size_t i = 0; i < c_.size(); ++i)
      if (!f_.is_zero(c_[i])) return v_ + static_cast<int>(i);
    return end();
  }

  Series truncated(int new_end) const {
    int len = std::max(0, std::min(length(), new_end - v_));
    return Series(f_, v_, std::vector<Elem>(c_.begin(), c_.begin() + len));
  }
  // Re-express with a lower valuation (pads known zeros).
  Series with_valuation(int v) const {
    if (v > v_) {
      for (int k = v_; k < std::min(v, end()); ++k)
        if (!f_.is_zero(at(k)))
          throw InvalidArgument("raising valuation over nonzero terms");
      int len = std::max(0, end() - v);
      std::vector<Elem> c(len);
      for (int k = v; k < end(); ++k) c[k - v] = at(k);
      return Series(f_, v, std::move(c));
    }
    std::vector<Elem> c(v_ - v, f_.zero());
    c.insert(c.end(), c_.begin(), c_.end());
    return Series(f_, v, std::move(c));
  }
  // Multiply by w^k.
  Series shifted(int k) const { return Series(f_, v_ + k, c_); }

  Series operator+(const Series& o) const { return combine(o, f_.one()); }
  Series operator-(const Series& o) const { return combine(o, f_.neg(f_.one())); }
  Series scaled(const Elem& a) const {
    std::vector<Elem> c(c_);
    for (auto& x : c) x = f_.mul(x, a);
    return Series(f_, v_, std::move(c));
  }
  // this + a*o on the common window.
  Series combine(const Series& o, const Elem& a) const {
    int v = std::min(v_, o.v_);
    int e = std::min(end(), o.end());
    std::vector<Elem> c(std::max(0, e - v), f_.zero());
    for (int k = v; k < e; ++k) c[k - v] = f_.add(at(k), f_.mul(a, o.at(k)));
    return Series(f_, v, std::move(c));
  }

  // Truncated product; the result window is limited by both relative
  // precisions.
  Series operator*(const Series& o) const {
    int len = std::min(length(), o.length());
    std::vector<Elem> c(len, f_.zero());
    for (int i = 0; i < len; ++i) {
      if (f_.is_zero(c_[i])) continue;
      for (int j = 0; i + j < len; ++j)
        c[i + j] = f_.add(c[i + j], f_.mul(c_[i], o.c_[j]));
    }
    return Series(f_, v_ + o.v_, std::move(c));
  }
  Series mul_poly(const Poly<F>& p) const {
    std::vector<Elem> c(c_.size(), f_.zero());
    for (size_t i = 0; i < c_.size(); ++i) {
      if (f_.is_zero(c_[i])) continue;
      for (int j = 0; j <= p.degree() && i + j < c_.size(); ++j)
        c[i + j] = f_.add(c[i + j], f_.mul(c_[i], p.coeff(j)));
    }
    return Series(f_, v_, std::move(c));
  }
  // Division by a polynomial with nonzero constant term.
  Series div_poly(const Poly<F>& p) const {
    if (p.is_zero() || f_.is_zero(p.coeff(0)))
      throw ZeroInverse("series division by a polynomial vanishing at 0");
    auto inv0 = f_.inv(p.coeff(0));
    std::vector<Elem> c(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) {
      Elem acc = c_[i];
      for (int j = 1; j <= p.degree() && j <= static_cast<int>(i); ++j)
        acc = f_.sub(acc, f_.mul(p.coeff(j), c[i - j]));
      c[i] = f_.mul(acc, inv0);
    }
    return Series(f_, v_, std::move(c));
  }

  bool operator==(const Series& o) const {
    if (v_ != o.v_ || c_.size() != o.c_.size()) return false;
    for (size_t i = 0; i < c_.size(); ++i)
      if (!f_.eq(c_[i], o.c_[i])) return false;
    return true;
  }

 private:
  F f_{};
  int v_ = 0;
  std::vector<Elem> c_;
};

using SeriesQ = Series<RationalField>;
using SeriesP = Series<PrimeContext>;

SeriesP reduce_series(const SeriesQ& s, const PrimeContext& ctx);

template <class F>
Series<F> linear_combine(const std::vector<Series<F>>& list,
                         const std::vector<typename F::Elem>& coeffs) {
  if (list.empty() || list.size() != coeffs.size())
    throw InvalidArgument("linear_combine needs matching non-empty lists");
  const F& f = list[0].field();
  int v = list[0].valuation(), e = list[0].end();
  for (auto& s : list) {
    if (s.field() != f) throw ContextMismatch("series over different fields");
    v = std::min(v, s.valuation());
    e = std::min(e, s.end());
  }
  Series<F> r = Series<F>::zeros(f, v, std::max(0, e - v));
  for (size_t i = 0; i < list.size(); ++i) r = r.combine(list[i], coeffs[i]);
  return r.truncated(e);
}

// Series with free parameters: base + sum value_k * directions[k].
template <class F>
struct ParametricSeries {
  Series<F> base;
  std::vector<std::pair<std::string, Series<F>>> directions;

  size_t num_params() const { return directions.size(); }
  Series<F> instantiate(const std::vector<typename F::Elem>& values) const {
    if (values.size() != directions.size())
      throw InvalidArgument("wrong number of parameter values");
    Series<F> r = base;
    for (size_t i = 0; i < values.size(); ++i)
      r = r.combine(directions[i].second, values[i]);
    return r;
  }
};

}  // namespace orefactor
