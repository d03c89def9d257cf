#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "orefactor/poly.hpp"
#include "orefactor/series.hpp"

namespace orefactor {

enum class Basis { Theta, Ddw };

inline const char* basis_name(Basis b) { return b == Basis::Theta ? "theta" : "ddw"; }

// L = sum_i c[i](w) * delta^i with delta = w d/dw (Theta) or d/dw (Ddw).
template <class F>
class DiffOp {
 public:
  using Elem = typename F::Elem;
  using P = Poly<F>;

  DiffOp() = default;
  DiffOp(F f, Basis b, std::vector<P> c)
      : f_(std::move(f)), b_(b), c_(std::move(c)) {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    for (auto& p : c_)
      if (p.field() != f_) p = P(f_, p.coeffs());
  }

  const F& field() const { return f_; }
  Basis basis() const { return b_; }
  // order of the zero operator is -1
  int order() const { return static_cast<int>(c_.size()) - 1; }
  int degree() const {
    int d = -1;
    for (auto& p : c_) d = std::max(d, p.degree());
    return d;
  }
  bool is_zero() const { return c_.empty(); }
  P coeff(int i) const { return (i >= 0 && i <= order()) ? c_[i] : P(f_); }
  const P& lead() const { return c_.back(); }
  const std::vector<P>& coeffs() const { return c_; }

  bool operator==(const DiffOp& o) const {
    return b_ == o.b_ && c_ == o.c_;
  }
  bool operator!=(const DiffOp& o) const { return !(*this == o); }

  DiffOp operator+(const DiffOp& o) const {
    check(o);
    std::vector<P> r(std::max(c_.size(), o.c_.size()), P(f_));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) + o.coeff(i);
    return DiffOp(f_, b_, std::move(r));
  }
  DiffOp operator-(const DiffOp& o) const {
    check(o);
    std::vector<P> r(std::max(c_.size(), o.c_.size()), P(f_));
    for (size_t i = 0; i < r.size(); ++i) r[i] = coeff(i) - o.coeff(i);
    return DiffOp(f_, b_, std::move(r));
  }
  // Left multiplication by a polynomial.
  DiffOp left_mul(const P& p) const {
    std::vector<P> r;
    for (auto& c : c_) r.push_back(p * c);
    return DiffOp(f_, b_, std::move(r));
  }
  DiffOp scaled(const Elem& a) const {
    std::vector<P> r;
    for (auto& c : c_) r.push_back(c.scaled(a));
    return DiffOp(f_, b_, std::move(r));
  }

  void check(const DiffOp& o) const {
    if (f_ != o.f_) throw ContextMismatch("operators over different fields");
    if (b_ != o.b_) throw ContextMismatch("operators in different bases");
  }

  std::string str() const {
    std::string s;
    const char* d = b_ == Basis::Theta ? "theta" : "D";
    for (int i = order(); i >= 0; --i) {
      if (c_[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += "[" + c_[i].str() + "]";
      if (i >= 1) s += std::string("*") + d;
      if (i >= 2) s += "^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
  }

 private:
  F f_{};
  Basis b_ = Basis::Theta;
  std::vector<P> c_;
};

using OpQ = DiffOp<RationalField>;
using OpP = DiffOp<PrimeContext>;

// delta^k applied to a polynomial.
template <class F>
Poly<F> apply_derivation(Basis b, const Poly<F>& p, int k) {
  const F& f = p.field();
  if (k == 0) return p;
  if (b == Basis::Ddw) {
    Poly<F> r = p;
    for (int t = 0; t < k && !r.is_zero(); ++t) r = r.derivative();
    return r;
  }
  std::vector<typename F::Elem> c(p.coeffs());
  for (size_t j = 0; j < c.size(); ++j)
    c[j] = f.mul(c[j], f.pow(f.from_int(static_cast<int64_t>(j)), k));
  return Poly<F>(f, std::move(c));
}

template <class F>
std::vector<std::vector<typename F::Elem>> binomials(const F& f, int n) {
  std::vector<std::vector<typename F::Elem>> C(n + 1);
  for (int i = 0; i <= n; ++i) {
    C[i].assign(i + 1, f.one());
    for (int k = 1; k < i; ++k) C[i][k] = f.add(C[i - 1][k - 1], C[i - 1][k]);
  }
  return C;
}

template <class F>
DiffOp<F> convert_basis(const DiffOp<F>& L, Basis target);

template <class F>
DiffOp<F> multiply(const DiffOp<F>& A, const DiffOp<F>& B0) {
  if (A.field() != B0.field())
    throw ContextMismatch("operators over different fields");
  DiffOp<F> B = B0.basis() == A.basis() ? B0 : convert_basis(B0, A.basis());
  const F& f = A.field();
  Basis bs = A.basis();
  if (A.is_zero() || B.is_zero()) return DiffOp<F>(f, bs, {});
  int n = A.order(), m = B.order();
  auto C = binomials(f, n);
  std::vector<Poly<F>> r(n + m + 1, Poly<F>(f));
  for (int j = 0; j <= m; ++j) {
    std::vector<Poly<F>> db(n + 1);
    db[0] = B.coeff(j);
    for (int k = 1; k <= n; ++k) db[k] = apply_derivation(bs, db[k - 1], 1);
    for (int i = 0; i <= n; ++i) {
      if (A.coeff(i).is_zero()) continue;
      for (int k = 0; k <= i; ++k) {
        if (db[k].is_zero()) continue;
        r[i - k + j] += (A.coeff(i) * db[k]).scaled(C[i][k]);
      }
    }
  }
  return DiffOp<F>(f, bs, std::move(r));
}

// Stirling numbers: first kind signed s(i,k) and second kind S(i,k).
template <class F>
std::vector<std::vector<typename F::Elem>> stirling1(const F& f, int n) {
  std::vector<std::vector<typename F::Elem>> s(n + 1,
                                               std::vector<typename F::Elem>(n + 1, f.zero()));
  s[0][0] = f.one();
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= i; ++k)
      s[i][k] = f.sub(s[i - 1][k - 1], f.mul(f.from_int(i - 1), s[i - 1][k]));
  return s;
}

template <class F>
std::vector<std::vector<typename F::Elem>> stirling2(const F& f, int n) {
  std::vector<std::vector<typename F::Elem>> S(n + 1,
                                               std::vector<typename F::Elem>(n + 1, f.zero()));
  S[0][0] = f.one();
  for (int i = 1; i <= n; ++i)
    for (int k = 1; k <= i; ++k)
      S[i][k] = f.add(S[i - 1][k - 1], f.mul(f.from_int(k), S[i - 1][k]));
  return S;
}

// Removes a common factor w^m from all coefficients.
template <class F>
DiffOp<F> strip_w_power(const DiffOp<F>& L) {
  int m = -1;
  for (auto& p : L.coeffs()) {
    if (p.is_zero()) continue;
    int v = p.valuation();
    m = m < 0 ? v : std::min(m, v);
  }
  if (m <= 0) return L;
  std::vector<Poly<F>> r;
  for (auto& p : L.coeffs()) r.push_back(p.shifted(-m));
  return DiffOp<F>(L.field(), L.basis(), std::move(r));
}

template <class F>
DiffOp<F> convert_basis(const DiffOp<F>& L, Basis target) {
  if (L.basis() == target || L.is_zero())
    return DiffOp<F>(L.field(), target, L.coeffs());
  const F& f = L.field();
  int Q = L.order();
  std::vector<Poly<F>> r(Q + 1, Poly<F>(f));
  if (target == Basis::Theta) {
    // D^i = w^-i [theta]_i ; multiply through by w^Q
    auto s = stirling1(f, Q);
    for (int i = 0; i <= Q; ++i) {
      Poly<F> a = L.coeff(i).shifted(Q - i);
      for (int k = 0; k <= i; ++k)
        if (!f.is_zero(s[i][k])) r[k] += a.scaled(s[i][k]);
    }
    return strip_w_power(DiffOp<F>(f, Basis::Theta, std::move(r)));
  }
  // theta^i = sum_k S(i,k) w^k D^k
  auto S = stirling2(f, Q);
  for (int i = 0; i <= Q; ++i)
    for (int k = 0; k <= i; ++k)
      if (!f.is_zero(S[i][k])) r[k] += L.coeff(i).shifted(k).scaled(S[i][k]);
  return DiffOp<F>(f, Basis::Ddw, std::move(r));
}

// Recurrence polynomials P_j(rho) = sum_i a_{ij} rho^i of a theta-form
// operator; L(w^k) = sum_j P_j(k) w^(k+j).
template <class F>
std::vector<Poly<F>> theta_recurrence(const DiffOp<F>& Lt) {
  const F& f = Lt.field();
  int D = Lt.degree();
  std::vector<Poly<F>> P;
  for (int j = 0; j <= D; ++j) {
    std::vector<typename F::Elem> c(Lt.order() + 1, f.zero());
    for (int i = 0; i <= Lt.order(); ++i) c[i] = Lt.coeff(i).coeff(j);
    P.emplace_back(f, std::move(c));
  }
  return P;
}

namespace detail {
// Table val[j][k] = P_j(k) for k in [lo, hi).
template <class F>
struct RecTable {
  std::vector<Poly<F>> P;
  typename F::Elem operator()(int j, int k) const {
    const F& f = P[j].field();
    return P[j].eval(f.from_int(k));
  }
};
}  // namespace detail

template <class F>
Series<F> apply_operator(const DiffOp<F>& L, const Series<F>& S) {
  if (L.field() != S.field()) throw ContextMismatch("operator/series fields differ");
  const F& f = L.field();
  if (L.is_zero()) return Series<F>::zeros(f, S.valuation(), S.length());
  int shift = 0;
  DiffOp<F> Lt = L;
  if (L.basis() == Basis::Ddw) {
    // w^Q L, expressed in theta without stripping
    int Q = L.order();
    auto s = stirling1(f, Q);
    std::vector<Poly<F>> r(Q + 1, Poly<F>(f));
    for (int i = 0; i <= Q; ++i) {
      Poly<F> a = L.coeff(i).shifted(Q - i);
      for (int k = 0; k <= i; ++k)
        if (!f.is_zero(s[i][k])) r[k] += a.scaled(s[i][k]);
    }
    Lt = DiffOp<F>(f, Basis::Theta, std::move(r));
    shift = Q;
  }
  auto P = theta_recurrence(Lt);
  int v = S.valuation(), n = S.length();
  std::vector<typename F::Elem> out(n, f.zero());
  for (int j = 0; j < static_cast<int>(P.size()); ++j) {
    if (P[j].is_zero()) continue;
    for (int idx = j; idx < n; ++idx) {
      int k = v + idx - j;
      const auto& s = S.coeffs()[idx - j];
      if (f.is_zero(s)) continue;
      out[idx] = f.add(out[idx], f.mul(P[j].eval(f.from_int(k)), s));
    }
  }
  Series<F> r(f, v - shift, std::move(out));
  if (r.valuation() < 0) {
    int drop = -r.valuation();
    std::vector<typename F::Elem> c(r.coeffs().begin() + std::min(drop, r.length()),
                                    r.coeffs().end());
    r = Series<F>(f, 0, std::move(c));
  }
  return r;
}

// Unique series solution extending the seed (exponent -> value). n is the
// number of coefficients generated starting at the lowest seed exponent.
template <class F>
Series<F> series_from_ode(const DiffOp<F>& L,
                          const std::map<int, typename F::Elem>& seed, int n) {
  const F& f = L.field();
  if (seed.empty()) throw InvalidArgument("empty seed");
  if (f.characteristic() != 0 && static_cast<uint64_t>(n) > f.characteristic())
    throw InvalidArgument("series length exceeds the prime");
  DiffOp<F> Lt = strip_w_power(convert_basis(L, Basis::Theta));
  auto P = theta_recurrence(Lt);
  int J = static_cast<int>(P.size());
  int v = seed.begin()->first;
  std::vector<typename F::Elem> c(n, f.zero());
  for (int idx = 0; idx < n; ++idx) {
    int k = v + idx;
    typename F::Elem rhs = f.zero();
    for (int j = 1; j < J && j <= idx; ++j) {
      if (P[j].is_zero() || f.is_zero(c[idx - j])) continue;
      rhs = f.sub(rhs, f.mul(P[j].eval(f.from_int(k - j)), c[idx - j]));
    }
    auto lead = P[0].eval(f.from_int(k));
    auto it = seed.find(k);
    if (f.is_zero(lead)) {
      if (!f.is_zero(rhs))
        throw RecurrenceSingularIndex("no power series solution past index " +
                                      std::to_string(k) + " (log term forced)");
      if (it == seed.end())
        throw RecurrenceSingularIndex("recurrence leading coefficient vanishes at " +
                                      std::to_string(k));
      c[idx] = it->second;
    } else {
      c[idx] = f.div(rhs, lead);
      if (it != seed.end() && !f.eq(it->second, c[idx]))
        throw InvalidArgument("seed value at " + std::to_string(k) +
                              " contradicts the recurrence");
    }
  }
  return Series<F>(f, v, std::move(c));
}

template <class F>
struct RightDivision {
  DiffOp<F> quotient;
  DiffOp<F> remainder;
  // multiplier * A = quotient * B + remainder; constant when the division
  // is exact over polynomials.
  Poly<F> multiplier;
};

template <class F>
RightDivision<F> right_divide(const DiffOp<F>& A0, const DiffOp<F>& B0) {
  if (A0.field() != B0.field()) throw ContextMismatch("operators over different fields");
  const F& f = A0.field();
  Basis bs = A0.basis();
  DiffOp<F> B = B0.basis() == bs ? B0 : convert_basis(B0, bs);
  if (B.order() < 1) throw InvalidArgument("right divisor must have order >= 1");
  if (B.lead().is_zero()) throw DivisionDegenerate("leading coefficient vanishes");
  int n = B.order();
  const Poly<F>& b = B.lead();
  bool const_lead = b.degree() == 0;
  DiffOp<F> R = A0;
  std::vector<Poly<F>> q(std::max(1, A0.order() - n + 1), Poly<F>(f));
  Poly<F> mult = Poly<F>::constant(f, f.one());
  while (R.order() >= n) {
    int m = R.order();
    Poly<F> r = R.lead();
    std::vector<Poly<F>> mono(m - n + 1, Poly<F>(f));
    if (const_lead) {
      Poly<F> t = r.scaled(f.inv(b.lead()));
      mono[m - n] = t;
      q[m - n] += t;
      R = R - multiply(DiffOp<F>(f, bs, mono), B);
    } else {
      mono[m - n] = r;
      for (auto& x : q) x = x * b;
      q[m - n] += r;
      mult = mult * b;
      R = R.left_mul(b) - multiply(DiffOp<F>(f, bs, mono), B);
    }
  }
  DiffOp<F> Q(f, bs, q);
  if (!const_lead) {
    Poly<F> g = mult;
    for (auto& c : Q.coeffs()) g = poly_gcd(g, c);
    for (auto& c : R.coeffs()) g = poly_gcd(g, c);
    if (g.degree() > 0) {
      std::vector<Poly<F>> qq, rr;
      for (auto& c : Q.coeffs()) qq.push_back(c / g);
      for (auto& c : R.coeffs()) rr.push_back(c / g);
      Q = DiffOp<F>(f, bs, qq);
      R = DiffOp<F>(f, bs, rr);
      mult = mult / g;
    }
    auto li = f.inv(mult.lead());
    Q = Q.scaled(li);
    R = R.scaled(li);
    mult = mult.scaled(li);
  }
  return {Q, R, mult};
}

// Scalar normalization. Over F_p: leading term of the leading polynomial is
// 1. Over Q: integer coefficients, content 1, that term positive.
template <class F>
DiffOp<F> normalized(const DiffOp<F>& L) {
  if (L.is_zero()) return L;
  const F& f = L.field();
  if constexpr (std::is_same_v<F, RationalField>) {
    Integer l = 1, g = 0;
    for (auto& p : L.coeffs())
      for (auto& a : p.coeffs())
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a.get_den().get_mpz_t());
    for (auto& p : L.coeffs())
      for (auto& a : p.coeffs()) {
        Integer num = Integer(a.get_num() * (l / a.get_den()));
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
      }
    Rational s(l, g);
    s.canonicalize();
    if (L.lead().lead() < 0) s = -s;
    return L.scaled(s);
  } else {
    return L.scaled(f.inv(L.lead().lead()));
  }
}

// Divides out the polynomial gcd of all coefficients, then normalizes.
template <class F>
DiffOp<F> primitive_part(const DiffOp<F>& L) {
  if (L.is_zero()) return L;
  Poly<F> g(L.field());
  for (auto& c : L.coeffs()) g = poly_gcd(g, c);
  if (g.degree() <= 0) return normalized(L);
  std::vector<Poly<F>> r;
  for (auto& c : L.coeffs()) r.push_back(c / g);
  return normalized(DiffOp<F>(L.field(), L.basis(), std::move(r)));
}

// Operator in x = w - s. Result is in the d/dx basis.
template <class F>
DiffOp<F> translate(const DiffOp<F>& L, const typename F::Elem& s) {
  DiffOp<F> Ld = convert_basis(L, Basis::Ddw);
  std::vector<Poly<F>> r;
  for (auto& c : Ld.coeffs()) r.push_back(c.taylor_shift(s));
  return DiffOp<F>(L.field(), Basis::Ddw, std::move(r));
}

// Operator in x = 1/w, theta basis: theta_w = -theta_x.
template <class F>
DiffOp<F> invert_at_infinity(const DiffOp<F>& L) {
  DiffOp<F> Lt = convert_basis(L, Basis::Theta);
  const F& f = L.field();
  int D = Lt.degree();
  std::vector<Poly<F>> r;
  for (int i = 0; i <= Lt.order(); ++i) {
    Poly<F> p = Lt.coeff(i).reversed(D);
    if (i % 2) p = -p;
    r.push_back(p);
  }
  return strip_w_power(DiffOp<F>(f, Basis::Theta, std::move(r)));
}

// Solutions g(v) = f(c v).
template <class F>
DiffOp<F> scale_variable(const DiffOp<F>& L, const typename F::Elem& c) {
  const F& f = L.field();
  if (f.is_zero(c)) throw ZeroScale("scale factor is zero");
  std::vector<Poly<F>> r;
  if (L.basis() == Basis::Theta) {
    for (auto& p : L.coeffs()) r.push_back(p.scale_arg(c));
  } else {
    auto ci = f.inv(c);
    for (int i = 0; i <= L.order(); ++i)
      r.push_back(L.coeff(i).scale_arg(c).scaled(f.pow(ci, i)));
  }
  return DiffOp<F>(f, L.basis(), std::move(r));
}

// Formal adjoint sum (-1)^i D^i a_i, in the d/dw basis.
template <class F>
DiffOp<F> adjoint(const DiffOp<F>& L) {
  DiffOp<F> Ld = convert_basis(L, Basis::Ddw);
  const F& f = L.field();
  DiffOp<F> r(f, Basis::Ddw, {});
  for (int i = 0; i <= Ld.order(); ++i) {
    std::vector<Poly<F>> mono(i + 1, Poly<F>(f));
    mono[i] = Poly<F>::constant(f, (i % 2) ? f.neg(f.one()) : f.one());
    r = r + multiply(DiffOp<F>(f, Basis::Ddw, mono),
                     DiffOp<F>(f, Basis::Ddw, {Ld.coeff(i)}));
  }
  return r;
}

// Operator whose solutions are mu*y for y a solution of L, where
// mu'/mu = num/den. Uses den^(k+1) (D - r)^(k+1) = (den D - num) S_k - k den' S_k.
// The result is the primitive part, in the d/dw basis.
template <class F>
DiffOp<F> gauge_transform(const DiffOp<F>& L, const Poly<F>& num, const Poly<F>& den) {
  if (den.is_zero()) throw InvalidArgument("gauge denominator is zero");
  const F& f = L.field();
  DiffOp<F> Ld = convert_basis(L, Basis::Ddw);
  int n = Ld.order();
  DiffOp<F> U(f, Basis::Ddw, {-num, den});
  Poly<F> dd = den.derivative();
  std::vector<DiffOp<F>> S{DiffOp<F>(f, Basis::Ddw, {Poly<F>::constant(f, f.one())})};
  for (int k = 0; k < n; ++k)
    S.push_back(multiply(U, S[k]) - S[k].left_mul(dd.scaled(f.from_int(k))));
  DiffOp<F> r(f, Basis::Ddw, {});
  Poly<F> dp = Poly<F>::constant(f, f.one());
  for (int i = n; i >= 0; --i) {
    r = r + S[i].left_mul(Ld.coeff(i) * dp);
    dp = dp * den;
  }
  return primitive_part(r);
}

OpP reduce_op(const OpQ& L, const PrimeContext& ctx);

// Operator with integer-valued coefficients given row by row (ascending).
template <class F>
DiffOp<F> make_op(const F& f, Basis b, const std::vector<std::vector<int64_t>>& rows) {
  std::vector<Poly<F>> c;
  for (auto& r : rows) c.push_back(Poly<F>::from_ints(f, r));
  return DiffOp<F>(f, b, std::move(c));
}

}  // namespace orefactor
