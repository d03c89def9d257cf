#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orefactor/diffop.hpp"
#include "orefactor/extfield.hpp"
#include "orefactor/linalg.hpp"
#include "orefactor/polyroots.hpp"

namespace orefactor {

template <class F>
struct Point {
  enum class Kind { Finite, Infinity, Root };
  Kind kind = Kind::Finite;
  typename F::Elem value{};  // Finite
  Poly<F> poly;              // Root: any root of this irreducible polynomial

  static Point at(const typename F::Elem& v) { return {Kind::Finite, v, {}}; }
  static Point infinity() { return {Kind::Infinity, {}, {}}; }
  static Point root_of(const Poly<F>& p) {
    Point pt;
    pt.kind = Kind::Root;
    pt.poly = p;
    return pt;
  }
};

// Local theta-form at a point: x^-v L = sum_k x^k R_k(theta_x).
template <class K>
struct LocalOperator {
  K field;
  int order = 0;
  std::vector<Poly<K>> R;
  bool complete = true;  // R_k = 0 past R.size()

  Poly<K> rk(int k) const {
    if (k < static_cast<int>(R.size())) return R[k];
    if (!complete) throw InvalidArgument("local expansion truncated too early");
    return Poly<K>(field);
  }
};

namespace detail {

template <class F>
LocalOperator<F> local_from_theta(const DiffOp<F>& L0) {
  DiffOp<F> Lt = strip_w_power(convert_basis(L0, Basis::Theta));
  if (Lt.field().is_zero(Lt.lead().coeff(0)))
    throw IrregularPoint("leading theta coefficient vanishes at the point");
  LocalOperator<F> lo{Lt.field(), Lt.order(), theta_recurrence(Lt), true};
  return lo;
}

// Falling factorial [rho]_i as a polynomial.
template <class K>
Poly<K> falling(const K& k, int i) {
  Poly<K> r = Poly<K>::constant(k, k.one());
  for (int j = 0; j < i; ++j)
    r = r * Poly<K>(k, {k.neg(k.from_int(j)), k.one()});
  return r;
}

template <class F>
int padic_valuation(const Poly<F>& a, const Poly<F>& P) {
  if (a.is_zero()) return 1 << 28;
  int m = 0;
  Poly<F> cur = a, q;
  while (poly_divides(P, cur, &q)) {
    ++m;
    cur = q;
  }
  return m;
}

// Taylor coefficients of a at the root t of K's modulus, orders [0, J).
template <class F>
std::vector<typename ExtensionField<F>::Elem> taylor_at_root(
    const ExtensionField<F>& K, const Poly<F>& a, int J) {
  std::vector<typename ExtensionField<F>::Elem> cur;
  for (auto& c : a.coeffs()) cur.push_back(K.lift(c));
  auto t = K.generator();
  std::vector<typename ExtensionField<F>::Elem> out;
  for (int j = 0; j < J; ++j) {
    if (cur.empty()) {
      out.push_back(K.zero());
      continue;
    }
    // synthetic division by (w - t)
    std::vector<typename ExtensionField<F>::Elem> q(cur.size() > 1 ? cur.size() - 1 : 0);
    auto acc = K.zero();
    for (size_t i = cur.size(); i-- > 0;) {
      acc = K.add(K.mul(acc, t), cur[i]);
      if (i > 0) q[i - 1] = acc;
    }
    out.push_back(acc);
    cur = std::move(q);
  }
  return out;
}

}  // namespace detail

template <class F>
LocalOperator<F> local_operator(const DiffOp<F>& L, const Point<F>& pt) {
  if (pt.kind == Point<F>::Kind::Infinity)
    return detail::local_from_theta(invert_at_infinity(L));
  if (pt.kind == Point<F>::Kind::Finite) {
    if (L.field().is_zero(pt.value)) return detail::local_from_theta(L);
    return detail::local_from_theta(translate(L, pt.value));
  }
  throw InvalidArgument("root-of points need local_operator_ext");
}

// Local operator at a root of the irreducible polynomial P, over F[t]/(P),
// with at least `needed` recurrence polynomials.
template <class F>
LocalOperator<ExtensionField<F>> local_operator_ext(const DiffOp<F>& L,
                                                    const Poly<F>& P, int needed) {
  using K = ExtensionField<F>;
  K k(P);
  DiffOp<F> Ld = convert_basis(L, Basis::Ddw);
  int n = Ld.order();
  int m = detail::padic_valuation(Ld.lead(), k.modulus());
  int J = needed + m + 1;
  std::vector<std::vector<typename K::Elem>> b;
  std::vector<int> val;
  for (int i = 0; i <= n; ++i) {
    b.push_back(detail::taylor_at_root(k, Ld.coeff(i), J));
    int vi = J;
    for (int j = 0; j < J; ++j)
      if (!k.is_zero(b[i][j])) {
        vi = j;
        break;
      }
    val.push_back(vi);
  }
  int v = m - n;
  for (int i = 0; i < n; ++i) v = std::min(v, val[i] - i);
  if (val[n] - n != v) throw IrregularPoint("Newton polygon has a positive slope");
  std::vector<Poly<K>> falls;
  for (int i = 0; i <= n; ++i) falls.push_back(detail::falling(k, i));
  LocalOperator<K> lo{k, n, {}, false};
  for (int kk = 0; kk < needed; ++kk) {
    Poly<K> r(k);
    for (int i = 0; i <= n; ++i) {
      int idx = kk + v + i;
      if (idx < 0) continue;
      if (idx >= J) throw InvalidArgument("local expansion too short");
      if (k.is_zero(b[i][idx])) continue;
      r += falls[i].scaled(b[i][idx]);
    }
    lo.R.push_back(r);
  }
  return lo;
}

template <class F>
struct ExponentMultiset {
  std::vector<std::pair<typename F::Elem, int>> exponents;  // ascending
  std::vector<std::pair<Poly<F>, int>> nonlinear;           // irreducible factors
  int total() const {
    int t = 0;
    for (auto& e : exponents) t += e.second;
    for (auto& f : nonlinear) t += f.first.degree() * f.second;
    return t;
  }
};

inline ExponentMultiset<RationalField> exponents_of(const PolyQ& ind) {
  ExponentMultiset<RationalField> em;
  auto rr = rational_roots(ind);
  em.exponents = rr.roots;
  em.nonlinear = rr.remaining;
  return em;
}

inline ExponentMultiset<PrimeContext> exponents_of(const PolyP& ind) {
  ExponentMultiset<PrimeContext> em;
  for (auto& fm : factor_mod_p(ind)) {
    if (fm.factor.degree() == 1)
      em.exponents.push_back({ind.field().neg(fm.factor.coeff(0)), fm.multiplicity});
    else
      em.nonlinear.push_back({fm.factor, fm.multiplicity});
  }
  std::sort(em.exponents.begin(), em.exponents.end());
  return em;
}

// Indicial polynomial (monic) at a point; for root-of points its
// coefficients must lie in the base field.
template <class F>
Poly<F> indicial_polynomial(const DiffOp<F>& L, const Point<F>& pt) {
  if (pt.kind != Point<F>::Kind::Root) {
    auto lo = local_operator(L, pt);
    return lo.R[0].monic();
  }
  auto lo = local_operator_ext(L, pt.poly, 1);
  auto r0 = lo.R[0].monic();
  std::vector<typename F::Elem> c;
  for (auto& a : r0.coeffs()) {
    typename F::Elem x;
    if (!lo.field.in_base(a, &x))
      throw InvalidArgument("indicial polynomial is not defined over the base field");
    c.push_back(x);
  }
  return Poly<F>(L.field(), std::move(c));
}

template <class F>
ExponentMultiset<F> local_exponents(const DiffOp<F>& L, const Point<F>& pt) {
  return exponents_of(indicial_polynomial(L, pt));
}

// Integer difference b - a when it is a small non-negative integer.
inline bool int_offset(const RationalField&, const Rational& a, const Rational& b,
                       int* d, int bound = 1 << 20) {
  Rational diff = b - a;
  if (diff.get_den() != 1 || diff < 0 || diff > bound) return false;
  *d = static_cast<int>(diff.get_num().get_si());
  return true;
}
inline bool int_offset(const PrimeContext& f, uint32_t a, uint32_t b, int* d,
                       int bound = 1000) {
  uint32_t diff = f.sub(b, a);
  uint32_t lim = std::min<uint32_t>(bound, f.modulus() / 4);
  if (diff > lim) return false;
  *d = static_cast<int>(diff);
  return true;
}

template <class E>
struct LogBlock {
  E leading;                           // exponent of the top-log series
  int max_log = 0;
  std::vector<std::optional<E>> attach;  // for log^max_log ... log^0
};

template <class E>
struct LogStructure {
  std::vector<LogBlock<E>> blocks;
  int solutions() const {
    int s = 0;
    for (auto& b : blocks) s += b.max_log + 1;
    return s;
  }
  int max_log() const {
    int m = 0;
    for (auto& b : blocks) m = std::max(m, b.max_log);
    return m;
  }
};

namespace detail {

// Solution space of one exponent class e + {0..M} for the local operator.
// Unknown (m, l) maps to column m*(Lmax+1) + l; solution y = sum c_{m,l}
// x^(e+m) log^l / l!.
template <class K>
struct ClassSolutions {
  int M = 0, Lmax = 0;
  std::vector<std::vector<typename K::Elem>> basis;
  int col(int m, int l) const { return m * (Lmax + 1) + l; }
};

template <class K>
ClassSolutions<K> solve_class(const LocalOperator<K>& lo, const typename K::Elem& e,
                              int M, int mult) {
  const K& k = lo.field;
  ClassSolutions<K> cs;
  cs.M = M;
  cs.Lmax = mult - 1;
  int L1 = cs.Lmax + 1;
  int N = (M + 1) * L1;
  Matrix<K> A;
  // taylor tables of R_j at e + m - j
  for (int m = 0; m <= M; ++m) {
    std::vector<std::vector<typename K::Elem>> rows(L1, std::vector<typename K::Elem>(N, k.zero()));
    for (int j = 0; j <= m; ++j) {
      Poly<K> Rj = lo.rk(j);
      if (Rj.is_zero()) continue;
      Poly<K> sh = Rj.taylor_shift(k.add(e, k.from_int(m - j)));
      for (int l = 0; l < L1; ++l)
        for (int t = 0; l + t < L1; ++t) {
          auto c = sh.coeff(t);
          if (k.is_zero(c)) continue;
          int cc = cs.col(m - j, l + t);
          rows[l][cc] = k.add(rows[l][cc], c);
        }
    }
    for (auto& r : rows) A.push_back(std::move(r));
  }
  cs.basis = nullspace(k, A, N);
  return cs;
}

}  // namespace detail

// Classes: (base exponent, (max offset M, total multiplicity)).
template <class K>
LogStructure<typename K::Elem> log_structure_local(
    const LocalOperator<K>& lo,
    const std::vector<std::pair<typename K::Elem, std::pair<int, int>>>& classes_in) {
  using E = typename K::Elem;
  const K& k = lo.field;
  LogStructure<E> out;
  const int extra = 8;
  for (auto& [e, mm] : classes_in) {
    auto [M, mult] = mm;
    int Mt = M + extra;
    auto cs = detail::solve_class(lo, e, Mt, mult);
    int L1 = cs.Lmax + 1;
    int N = (Mt + 1) * L1;
    auto logdeg = [&](const std::vector<E>& v) {
      int d = -1;
      for (int m = 0; m <= Mt; ++m)
        for (int l = 0; l < L1; ++l)
          if (!k.is_zero(v[cs.col(m, l)])) d = std::max(d, l);
      return d;
    };
    auto val_l = [&](const std::vector<E>& v, int l) -> int {
      for (int m = 0; m <= Mt; ++m)
        if (!k.is_zero(v[cs.col(m, l)])) return m;
      return -1;
    };
    // W_j = solutions with log degree < j, as row-reduced bases in the
    // column order (l desc, m asc).
    std::vector<int> order;  // permuted column order
    for (int l = L1 - 1; l >= 0; --l)
      for (int m = 0; m <= Mt; ++m) order.push_back(cs.col(m, l));
    auto canonical = [&](std::vector<std::vector<E>> vecs) {
      Matrix<K> A;
      for (auto& v : vecs) {
        std::vector<E> r(N);
        for (int i = 0; i < N; ++i) r[i] = v[order[i]];
        A.push_back(std::move(r));
      }
      auto piv = rref(k, A, N);
      std::vector<std::vector<E>> res;
      for (size_t i = 0; i < piv.size(); ++i) {
        std::vector<E> v(N);
        for (int j = 0; j < N; ++j) v[order[j]] = A[i][j];
        res.push_back(std::move(v));
      }
      return res;
    };
    auto restrict_logdeg = [&](int j) {
      // combinations of the basis with components l >= j vanishing
      int B = static_cast<int>(cs.basis.size());
      Matrix<K> A;
      for (int m = 0; m <= Mt; ++m)
        for (int l = j; l < L1; ++l) {
          std::vector<E> row(B);
          for (int b = 0; b < B; ++b) row[b] = cs.basis[b][cs.col(m, l)];
          A.push_back(std::move(row));
        }
      std::vector<std::vector<E>> res;
      auto coeffs = A.empty() ? std::vector<std::vector<E>>() : nullspace(k, A, B);
      if (A.empty()) {
        for (int b = 0; b < B; ++b) {
          std::vector<E> u(B, k.zero());
          u[b] = k.one();
          coeffs.push_back(u);
        }
      }
      for (auto& a : coeffs) {
        std::vector<E> v(N, k.zero());
        for (int b = 0; b < B; ++b)
          if (!k.is_zero(a[b]))
            for (int i = 0; i < N; ++i) v[i] = k.add(v[i], k.mul(a[b], cs.basis[b][i]));
        res.push_back(std::move(v));
      }
      return canonical(res);
    };
    auto delta = [&](const std::vector<E>& v) {
      std::vector<E> r(N, k.zero());
      for (int m = 0; m <= Mt; ++m)
        for (int l = 0; l + 1 < L1; ++l) r[cs.col(m, l)] = v[cs.col(m, l + 1)];
      return r;
    };
    std::vector<std::vector<std::vector<E>>> W(L1 + 2);
    for (int j = 0; j <= L1; ++j) W[j] = restrict_logdeg(j);
    W[L1 + 1] = W[L1];
    auto rank_of = [&](const std::vector<std::vector<E>>& vs) {
      Matrix<K> A(vs.begin(), vs.end());
      return A.empty() ? 0 : matrix_rank(k, A, N);
    };
    std::vector<LogBlock<E>> blocks;
    for (int len = L1; len >= 1; --len) {
      std::vector<std::vector<E>> span = W[len - 1];
      for (auto& v : W[len + 1]) span.push_back(delta(v));
      int r = rank_of(span);
      for (auto& cand : W[len]) {
        span.push_back(cand);
        int r2 = rank_of(span);
        if (r2 == r) {
          span.pop_back();
          continue;
        }
        r = r2;
        int t = logdeg(cand);
        LogBlock<E> blk;
        blk.max_log = t;
        blk.leading = k.add(e, k.from_int(val_l(cand, t)));
        for (int l = t; l >= 0; --l) {
          int best = val_l(cand, l);
          for (auto& w : W[t]) {
            int vw = val_l(w, l);
            if (vw >= 0 && (best < 0 || vw < best)) best = vw;
          }
          if (best < 0)
            blk.attach.push_back(std::nullopt);
          else
            blk.attach.push_back(k.add(e, k.from_int(best)));
        }
        blocks.push_back(std::move(blk));
      }
    }
    for (auto& b : blocks) out.blocks.push_back(std::move(b));
  }
  return out;
}

// Groups exponents into classes differing by non-negative integers.
template <class F>
std::vector<std::pair<typename F::Elem, std::pair<int, int>>> exponent_classes(
    const F& f, const ExponentMultiset<F>& em) {
  std::vector<std::pair<typename F::Elem, std::pair<int, int>>> classes;
  std::vector<bool> used(em.exponents.size(), false);
  for (size_t i = 0; i < em.exponents.size(); ++i) {
    if (used[i]) continue;
    // find the lowest member of i's class
    size_t base = i;
    for (size_t j = 0; j < em.exponents.size(); ++j) {
      int d;
      if (int_offset(f, em.exponents[j].first, em.exponents[base].first, &d) && d > 0)
        base = j;
    }
    int M = 0, mult = 0;
    for (size_t j = 0; j < em.exponents.size(); ++j) {
      int d;
      if (int_offset(f, em.exponents[base].first, em.exponents[j].first, &d)) {
        used[j] = true;
        M = std::max(M, d);
        mult += em.exponents[j].second;
      }
    }
    classes.push_back({em.exponents[base].first, {M, mult}});
  }
  return classes;
}

template <class F>
LogStructure<typename F::Elem> formal_log_solutions(const DiffOp<F>& L,
                                                    const Point<F>& pt) {
  auto em = local_exponents(L, pt);
  auto classes = exponent_classes(L.field(), em);
  if (pt.kind != Point<F>::Kind::Root) {
    auto lo = local_operator(L, pt);
    return log_structure_local(lo, classes);
  }
  int need = 1;
  for (auto& c : classes) need = std::max(need, c.second.first + 9 + 1);
  auto lo = local_operator_ext(L, pt.poly, need);
  std::vector<std::pair<typename ExtensionField<F>::Elem, std::pair<int, int>>> kc;
  for (auto& c : classes) kc.push_back({lo.field.lift(c.first), c.second});
  auto ls = log_structure_local(lo, kc);
  LogStructure<typename F::Elem> out;
  for (auto& b : ls.blocks) {
    LogBlock<typename F::Elem> nb;
    nb.max_log = b.max_log;
    lo.field.in_base(b.leading, &nb.leading);
    for (auto& a : b.attach) {
      if (!a) {
        nb.attach.push_back(std::nullopt);
      } else {
        typename F::Elem x;
        lo.field.in_base(*a, &x);
        nb.attach.push_back(x);
      }
    }
    out.blocks.push_back(std::move(nb));
  }
  return out;
}

enum class Singularity { Ordinary, Apparent, TrueSingular };

inline const char* singularity_name(Singularity s) {
  switch (s) {
    case Singularity::Ordinary: return "ordinary";
    case Singularity::Apparent: return "apparent";
    default: return "true_singular";
  }
}

template <class F>
bool is_ordinary_point(const DiffOp<F>& L, const Point<F>& pt) {
  if (pt.kind == Point<F>::Kind::Root) {
    DiffOp<F> Ld = convert_basis(L, Basis::Ddw);
    int vn = detail::padic_valuation(Ld.lead(), pt.poly);
    for (int i = 0; i < Ld.order(); ++i)
      if (detail::padic_valuation(Ld.coeff(i), pt.poly) < vn) return false;
    return true;
  }
  DiffOp<F> Ld;
  if (pt.kind == Point<F>::Kind::Infinity)
    Ld = convert_basis(invert_at_infinity(L), Basis::Ddw);
  else
    Ld = translate(L, pt.value);
  int vn = Ld.lead().valuation();
  for (int i = 0; i < Ld.order(); ++i) {
    const auto& c = Ld.coeff(i);
    if (!c.is_zero() && c.valuation() < vn) return false;
  }
  return true;
}

// Exponent as a non-negative integer if it is one (mod p: small residue).
inline bool as_small_int(const RationalField&, const Rational& e, int* out) {
  if (e.get_den() != 1 || e < 0 || e > (1 << 20)) return false;
  *out = static_cast<int>(e.get_num().get_si());
  return true;
}
inline bool as_small_int(const PrimeContext& f, uint32_t e, int* out) {
  if (e > std::min<uint32_t>(1000, f.modulus() / 4)) return false;
  *out = static_cast<int>(e);
  return true;
}

template <class F>
Singularity classify_singularity(const DiffOp<F>& L, const Point<F>& pt) {
  if (is_ordinary_point(L, pt)) return Singularity::Ordinary;
  auto em = local_exponents(L, pt);
  if (!em.nonlinear.empty()) return Singularity::TrueSingular;
  for (auto& [e, m] : em.exponents) {
    int v;
    if (m != 1 || !as_small_int(L.field(), e, &v)) return Singularity::TrueSingular;
  }
  auto ls = formal_log_solutions(L, pt);
  if (ls.max_log() == 0 && ls.solutions() == L.order()) return Singularity::Apparent;
  return Singularity::TrueSingular;
}

}  // namespace orefactor
