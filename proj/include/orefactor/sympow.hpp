#pragma once

#include <map>
#include <vector>

#include "orefactor/diffop.hpp"
#include "orefactor/extfield.hpp"
#include "orefactor/linalg.hpp"

namespace orefactor {

namespace detail {

inline void compositions(int n, int k, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n - 1) {
    cur.push_back(k);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int e = k; e >= 0; --e) {
    cur.push_back(e);
    compositions(n, k - e, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

// Minimal operator for all k-fold products of solutions of L. Works on the
// monomials of degree k in y, y', ..., y^(n-1) over F(w): iterate the
// derivation on y^k until the first linear dependency.
template <class F>
DiffOp<F> symmetric_power(const DiffOp<F>& L0, int k) {
  if (k < 1) throw InvalidArgument("symmetric power needs k >= 1");
  DiffOp<F> L = convert_basis(L0, Basis::Ddw);
  int n = L.order();
  if (n < 1) throw InvalidArgument("symmetric power needs order >= 1");
  const F& f = L.field();
  if (k == 1 || n == 1) {
    if (n == 1) {
      // y' = r y  =>  (y^k)' = k r y^k
      std::vector<Poly<F>> c{L.coeff(0).scaled(f.from_int(k)), L.lead()};
      return primitive_part(DiffOp<F>(f, Basis::Ddw, std::move(c)));
    }
    return primitive_part(L);
  }
  using RF = RatFuncField<F>;
  using RE = typename RF::Elem;
  RF R(f);
  std::vector<std::vector<int>> mons;
  std::vector<int> cur;
  detail::compositions(n, k, cur, mons);
  std::map<std::vector<int>, int> index;
  for (size_t i = 0; i < mons.size(); ++i) index[mons[i]] = static_cast<int>(i);
  int N = static_cast<int>(mons.size());
  std::vector<RE> red(n);  // y^(n) = sum red_c y^(c)
  for (int c = 0; c < n; ++c) red[c] = R.make(-L.coeff(c), L.lead());
  // derivation matrix: column j = derivative of monomial j
  Matrix<RF> Dm(N, std::vector<RE>(N, R.zero()));
  for (int j = 0; j < N; ++j) {
    const auto& e = mons[j];
    for (int i = 0; i < n; ++i) {
      if (e[i] == 0) continue;
      auto ne = e;
      --ne[i];
      if (i + 1 < n) {
        ++ne[i + 1];
        int t = index[ne];
        Dm[t][j] = R.add(Dm[t][j], R.from_int(e[i]));
      } else {
        for (int c = 0; c < n; ++c) {
          if (R.is_zero(red[c])) continue;
          auto me = ne;
          ++me[c];
          int t = index[me];
          Dm[t][j] = R.add(Dm[t][j], R.mul(R.from_int(e[i]), red[c]));
        }
      }
    }
  }
  std::vector<std::vector<RE>> vs;
  std::vector<RE> v(N, R.zero());
  v[index[mons.front()]] = R.one();  // y^k is the first composition
  vs.push_back(v);
  for (int order = 1; order <= N; ++order) {
    std::vector<RE> nv(N, R.zero());
    for (int r = 0; r < N; ++r) {
      nv[r] = R.derivative(v[r]);
      for (int c = 0; c < N; ++c)
        if (!R.is_zero(Dm[r][c]) && !R.is_zero(v[c]))
          nv[r] = R.add(nv[r], R.mul(Dm[r][c], v[c]));
    }
    v = nv;
    vs.push_back(v);
    Matrix<RF> A(N, std::vector<RE>(vs.size()));
    for (int r = 0; r < N; ++r)
      for (size_t c = 0; c < vs.size(); ++c) A[r][c] = vs[c][r];
    auto ker = nullspace(R, A, static_cast<int>(vs.size()));
    if (ker.empty()) continue;
    auto& kv = ker.front();
    Poly<F> den = Poly<F>::constant(f, f.one());
    for (auto& x : kv)
      if (!R.is_zero(x)) den = den * (x.den / poly_gcd(den, x.den));
    std::vector<Poly<F>> coeffs;
    for (auto& x : kv) coeffs.push_back(R.is_zero(x) ? Poly<F>(f) : x.num * (den / x.den));
    return primitive_part(DiffOp<F>(f, Basis::Ddw, std::move(coeffs)));
  }
  throw InvalidArgument("symmetric power did not close");  // unreachable
}

}  // namespace orefactor
