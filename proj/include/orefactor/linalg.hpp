#pragma once

#include <vector>

namespace orefactor {

template <class F>
using Matrix = std::vector<std::vector<typename F::Elem>>;

// In-place reduced row echelon form. Pivots are chosen as the leftmost
// column, lowest row index first. Returns pivot columns.
template <class F>
std::vector<int> rref(const F& f, Matrix<F>& a, int ncols) {
  std::vector<int> pivots;
  int rows = static_cast<int>(a.size());
  int r = 0;
  for (int c = 0; c < ncols && r < rows; ++c) {
    int sel = -1;
    for (int i = r; i < rows; ++i)
      if (!f.is_zero(a[i][c])) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(a[r], a[sel]);
    auto inv = f.inv(a[r][c]);
    for (int j = c; j < ncols; ++j) a[r][j] = f.mul(a[r][j], inv);
    for (int i = 0; i < rows; ++i) {
      if (i == r || f.is_zero(a[i][c])) continue;
      auto t = a[i][c];
      for (int j = c; j < ncols; ++j)
        a[i][j] = f.sub(a[i][j], f.mul(t, a[r][j]));
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

// Nullspace basis of a (rows x ncols); one vector per free column with a 1
// there and zeros at the other free columns.
template <class F>
std::vector<std::vector<typename F::Elem>> nullspace(const F& f, Matrix<F> a,
                                                     int ncols) {
  auto piv = rref(f, a, ncols);
  std::vector<bool> is_piv(ncols, false);
  for (int c : piv) is_piv[c] = true;
  std::vector<std::vector<typename F::Elem>> basis;
  for (int c = 0; c < ncols; ++c) {
    if (is_piv[c]) continue;
    std::vector<typename F::Elem> v(ncols, f.zero());
    v[c] = f.one();
    for (size_t r = 0; r < piv.size(); ++r) v[piv[r]] = f.neg(a[r][c]);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class F>
int matrix_rank(const F& f, Matrix<F> a, int ncols) {
  return static_cast<int>(rref(f, a, ncols).size());
}

template <class F>
typename F::Elem determinant(const F& f, Matrix<F> a) {
  int n = static_cast<int>(a.size());
  auto det = f.one();
  for (int c = 0; c < n; ++c) {
    int sel = -1;
    for (int i = c; i < n; ++i)
      if (!f.is_zero(a[i][c])) {
        sel = i;
        break;
      }
    if (sel < 0) return f.zero();
    if (sel != c) {
      std::swap(a[c], a[sel]);
      det = f.neg(det);
    }
    det = f.mul(det, a[c][c]);
    auto inv = f.inv(a[c][c]);
    for (int i = c + 1; i < n; ++i) {
      if (f.is_zero(a[i][c])) continue;
      auto t = f.mul(a[i][c], inv);
      for (int j = c; j < n; ++j) a[i][j] = f.sub(a[i][j], f.mul(t, a[c][j]));
    }
  }
  return det;
}

template <class F>
Matrix<F> mat_mul(const F& f, const Matrix<F>& a, const Matrix<F>& b) {
  size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
  Matrix<F> r(n, std::vector<typename F::Elem>(m, f.zero()));
  for (size_t i = 0; i < n; ++i)
    for (size_t t = 0; t < k; ++t) {
      if (f.is_zero(a[i][t])) continue;
      for (size_t j = 0; j < m; ++j)
        r[i][j] = f.add(r[i][j], f.mul(a[i][t], b[t][j]));
    }
  return r;
}

template <class F>
bool mat_is_zero(const F& f, const Matrix<F>& a) {
  for (auto& row : a)
    for (auto& x : row)
      if (!f.is_zero(x)) return false;
  return true;
}

}  // namespace orefactor
