#include "orefactor/pcurv.hpp"

#include <random>
#include <sstream>

namespace orefactor {

std::string CurvatureReport::str() const {
  std::ostringstream os;
  os << "prime=" << prime << " order=" << order
     << " nilpotent=" << (nilpotent ? "true" : "false");
  if (nilpotent) os << " index=" << index;
  return os.str();
}

int nilpotency_index(const PrimeContext& f, const Matrix<PrimeContext>& M) {
  int n = static_cast<int>(M.size());
  if (mat_is_zero(f, M)) return n == 0 ? 0 : 1;
  Matrix<PrimeContext> P = M;
  for (int k = 2; k <= n; ++k) {
    P = mat_mul(f, P, M);
    if (mat_is_zero(f, P)) return k;
  }
  return 0;
}

Matrix<PrimeContext> p_curvature_at(const OpP& L0, uint32_t w0) {
  const PrimeContext& f = L0.field();
  const uint32_t p = f.modulus();
  OpP L = translate(L0, f.from_int(w0));
  int n = L.order();
  if (n < 1) throw InvalidArgument("p-curvature needs order >= 1");
  const PolyP& an = L.lead();
  if (f.is_zero(an.coeff(0))) throw InvalidArgument("sample point is singular");
  // a_n Y' = At Y, At = a_n * shift + last row (-a_0 .. -a_{n-1})
  int D = 0;
  for (int i = 0; i <= n; ++i) D = std::max(D, L.coeff(i).degree());
  std::vector<Matrix<PrimeContext>> At(D + 1, Matrix<PrimeContext>(n, std::vector<uint32_t>(n, 0)));
  for (int j = 0; j <= D; ++j) {
    for (int r = 0; r + 1 < n; ++r) At[j][r][r + 1] = an.coeff(j);
    for (int c = 0; c < n; ++c) At[j][n - 1][c] = f.neg(L.coeff(c).coeff(j));
  }
  uint32_t inv_a0 = f.inv(an.coeff(0));
  std::vector<Matrix<PrimeContext>> Y;
  Matrix<PrimeContext> I(n, std::vector<uint32_t>(n, 0));
  for (int i = 0; i < n; ++i) I[i][i] = 1;
  Y.push_back(I);
  auto zero = Matrix<PrimeContext>(n, std::vector<uint32_t>(n, 0));
  // rhs(m) = sum_j At_j Y_{m-j} - sum_{j>=1} alpha_j (m+1-j) Y_{m+1-j}
  auto rhs = [&](uint64_t m) {
    Matrix<PrimeContext> S = zero;
    for (int j = 0; j <= D && static_cast<uint64_t>(j) <= m; ++j) {
      const auto& Yk = Y[m - j];
      const auto& Aj = At[j];
      for (int r = 0; r < n; ++r)
        for (int t = 0; t < n; ++t) {
          uint32_t a = Aj[r][t];
          if (!a) continue;
          for (int c = 0; c < n; ++c) S[r][c] = f.add(S[r][c], f.mul(a, Yk[t][c]));
        }
    }
    for (int j = 1; j <= an.degree() && static_cast<uint64_t>(j) <= m + 1; ++j) {
      uint32_t s = f.mul(an.coeff(j), f.from_int(static_cast<int64_t>(m + 1 - j)));
      if (!s) continue;
      const auto& Yk = Y[m + 1 - j];
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) S[r][c] = f.sub(S[r][c], f.mul(s, Yk[r][c]));
    }
    return S;
  };
  for (uint64_t m = 0; m + 2 <= p; ++m) {
    auto S = rhs(m);
    uint32_t sc = f.mul(inv_a0, f.inv(f.from_int(static_cast<int64_t>(m + 1))));
    for (auto& row : S)
      for (auto& x : row) x = f.mul(x, sc);
    Y.push_back(std::move(S));
  }
  auto T = rhs(p - 1);
  // curvature = -T / a_n(w0)
  uint32_t sc = f.neg(inv_a0);
  for (auto& row : T)
    for (auto& x : row) x = f.mul(x, sc);
  return T;
}

Matrix<RatFuncField<PrimeContext>> p_curvature_matrix(const OpP& L0) {
  const PrimeContext& f = L0.field();
  RatFuncField<PrimeContext> R(f);
  OpP L = convert_basis(L0, Basis::Ddw);
  int n = L.order();
  if (n < 1) throw InvalidArgument("p-curvature needs order >= 1");
  using M = Matrix<RatFuncField<PrimeContext>>;
  M A(n, std::vector<RatFunc<PrimeContext>>(n, R.zero()));
  for (int r = 0; r + 1 < n; ++r) A[r][r + 1] = R.one();
  for (int c = 0; c < n; ++c) A[n - 1][c] = R.make(-L.coeff(c), L.lead());
  M cur = A;
  for (uint32_t k = 1; k < f.modulus(); ++k) {
    M nxt = mat_mul(R, cur, A);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) nxt[r][c] = R.add(nxt[r][c], R.derivative(cur[r][c]));
    cur = std::move(nxt);
  }
  return cur;
}

CurvatureReport p_curvature(const OpP& L0, int samples, uint64_t seed) {
  const PrimeContext& f = L0.field();
  OpP L = convert_basis(L0, Basis::Ddw);
  CurvatureReport rep;
  rep.prime = f.modulus();
  rep.order = L.order();
  std::mt19937_64 rng(seed ^ (uint64_t(f.modulus()) * 0x9e3779b97f4a7c15ULL));
  int worst = 1;
  int done = 0, attempts = 0;
  while (done < samples) {
    if (++attempts > 50 * samples) throw DegenerateSamples("no ordinary sample points");
    uint32_t w0 = static_cast<uint32_t>(rng() % f.modulus());
    if (f.is_zero(L.lead().eval(w0))) continue;
    int k = nilpotency_index(f, p_curvature_at(L, w0));
    ++done;
    if (k == 0) {
      rep.nilpotent = false;
      rep.index = 0;
      return rep;
    }
    worst = std::max(worst, k);
  }
  rep.nilpotent = true;
  rep.index = worst;
  return rep;
}

CurvatureReport p_curvature(const OpQ& L, uint32_t p, int samples) {
  PrimeContext ctx(p);
  return p_curvature(reduce_op(L, ctx), samples);
}

}  // namespace orefactor
