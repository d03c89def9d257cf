#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "orefactor/diffop.hpp"
#include "orefactor/linalg.hpp"
#include "orefactor/local.hpp"
#include "orefactor/modarith.hpp"
#include "orefactor/series.hpp"

namespace orefactor {

enum class EllipticKind { K, E };

// W: series in w, argument 16 w^2. X: series in x = w^2, argument 16 x.
enum class EllipticVar { W, X };

inline const char* var_name(EllipticVar v) { return v == EllipticVar::W ? "w" : "x"; }

// Integer coefficients of K and E in t = w^2: binomial(2k,k)^2 and
// -binomial(2k,k)^2 / (2k-1).
inline std::vector<Integer> elliptic_coefficients(EllipticKind which, int n) {
  std::vector<Integer> c;
  Integer b = 1;  // binomial(2k, k)
  for (int k = 0; k < n; ++k) {
    if (k > 0) {
      b *= 2 * (2 * k - 1);
      b /= k;
    }
    if (which == EllipticKind::K) {
      c.push_back(b * b);
    } else {
      Integer t = b * b;
      mpz_divexact_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(std::abs(2 * k - 1)));
      c.push_back(k == 0 ? t : Integer(-t));
    }
  }
  return c;
}

// n coefficients in the chosen variable.
template <class F>
Series<F> elliptic_series(EllipticKind which, int n, const F& f,
                          EllipticVar var = EllipticVar::W) {
  if (n < 0) throw InvalidArgument("negative term count");
  std::vector<typename F::Elem> c(n, f.zero());
  if (var == EllipticVar::X) {
    auto z = elliptic_coefficients(which, n);
    for (int k = 0; k < n; ++k) c[k] = f.from_integer(z[k]);
  } else {
    auto z = elliptic_coefficients(which, (n + 1) / 2);
    for (int k = 0; 2 * k < n; ++k) c[2 * k] = f.from_integer(z[k]);
  }
  return Series<F>(f, 0, std::move(c));
}

// K, E and their products K^(g-i) E^i, computed once.
template <class F>
class EllipticBasis {
 public:
  EllipticBasis(const F& f, int n, int gmax, EllipticVar var = EllipticVar::W)
      : f_(f), n_(n), var_(var) {
    K_ = elliptic_series(EllipticKind::K, n, f, var);
    E_ = elliptic_series(EllipticKind::E, n, f, var);
    std::vector<Series<F>> kp{Series<F>::zeros(f, 0, n)};
    if (n > 0) kp[0].mutable_coeffs()[0] = f.one();
    std::vector<Series<F>> ep = kp;
    for (int g = 1; g <= gmax; ++g) {
      kp.push_back(kp.back() * K_);
      ep.push_back(ep.back() * E_);
    }
    for (int g = 0; g <= gmax; ++g) {
      mono_.emplace_back();
      for (int i = 0; i <= g; ++i) mono_[g].push_back(kp[g - i] * ep[i]);
    }
  }

  const F& field() const { return f_; }
  int length() const { return n_; }
  EllipticVar var() const { return var_; }
  const Series<F>& K() const { return K_; }
  const Series<F>& E() const { return E_; }
  int max_degree() const { return static_cast<int>(mono_.size()) - 1; }
  // K^(g-i) E^i
  const Series<F>& monomial(int g, int i) const { return mono_.at(g).at(i); }

 private:
  F f_;
  int n_;
  EllipticVar var_;
  Series<F> K_, E_;
  std::vector<std::vector<Series<F>>> mono_;
};

template <class F>
struct PrefactorTerm {
  Poly<F> poly;
  int exponent = 0;
};

template <class F>
using Prefactor = std::vector<PrefactorTerm<F>>;

// prefactor * sum_i P[i] K^(g-i) E^i
template <class F>
struct AnsatzSolution {
  int g = 0;
  EllipticVar var = EllipticVar::W;
  Prefactor<F> prefactor;
  std::vector<Poly<F>> P;  // P[i] multiplies K^(g-i) E^i

  std::string str() const {
    std::ostringstream os;
    const char* v = var_name(var);
    os << "degree: " << g << "\n";
    os << "variable: " << v << "\n";
    os << "prefactor:";
    for (auto& t : prefactor) {
      os << " [";
      for (int k = 0; k <= t.poly.degree(); ++k)
        os << (k ? " " : "") << t.poly.field().str(t.poly.coeff(k));
      os << "]^" << t.exponent;
    }
    os << "\n";
    for (int i = 0; i <= g; ++i) {
      os << "P_{" << g - i << "," << i << "}:";
      const auto& p = P[i];
      if (p.is_zero()) os << " 0";
      for (int k = 0; k <= p.degree(); ++k) os << " " << p.field().str(p.coeff(k));
      os << "\n";
    }
    return os.str();
  }
};

namespace detail {

// Series of prod poly^e with n coefficients past its valuation.
template <class F>
Series<F> prefactor_series(const F& f, const Prefactor<F>& pf, int n) {
  std::vector<typename F::Elem> one(n, f.zero());
  if (n > 0) one[0] = f.one();
  Series<F> s(f, 0, std::move(one));
  int val = 0;
  for (auto& t : pf) {
    if (t.poly.is_zero()) throw InvalidArgument("zero polynomial in prefactor");
    int a = t.poly.valuation();
    Poly<F> q = t.poly.shifted(-a);
    val += a * t.exponent;
    for (int e = 0; e < std::abs(t.exponent); ++e)
      s = t.exponent > 0 ? s.mul_poly(q) : s.div_poly(q);
  }
  return s.shifted(val);
}

template <class F>
Series<F> ansatz_series(const EllipticBasis<F>& B, const AnsatzSolution<F>& sol) {
  const F& f = B.field();
  int n = B.length();
  auto pre = prefactor_series(f, sol.prefactor, n);
  Series<F> acc = Series<F>::zeros(f, 0, n);
  for (int i = 0; i <= sol.g; ++i) acc = acc + B.monomial(sol.g, i).mul_poly(sol.P[i]);
  return pre * acc;
}

// Columns phi_{i,j} = pref * x^j * K^(g-i) E^i on the window [v, v+n).
template <class F>
std::vector<Series<F>> ansatz_columns(const EllipticBasis<F>& B, const Prefactor<F>& pf,
                                      int g, int D) {
  const F& f = B.field();
  int n = B.length();
  auto pre = prefactor_series(f, pf, n);
  std::vector<Series<F>> cols;
  for (int i = 0; i <= g; ++i) {
    Series<F> base = pre * B.monomial(g, i);
    int end = base.end();
    for (int j = 0; j <= D; ++j) cols.push_back(base.shifted(j).truncated(end).with_valuation(base.valuation()));
  }
  return cols;
}

template <class F>
AnsatzSolution<F> unpack(const F& f, int g, int D, EllipticVar var, const Prefactor<F>& pf,
                         const std::vector<typename F::Elem>& v) {
  AnsatzSolution<F> s{g, var, pf, {}};
  for (int i = 0; i <= g; ++i) {
    std::vector<typename F::Elem> c(v.begin() + i * (D + 1), v.begin() + (i + 1) * (D + 1));
    s.P.emplace_back(f, std::move(c));
  }
  return s;
}

template <class F>
int ansatz_window(int g, int D, int guard) {
  return (g + 1) * (D + 1) + guard;
}

}  // namespace detail

constexpr int kAnsatzGuard = 40;

// Homogeneous ansatz: all prefactor * sum P_i K^(g-i) E^i annihilated by L
// with deg P_i <= D, for the first D in [0, Dmax] admitting a solution. The
// returned basis is in reduced echelon form over the coefficient vector
// (P_0 low to high, then P_1, ...), so the first nonzero coefficient of the
// first nonzero polynomial of each solution is 1.
template <class F>
std::vector<AnsatzSolution<F>> ansatz_solve(const DiffOp<F>& L, int g,
                                            const Prefactor<F>& pf, int Dmax,
                                            EllipticVar var = EllipticVar::W,
                                            int guard = kAnsatzGuard) {
  if (g < 0 || Dmax < 0) throw InvalidArgument("negative ansatz degree");
  if (L.is_zero()) throw InvalidArgument("ansatz against the zero operator");
  const F& f = L.field();
  DiffOp<F> Lt = convert_basis(L, Basis::Theta);
  int n = detail::ansatz_window<F>(g, Dmax, guard);
  EllipticBasis<F> B(f, n, g, var);
  auto cols = detail::ansatz_columns(B, pf, g, Dmax);
  std::vector<Series<F>> img;
  for (auto& c : cols) img.push_back(apply_operator(Lt, c));
  int lo = img[0].valuation(), hi = img[0].end();
  for (auto& s : img) {
    lo = std::min(lo, s.valuation());
    hi = std::min(hi, s.end());
  }
  for (int D = 0; D <= Dmax; ++D) {
    int U = (g + 1) * (D + 1);
    int rows = std::min(hi - lo, detail::ansatz_window<F>(g, D, guard));
    Matrix<F> a(rows, std::vector<typename F::Elem>(U, f.zero()));
    for (int i = 0; i <= g; ++i)
      for (int j = 0; j <= D; ++j) {
        const auto& s = img[i * (Dmax + 1) + j];
        for (int r = 0; r < rows; ++r) a[r][i * (D + 1) + j] = s.at(lo + r);
      }
    auto ker = nullspace(f, a, U);
    if (ker.empty()) continue;
    Matrix<F> kb(ker.begin(), ker.end());
    auto piv = rref(f, kb, U);
    std::vector<AnsatzSolution<F>> out;
    for (size_t r = 0; r < piv.size(); ++r) out.push_back(detail::unpack(f, g, D, var, pf, kb[r]));
    return out;
  }
  throw NoSolutionAtDegree("no ansatz solution with polynomial degree <= " +
                           std::to_string(Dmax));
}

// Inhomogeneous ansatz: prefactor * sum P_i K^(g-i) E^i equal to the target
// on its window. The scale is fixed by the target.
template <class F>
AnsatzSolution<F> ansatz_solve(const Series<F>& target, int g, const Prefactor<F>& pf,
                               int Dmax, EllipticVar var = EllipticVar::W,
                               int guard = kAnsatzGuard) {
  if (g < 0 || Dmax < 0) throw InvalidArgument("negative ansatz degree");
  const F& f = target.field();
  int need = detail::ansatz_window<F>(g, 0, guard);
  if (target.length() < need)
    throw InsufficientSeries("target has " + std::to_string(target.length()) +
                             " terms, need " + std::to_string(need));
  int n = target.length() + 8;
  EllipticBasis<F> B(f, n, g, var);
  auto cols = detail::ansatz_columns(B, pf, g, Dmax);
  int lo = target.valuation(), hi = target.end();
  for (auto& s : cols) {
    lo = std::min(lo, s.valuation());
    hi = std::min(hi, s.end());
  }
  for (int D = 0; D <= Dmax; ++D) {
    int U = (g + 1) * (D + 1);
    if (hi - lo < detail::ansatz_window<F>(g, D, guard)) break;
    int rows = hi - lo;
    Matrix<F> a(rows, std::vector<typename F::Elem>(U + 1, f.zero()));
    for (int r = 0; r < rows; ++r) {
      for (int i = 0; i <= g; ++i)
        for (int j = 0; j <= D; ++j) a[r][i * (D + 1) + j] = cols[i * (Dmax + 1) + j].at(lo + r);
      a[r][U] = target.at(lo + r);
    }
    auto piv = rref(f, a, U + 1);
    if (!piv.empty() && piv.back() == U) continue;  // inconsistent
    std::vector<typename F::Elem> x(U, f.zero());
    for (size_t r = 0; r < piv.size(); ++r) x[piv[r]] = a[r][U];
    return detail::unpack(f, g, D, var, pf, x);
  }
  throw NoSolutionAtDegree("no ansatz solution with polynomial degree <= " +
                           std::to_string(Dmax));
}

// Applies L to the expanded ansatz on deg + 100 + extra coefficients past
// its valuation.
template <class F>
bool verify_membership(const DiffOp<F>& L, const AnsatzSolution<F>& sol, int extra = 0) {
  const F& f = L.field();
  bool zero = true;
  int deg = 0;
  for (auto& p : sol.P) {
    if (!p.is_zero()) zero = false;
    deg = std::max(deg, p.degree());
  }
  if (zero) return true;
  int n = deg + 100 + extra;
  EllipticBasis<F> B(f, n, sol.g, sol.var);
  auto s = detail::ansatz_series(B, sol);
  return apply_operator(convert_basis(L, Basis::Theta), s).is_zero();
}

namespace detail {
inline bool signed_small(const RationalField&, const Rational& e, int* out) {
  if (e.get_den() != 1 || abs(e) > (1 << 20)) return false;
  *out = static_cast<int>(e.get_num().get_si());
  return true;
}
inline bool signed_small(const PrimeContext& f, uint32_t e, int* out) {
  uint32_t lim = std::min<uint32_t>(1000, f.modulus() / 4);
  if (e <= lim) {
    *out = static_cast<int>(e);
    return true;
  }
  if (f.modulus() - e <= lim) {
    *out = -static_cast<int>(f.modulus() - e);
    return true;
  }
  return false;
}
}  // namespace detail

// Prefactor read off from local exponents: each irreducible polynomial gets
// the smallest integer exponent at its roots (0 if none is an integer).
template <class F>
Prefactor<F> prefactor_from_exponents(const DiffOp<F>& L, const std::vector<Poly<F>>& polys) {
  const F& f = L.field();
  Prefactor<F> out;
  for (auto& s : polys) {
    if (s.degree() < 1) throw InvalidArgument("prefactor polynomial must be non-constant");
    Point<F> pt = s.degree() == 1
                      ? Point<F>::at(f.neg(f.div(s.coeff(0), s.coeff(1))))
                      : Point<F>::root_of(s.monic());
    auto em = local_exponents(L, pt);
    bool any = false;
    int best = 0;
    for (auto& [e, m] : em.exponents) {
      int v;
      if (!detail::signed_small(f, e, &v)) continue;
      best = any ? std::min(best, v) : v;
      any = true;
    }
    out.push_back({s, best});
  }
  return out;
}

// Homogeneous ansatz over Q by solving modulo each prime and reconstructing
// the echelon basis. Stops once two successive reconstructions agree.
AnsatzSolution<RationalField> reconstruct_ansatz(
    const std::vector<AnsatzSolution<PrimeContext>>& per_prime,
    const std::vector<uint32_t>& primes);

std::vector<AnsatzSolution<RationalField>> ansatz_solve_rational(
    const OpQ& L, int g, const Prefactor<RationalField>& pf, int Dmax,
    EllipticVar var = EllipticVar::W, const std::vector<uint32_t>& primes = {});

Prefactor<PrimeContext> reduce_prefactor(const Prefactor<RationalField>& pf,
                                         const PrimeContext& ctx);

}  // namespace orefactor
