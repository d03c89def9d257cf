#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orefactor/diffop.hpp"
#include "orefactor/guess.hpp"
#include "orefactor/local.hpp"
#include "orefactor/series.hpp"

namespace orefactor {

// Analytic solutions at 0 of L (any basis), as a reduced echelon basis:
// ascending leading exponents, each normalized to 1 there and vanishing at
// the other leading exponents.
template <class F>
std::vector<Series<F>> analytic_solutions(const DiffOp<F>& L, int nterms) {
  const F& f = L.field();
  DiffOp<F> Lt = strip_w_power(convert_basis(L, Basis::Theta));
  auto P = theta_recurrence(Lt);
  const int J = static_cast<int>(P.size());
  std::vector<int> seeds;
  for (int k = 0; k < nterms; ++k)
    if (f.is_zero(P[0].eval(f.from_int(k)))) seeds.push_back(k);
  const int S = static_cast<int>(seeds.size());
  using V = std::vector<typename F::Elem>;
  std::vector<V> c(nterms, V(S, f.zero()));
  Matrix<F> obstruction;
  int si = 0;
  for (int k = 0; k < nterms; ++k) {
    V rhs(S, f.zero());
    for (int j = 1; j < J && j <= k; ++j) {
      if (P[j].is_zero()) continue;
      auto pj = P[j].eval(f.from_int(k - j));
      if (f.is_zero(pj)) continue;
      for (int t = 0; t < S; ++t)
        if (!f.is_zero(c[k - j][t])) rhs[t] = f.sub(rhs[t], f.mul(pj, c[k - j][t]));
    }
    if (si < S && seeds[si] == k) {
      obstruction.push_back(rhs);
      c[k][si] = f.one();
      ++si;
    } else {
      auto inv = f.inv(P[0].eval(f.from_int(k)));
      for (int t = 0; t < S; ++t) c[k][t] = f.mul(rhs[t], inv);
    }
  }
  std::vector<V> combos;
  bool trivial = true;
  for (auto& r : obstruction)
    for (auto& x : r)
      if (!f.is_zero(x)) trivial = false;
  if (trivial) {
    for (int t = 0; t < S; ++t) {
      V u(S, f.zero());
      u[t] = f.one();
      combos.push_back(u);
    }
  } else {
    combos = nullspace(f, obstruction, S);
  }
  // the last seeds may have too few terms after them to detect a forced
  // log; require a margin of J terms
  Matrix<F> A(combos.begin(), combos.end());
  if (A.empty()) return {};
  rref(f, A, S);
  std::vector<Series<F>> out;
  for (auto& a : A) {
    int lead = -1;
    for (int t = 0; t < S; ++t)
      if (!f.is_zero(a[t])) {
        lead = t;
        break;
      }
    if (lead < 0) continue;
    if (seeds[lead] + J >= nterms) continue;
    V coeffs(nterms, f.zero());
    for (int k = 0; k < nterms; ++k)
      for (int t = 0; t < S; ++t)
        if (!f.is_zero(a[t]) && !f.is_zero(c[k][t]))
          coeffs[k] = f.add(coeffs[k], f.mul(a[t], c[k][t]));
    out.emplace_back(f, 0, std::move(coeffs));
  }
  return out;
}

template <class F>
struct FrobeniusFamily {
  int exponent = 0;
  ParametricSeries<F> series;
  std::vector<int> param_exponents;
};

// Local operator at the point moved to 0 (finite points are translated,
// infinity is inverted).
template <class F>
DiffOp<F> moved_to_zero(const DiffOp<F>& L, const Point<F>& pt) {
  if (pt.kind == Point<F>::Kind::Infinity) return invert_at_infinity(L);
  if (pt.kind == Point<F>::Kind::Root)
    throw InvalidArgument("families need a point in the base field");
  if (L.field().is_zero(pt.value)) return L;
  return translate(L, pt.value);
}

template <class F>
FrobeniusFamily<F> frobenius_family_at_zero(const DiffOp<F>& L0, int exponent, int nterms) {
  auto basis = analytic_solutions(L0, nterms);
  FrobeniusFamily<F> fam;
  fam.exponent = exponent;
  bool found = false;
  for (auto& b : basis) {
    int e = b.first_nonzero();
    if (e == exponent) {
      fam.series.base = b;
      found = true;
    } else if (e > exponent) {
      fam.series.directions.push_back({"a" + std::to_string(e), b});
      fam.param_exponents.push_back(e);
    }
  }
  if (!found)
    throw NotAnExponent("no analytic solution with leading exponent " +
                        std::to_string(exponent));
  return fam;
}

inline int exponent_to_int(const RationalField&, const Rational& e) {
  if (e.get_den() != 1) throw NonIntegerExponent("exponent " + e.get_str() + " is not an integer");
  return static_cast<int>(e.get_num().get_si());
}
inline int exponent_to_int(const PrimeContext& f, uint32_t e) {
  int v;
  if (!as_small_int(f, e, &v)) throw NonIntegerExponent("exponent residue is not a small integer");
  return v;
}

template <class F>
FrobeniusFamily<F> frobenius_family(const DiffOp<F>& L, const Point<F>& pt,
                                    const typename F::Elem& exponent, int nterms) {
  int e = exponent_to_int(L.field(), exponent);
  if (e < 0) throw NonIntegerExponent("only analytic (non-negative) exponents are swept");
  return frobenius_family_at_zero(moved_to_zero(L, pt), e, nterms);
}

// ---- sweeps (prime field) ----

struct SweepOptions {
  int Q = 1;             // probe order
  int D = 4;             // probe degree
  bool exhaustive = false;
  uint64_t budget = 1000000;
  int jobs = 1;
  uint64_t seed = 1;
  int guard = kGuessGuard;
};

struct SweepStats {
  uint64_t iterations = 0;
};

struct SweepResult {
  std::vector<uint32_t> alpha;
  int q1 = 0;
  int N = 0;           // rank at the probe for this alpha
  int baseline_N = 0;  // generic rank at the probe
  OpP witness;
  std::string str() const;
};

struct Annihilator {
  int Q = 0, D = 0;
  OpP op;  // theta basis
};

// Smallest order, then smallest degree, with an annihilator of s.
std::optional<Annihilator> minimal_annihilator(const SeriesP& s, int Qmax, int Dmax,
                                               int guard = kGuessGuard);

int probe_rank(const SeriesP& s, int Q, int D, int guard = kGuessGuard);

std::vector<SweepResult> alpha_sweep(const FrobeniusFamily<PrimeContext>& fam,
                                     int parent_order, const SweepOptions& opt,
                                     SweepStats* stats = nullptr);

struct SummandRemoval {
  uint32_t alpha = 0;
  int reduced_order = 0;
};

std::optional<SummandRemoval> remove_direct_summand(const SeriesP& S, const SeriesP& T,
                                                    int Q, int D,
                                                    const SweepOptions& opt = {});

struct RightFactorCheck {
  bool divides = false;
  int image_order = 0;
};

RightFactorCheck detect_right_factor(const SeriesP& parent_solution, int parent_order,
                                     const OpP& R, int Dmax, int guard = kGuessGuard);

// Right factor of L obtained from a known left factor A (L = A * B).
OpP right_cofactor(const OpP& L, const OpP& A);

// ---- driver ----

struct FactorOptions {
  int multi_param = 1;
  uint64_t budget = 1000000;
  int jobs = 1;
  bool exhaustive = false;
  bool use_adjoint = true;
  uint64_t seed = 1;
  int nterms = 0;  // 0: chosen from the operator size
};

enum class NodeStatus { Split, FullyFactored, IrreducibleAtBudget, Undecided };
const char* node_status_name(NodeStatus s);

struct FactorNode {
  OpP op;
  std::string via = "root";
  NodeStatus status = NodeStatus::Undecided;
  std::vector<FactorNode> children;  // left, right
  std::string str(int indent = 0) const;
  std::vector<int> leaf_orders() const;
};

struct Split {
  OpP left, right;
  std::string via;
};

std::optional<Split> find_split(const OpP& L, const FactorOptions& opt, SweepStats* stats);
FactorNode factorize(const OpP& L, const FactorOptions& opt = {});

// ---- log-structure schemes ----

using Partition = std::vector<int>;  // descending

struct SchemeReport {
  std::vector<std::pair<std::string, Partition>> per_point;
  std::vector<Partition> candidates;
  std::string str() const;
};

template <class E>
Partition scheme_of(const LogStructure<E>& ls, int order) {
  Partition p;
  int total = 0;
  for (auto& b : ls.blocks) {
    p.push_back(b.max_log + 1);
    total += b.max_log + 1;
  }
  for (; total < order; ++total) p.push_back(1);  // exponents outside the field
  std::sort(p.rbegin(), p.rend());
  return p;
}

std::vector<Partition> reconcile_schemes(const std::vector<Partition>& schemes);

template <class F>
SchemeReport infer_scheme(const DiffOp<F>& L, const std::vector<Point<F>>& points,
                          const std::vector<std::string>& names) {
  SchemeReport rep;
  std::vector<Partition> ps;
  for (size_t i = 0; i < points.size(); ++i) {
    auto ls = formal_log_solutions(L, points[i]);
    ps.push_back(scheme_of(ls, L.order()));
    rep.per_point.push_back({i < names.size() ? names[i] : std::to_string(i), ps.back()});
  }
  rep.candidates = reconcile_schemes(ps);
  return rep;
}

}  // namespace orefactor
