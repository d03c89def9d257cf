#pragma once

#include <string>
#include <utility>
#include <vector>

#include "orefactor/diffop.hpp"
#include "orefactor/linalg.hpp"
#include "orefactor/series.hpp"

namespace orefactor {

constexpr int kGuessGuard = 50;

template <class F>
struct GuessRequest {
  Series<F> series;
  int Q = 1;
  int D = 1;
  Basis basis = Basis::Theta;
  int guard = kGuessGuard;
};

template <class F>
struct GuessResult {
  bool found = false;
  bool degenerate = false;  // every equation vanished (e.g. zero series)
  int N = 0;                // rank of the full system
  int f = 0;                // nullspace dimension
  int rows_used = 0;        // equations read before the rank settled
  std::vector<DiffOp<F>> ops;
};

namespace detail {

// Incremental row echelon form; new rows are reduced against the pivots in
// insertion order. Each stored row is scaled to 1 at its pivot.
template <class F>
class Echelon {
 public:
  using Elem = typename F::Elem;
  Echelon(F f, int ncols) : f_(std::move(f)), n_(ncols) {}

  // Returns true when the row raised the rank.
  bool add(std::vector<Elem> row) {
    for (size_t k = 0; k < rows_.size(); ++k) {
      int pc = piv_[k];
      Elem c = row[pc];
      if (f_.is_zero(c)) continue;
      const auto& pr = rows_[k];
      for (int j = pc; j < n_; ++j)
        if (!f_.is_zero(pr[j])) row[j] = f_.sub(row[j], f_.mul(c, pr[j]));
    }
    int pc = -1;
    for (int j = 0; j < n_; ++j)
      if (!f_.is_zero(row[j])) {
        pc = j;
        break;
      }
    if (pc < 0) return false;
    Elem s = f_.inv(row[pc]);
    for (int j = pc; j < n_; ++j) row[j] = f_.mul(row[j], s);
    rows_.push_back(std::move(row));
    piv_.push_back(pc);
    return true;
  }
  int rank() const { return static_cast<int>(rows_.size()); }
  std::vector<std::vector<Elem>> kernel() const {
    if (rows_.empty()) {
      std::vector<std::vector<Elem>> out;
      for (int j = 0; j < n_; ++j) {
        std::vector<Elem> v(n_, f_.zero());
        v[j] = f_.one();
        out.push_back(v);
      }
      return out;
    }
    return nullspace(f_, rows_, n_);
  }

 private:
  F f_;
  int n_;
  std::vector<std::vector<Elem>> rows_;
  std::vector<int> piv_;
};

// Power table k^i for i <= Q.
template <class F>
std::vector<typename F::Elem> powers(const F& f, const typename F::Elem& k, int Q) {
  std::vector<typename F::Elem> r{f.one()};
  for (int i = 1; i <= Q; ++i) r.push_back(f.mul(r.back(), k));
  return r;
}

}  // namespace detail

// Row of the guessing system: coefficient of w^m in L(s) as a linear form
// in the unknowns a_ij (column i*(D+1)+j). Linear in s.
template <class F>
std::vector<typename F::Elem> guess_row(const Series<F>& s, int m, int Q, int D,
                                        Basis basis = Basis::Theta) {
  const F& f = s.field();
  const int v = s.valuation();
  std::vector<typename F::Elem> row((Q + 1) * (D + 1), f.zero());
  for (int j = 0; j <= D; ++j) {
    if (basis == Basis::Theta) {
      int k = m - j;
      if (k < v) break;
      auto sk = s.at(k);
      if (f.is_zero(sk)) continue;
      auto pw = detail::powers(f, f.from_int(k), Q);
      for (int i = 0; i <= Q; ++i) row[i * (D + 1) + j] = f.mul(pw[i], sk);
    } else {
      // a_ij w^j D^i w^k -> (k)_i w^(k-i+j); k = m - j + i
      for (int i = 0; i <= Q; ++i) {
        int k = m - j + i;
        if (k < v) continue;
        auto sk = s.at(k);
        if (f.is_zero(sk)) continue;
        auto c = f.one();
        for (int t = 0; t < i; ++t) c = f.mul(c, f.from_int(k - t));
        row[i * (D + 1) + j] = f.mul(c, sk);
      }
    }
  }
  return row;
}

// Finds every operator of order <= Q and degree <= D annihilating the
// series, by elimination over the unknowns a_ij (column i*(D+1)+j).
template <class F>
GuessResult<F> guess_ode(const GuessRequest<F>& req) {
  const Series<F>& s = req.series;
  const F& f = s.field();
  const int Q = req.Q, D = req.D;
  if (Q < 0 || D < 0) throw InvalidArgument("negative guessing bounds");
  const int U = (Q + 1) * (D + 1);
  const int v = s.valuation();
  int neq = req.basis == Basis::Theta ? s.length() : s.length() - Q;
  if (neq < U + req.guard)
    throw InsufficientSeries("need " + std::to_string(U + req.guard) +
                             " equations, series gives " + std::to_string(std::max(neq, 0)));
  detail::Echelon<F> ech(f, U);
  GuessResult<F> res;
  bool any_nonzero = false;
  for (int r = 0; r < neq; ++r) {
    auto row = guess_row(s, v + r, Q, D, req.basis);
    for (auto& x : row)
      if (!f.is_zero(x)) {
        any_nonzero = true;
        break;
      }
    if (ech.add(std::move(row))) res.rows_used = r + 1;
    if (ech.rank() == U) break;
  }
  res.N = ech.rank();
  res.f = U - res.N;
  res.found = res.f > 0;
  res.degenerate = !any_nonzero;
  if (res.found) {
    for (auto& k : ech.kernel()) {
      std::vector<Poly<F>> c;
      for (int i = 0; i <= Q; ++i)
        c.emplace_back(f, std::vector<typename F::Elem>(k.begin() + i * (D + 1),
                                                        k.begin() + (i + 1) * (D + 1)));
      res.ops.emplace_back(f, req.basis, std::move(c));
    }
  }
  return res;
}

template <class F>
int min_terms_required(const Series<F>& s, int Q, int D, int guard = kGuessGuard) {
  auto r = guess_ode(GuessRequest<F>{s, Q, D, Basis::Theta, guard});
  if (!r.found) throw NoSolutionAtBounds("no operator at Q=" + std::to_string(Q) +
                                         " D=" + std::to_string(D));
  return r.N;
}

struct OdeFormula {
  long d = 0, q = 0, C = 0;
  std::string str() const;
};

struct ProbeSample {
  int Q = 0, D = 0, N = 0, f = 0;
};

OdeFormula fit_ode_formula(const std::vector<ProbeSample>& samples);
long apparent_degree(const OdeFormula& fm);
long factor_formula_constant(long C_L, long C_R, long q, long q_R, long Dapp_R, long d);

struct OrderInference {
  OdeFormula formula;
  std::vector<ProbeSample> probes;
  std::string report() const;
};

// Default probe plan around a hint.
std::vector<std::pair<int, int>> default_probe_plan(int q_hint, int D_hint);

// Runs the probes (the first three fit, the rest check), expanding the
// plan when a probe finds nothing or the formula is violated.
template <class F>
OrderInference infer_minimal_order(const Series<F>& s,
                                   std::vector<std::pair<int, int>> plan,
                                   int guard = kGuessGuard, int max_expand = 6) {
  for (int attempt = 0; attempt <= max_expand; ++attempt) {
    OrderInference inf;
    bool ok = true;
    for (auto [Q, D] : plan) {
      auto r = guess_ode(GuessRequest<F>{s, Q, D, Basis::Theta, guard});
      if (!r.found) {
        ok = false;
        break;
      }
      inf.probes.push_back({Q, D, r.N, r.f});
    }
    if (ok) {
      try {
        inf.formula = fit_ode_formula(inf.probes);
        return inf;
      } catch (const InconsistentSamples&) {
      } catch (const DegenerateSamples&) {
      }
    }
    for (auto& pr : plan) {
      pr.first += 1;
      pr.second += 2;
    }
  }
  throw NoSolutionAtBounds("probe plan exhausted without a consistent formula");
}

template <class F>
OrderInference infer_minimal_order(const Series<F>& s, int q_hint, int D_hint,
                                   int guard = kGuessGuard) {
  return infer_minimal_order(s, default_probe_plan(q_hint, D_hint), guard);
}

}  // namespace orefactor
