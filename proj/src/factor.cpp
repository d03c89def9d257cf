#include "orefactor/factor.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "orefactor/polyroots.hpp"

namespace orefactor {

namespace {

using Mat = Matrix<PrimeContext>;

Mat probe_matrix(const SeriesP& s, int Q, int D, int rows) {
  Mat M;
  M.reserve(rows);
  for (int r = 0; r < rows; ++r) M.push_back(guess_row(s, s.valuation() + r, Q, D));
  return M;
}

int rows_for(int Q, int D, int guard) { return (Q + 1) * (D + 1) + guard; }

void require_length(const SeriesP& s, int rows) {
  if (s.length() < rows)
    throw InsufficientSeries("need " + std::to_string(rows) + " terms, have " +
                             std::to_string(s.length()));
}

void charge(SweepStats* st, uint64_t n, uint64_t budget) {
  if (!st) return;
  st->iterations += n;
  if (st->iterations > budget)
    throw SweepBudgetExceeded("sweep budget of " + std::to_string(budget) +
                              " iterations exhausted");
}

Mat random_matrix(const PrimeContext& f, int r, int c, std::mt19937_64& rng) {
  Mat m(r, std::vector<uint32_t>(c));
  for (auto& row : m)
    for (auto& x : row) x = static_cast<uint32_t>(rng() % f.modulus());
  return m;
}

// P * M * C with P r x rows, C cols x r.
Mat project(const PrimeContext& f, const Mat& P, const Mat& M, const Mat& C) {
  return mat_mul(f, mat_mul(f, P, M), C);
}

Mat combine(const PrimeContext& f, const Mat& A, const Mat& B, uint32_t a) {
  Mat r = A;
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = 0; j < r[i].size(); ++j)
      if (B[i][j]) r[i][j] = f.add(r[i][j], f.mul(a, B[i][j]));
  return r;
}

// det(A0 + x A1) as a polynomial.
PolyP det_pencil(const PrimeContext& f, const Mat& A0, const Mat& A1, SweepStats* st,
                 uint64_t budget) {
  int r = static_cast<int>(A0.size());
  std::vector<uint32_t> xs, ys;
  for (int i = 0; i <= r; ++i) {
    xs.push_back(static_cast<uint32_t>(i));
    ys.push_back(determinant(f, combine(f, A0, A1, static_cast<uint32_t>(i))));
  }
  charge(st, r + 1, budget);
  return interpolate(f, xs, ys);
}

// Candidates x where u + x v may lose rank at the probe. Returns nullopt
// when the projected pencil degenerates (caller falls back).
std::optional<std::vector<uint32_t>> pencil1(const PrimeContext& f, const Mat& M0,
                                             const Mat& M1, int r0, std::mt19937_64& rng,
                                             SweepStats* st, uint64_t budget) {
  int rows = static_cast<int>(M0.size()), cols = static_cast<int>(M0[0].size());
  for (int attempt = 0; attempt < 3; ++attempt) {
    auto P = random_matrix(f, r0, rows, rng);
    auto C = random_matrix(f, cols, r0, rng);
    auto g = det_pencil(f, project(f, P, M0, C), project(f, P, M1, C), st, budget);
    if (g.is_zero()) continue;
    return roots_mod_p(g);
  }
  return std::nullopt;
}

// Bivariate det(A0 + x A1 + y A2) as coefficient grid G[a][b] (x^a y^b).
std::vector<PolyP> det_pencil2(const PrimeContext& f, const Mat& A0, const Mat& A1,
                               const Mat& A2, SweepStats* st, uint64_t budget) {
  int r = static_cast<int>(A0.size());
  std::vector<uint32_t> pts;
  for (int i = 0; i <= r; ++i) pts.push_back(static_cast<uint32_t>(i));
  // rows over x: polynomial in y
  std::vector<PolyP> in_y;
  for (int i = 0; i <= r; ++i) {
    Mat Ax = combine(f, A0, A1, pts[i]);
    std::vector<uint32_t> ys;
    for (int j = 0; j <= r; ++j) ys.push_back(determinant(f, combine(f, Ax, A2, pts[j])));
    in_y.push_back(interpolate(f, pts, ys));
  }
  charge(st, uint64_t(r + 1) * (r + 1), budget);
  // coefficient of y^b as polynomial in x
  std::vector<PolyP> G;
  for (int b = 0; b <= r; ++b) {
    std::vector<uint32_t> vals;
    for (int i = 0; i <= r; ++i) vals.push_back(in_y[i].coeff(b));
    G.push_back(interpolate(f, pts, vals));
  }
  while (!G.empty() && G.back().is_zero()) G.pop_back();
  return G;  // G[b](x)
}

uint32_t sylvester_resultant(const PrimeContext& f, const std::vector<uint32_t>& a,
                             const std::vector<uint32_t>& b) {
  // formal degrees a.size()-1, b.size()-1; coefficients low to high
  int m = static_cast<int>(a.size()) - 1, n = static_cast<int>(b.size()) - 1;
  int N = m + n;
  if (N == 0) return 1;
  Mat S(N, std::vector<uint32_t>(N, 0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) S[i][i + k] = a[m - k];
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) S[n + i][i + k] = b[n - k];
  return determinant(f, S);
}

std::vector<std::pair<uint32_t, uint32_t>> pencil2(const PrimeContext& f, const Mat& M0,
                                                   const Mat& M1, const Mat& M2, int r0,
                                                   std::mt19937_64& rng, SweepStats* st,
                                                   uint64_t budget) {
  int rows = static_cast<int>(M0.size()), cols = static_cast<int>(M0[0].size());
  auto proj = [&]() {
    auto P = random_matrix(f, r0, rows, rng);
    auto C = random_matrix(f, cols, r0, rng);
    return det_pencil2(f, project(f, P, M0, C), project(f, P, M1, C), project(f, P, M2, C),
                       st, budget);
  };
  auto G1 = proj();
  auto G2 = proj();
  std::vector<uint32_t> alphas;
  auto beta_pencil = [&](uint32_t a, std::vector<std::pair<uint32_t, uint32_t>>& out) {
    Mat Ma = combine(f, M0, M1, a);
    auto bs = pencil1(f, Ma, M2, r0, rng, st, budget);
    if (!bs) return;
    for (auto b : *bs) out.push_back({a, b});
  };
  std::vector<std::pair<uint32_t, uint32_t>> out;
  if (G1.empty() || G2.empty()) return out;
  int d1 = static_cast<int>(G1.size()) - 1, d2 = static_cast<int>(G2.size()) - 1;
  if (d1 == 0 || d2 == 0) {
    const auto& g = d1 == 0 ? G1[0] : G2[0];
    for (auto a : roots_mod_p(g)) alphas.push_back(a);
  } else {
    int deg = (d1 + d2) * r0;
    std::vector<uint32_t> xs, ys;
    for (int i = 0; i <= deg; ++i) {
      uint32_t x = static_cast<uint32_t>(i);
      std::vector<uint32_t> a, b;
      for (auto& c : G1) a.push_back(c.eval(x));
      for (auto& c : G2) b.push_back(c.eval(x));
      xs.push_back(x);
      ys.push_back(sylvester_resultant(f, a, b));
    }
    charge(st, deg + 1, budget);
    auto R = interpolate(f, xs, ys);
    if (R.is_zero()) {
      // common component: the drop locus is a curve, any alpha meets it
      for (int t = 0; t < 3; ++t) beta_pencil(static_cast<uint32_t>(rng() % f.modulus()), out);
      return out;
    }
    alphas = roots_mod_p(R);
  }
  for (auto a : alphas) beta_pencil(a, out);
  return out;
}

SeriesP instantiate(const ParametricSeries<PrimeContext>& ps, const std::vector<uint32_t>& a) {
  return ps.instantiate(a);
}

}  // namespace

std::string SweepResult::str() const {
  std::ostringstream os;
  os << "alpha=";
  for (size_t i = 0; i < alpha.size(); ++i) os << (i ? "," : "") << alpha[i];
  if (alpha.empty()) os << "-";
  os << " q1=" << q1 << " N=" << N << " baseline_N=" << baseline_N;
  return os.str();
}

int probe_rank(const SeriesP& s, int Q, int D, int guard) {
  int rows = rows_for(Q, D, guard);
  require_length(s, rows);
  int U = (Q + 1) * (D + 1);
  detail::Echelon<PrimeContext> ech(s.field(), U);
  for (int r = 0; r < rows && ech.rank() < U; ++r)
    ech.add(guess_row(s, s.valuation() + r, Q, D));
  return ech.rank();
}

std::optional<Annihilator> minimal_annihilator(const SeriesP& s, int Qmax, int Dmax, int guard) {
  for (int Q = 1; Q <= Qmax; ++Q) {
    int U = (Q + 1) * (Dmax + 1);
    if (s.length() < U + guard) break;
    if (probe_rank(s, Q, Dmax, guard) == U) continue;
    for (int D = 0; D <= Dmax; ++D) {
      auto r = guess_ode(GuessRequest<PrimeContext>{s, Q, D, Basis::Theta, guard});
      if (r.found && !r.degenerate) return Annihilator{Q, D, normalized(r.ops[0])};
    }
  }
  return std::nullopt;
}

std::vector<SweepResult> alpha_sweep(const FrobeniusFamily<PrimeContext>& fam, int parent_order,
                                     const SweepOptions& opt, SweepStats* stats) {
  const auto& ps = fam.series;
  const PrimeContext& f = ps.base.field();
  const int k = static_cast<int>(ps.num_params());
  const int Q = opt.Q, D = opt.D;
  const int rows = rows_for(Q, D, opt.guard);
  require_length(ps.base, rows);
  SweepStats local;
  SweepStats* st = stats ? stats : &local;
  std::mt19937_64 rng(opt.seed * 0x9e3779b97f4a7c15ULL + 17);

  std::vector<SweepResult> out;
  auto accept = [&](const std::vector<uint32_t>& a, int rank, int base) {
    auto s = instantiate(ps, a);
    auto ann = minimal_annihilator(s, parent_order - 1, D, opt.guard);
    if (!ann || ann->Q >= parent_order) return;
    out.push_back({a, ann->Q, rank, base, ann->op});
  };

  if (k == 0) {
    int r = probe_rank(ps.base, Q, D, opt.guard);
    charge(st, 1, opt.budget);
    accept({}, r, r);
    return out;
  }

  // baseline: mode of the probe rank over 8 random parameter points
  std::map<int, int> counts;
  for (int t = 0; t < 8; ++t) {
    std::vector<uint32_t> a(k);
    for (auto& x : a) x = static_cast<uint32_t>(rng() % f.modulus());
    counts[probe_rank(instantiate(ps, a), Q, D, opt.guard)]++;
  }
  charge(st, 8, opt.budget);
  int base = 0, best = -1;
  for (auto [r, c] : counts)
    if (c > best) {
      best = c;
      base = r;
    }

  auto verify = [&](const std::vector<uint32_t>& a) {
    charge(st, 1, opt.budget);
    int r = probe_rank(instantiate(ps, a), Q, D, opt.guard);
    if (r < base) accept(a, r, base);
  };

  Mat M0 = probe_matrix(ps.base, Q, D, rows);
  std::vector<Mat> Mi;
  for (auto& d : ps.directions) Mi.push_back(probe_matrix(d.second, Q, D, rows));

  auto exhaustive1 = [&](const SeriesP& u, const SeriesP& v, std::vector<uint32_t> prefix) {
    uint64_t p = f.modulus();
    charge(st, p, opt.budget);
    int jobs = std::max(1, opt.jobs);
    std::vector<std::vector<std::pair<uint32_t, int>>> hits(jobs);
    auto work = [&](int id) {
      for (uint64_t a = id; a < p; a += jobs) {
        int r = probe_rank(u.combine(v, static_cast<uint32_t>(a)), Q, D, opt.guard);
        if (r < base) hits[id].push_back({static_cast<uint32_t>(a), r});
      }
    };
    std::vector<std::thread> th;
    for (int id = 1; id < jobs; ++id) th.emplace_back(work, id);
    work(0);
    for (auto& t : th) t.join();
    std::vector<std::pair<uint32_t, int>> all;
    for (auto& h : hits) all.insert(all.end(), h.begin(), h.end());
    std::sort(all.begin(), all.end());
    for (auto [a, r] : all) {
      auto full = prefix;
      full.push_back(a);
      accept(full, r, base);
    }
  };

  if (k == 1) {
    if (opt.exhaustive) {
      exhaustive1(ps.base, ps.directions[0].second, {});
    } else {
      auto cands = pencil1(f, M0, Mi[0], base, rng, st, opt.budget);
      if (!cands) {
        exhaustive1(ps.base, ps.directions[0].second, {});
      } else {
        for (auto a : *cands) verify({a});
      }
    }
  } else if (k == 2) {
    if (opt.exhaustive) {
      // exhaustive outer parameter, pencil in the inner one
      uint64_t p = f.modulus();
      charge(st, p * uint64_t(base + 1), opt.budget);
      for (uint64_t a = 0; a < p; ++a) {
        Mat Ma = combine(f, M0, Mi[0], static_cast<uint32_t>(a));
        auto bs = pencil1(f, Ma, Mi[1], base, rng, nullptr, opt.budget);
        if (!bs) continue;
        for (auto b : *bs) verify({static_cast<uint32_t>(a), b});
      }
    } else {
      for (auto [a, b] : pencil2(f, M0, Mi[0], Mi[1], base, rng, st, opt.budget)) verify({a, b});
    }
  } else {
    throw InvalidArgument("sweeps over more than two parameters are not supported");
  }
  std::sort(out.begin(), out.end(),
            [](const SweepResult& x, const SweepResult& y) { return x.alpha < y.alpha; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const SweepResult& x, const SweepResult& y) { return x.alpha == y.alpha; }),
            out.end());
  return out;
}

std::optional<SummandRemoval> remove_direct_summand(const SeriesP& S, const SeriesP& T, int Q,
                                                    int D, const SweepOptions& opt0) {
  auto annS = minimal_annihilator(S, Q, D, opt0.guard);
  int qS = annS ? annS->Q : Q + 1;
  if (qS <= 1) return std::nullopt;
  FrobeniusFamily<PrimeContext> fam;
  fam.series.base = S;
  fam.series.directions.push_back({"alpha", T.scaled(S.field().neg(S.field().one()))});
  SweepOptions opt = opt0;
  opt.Q = qS - 1;
  opt.D = D;
  auto res = alpha_sweep(fam, qS, opt);
  if (res.empty()) return std::nullopt;
  return SummandRemoval{res.front().alpha[0], res.front().q1};
}

RightFactorCheck detect_right_factor(const SeriesP& s, int parent_order, const OpP& R, int Dmax,
                                     int guard) {
  auto img = apply_operator(R, s);
  RightFactorCheck out;
  if (img.is_zero()) {
    out.divides = true;
    out.image_order = 0;
    return out;
  }
  auto ann = minimal_annihilator(img, parent_order, Dmax, guard);
  out.image_order = ann ? ann->Q : parent_order + 1;
  out.divides = ann && ann->Q <= parent_order - R.order();
  return out;
}

OpP right_cofactor(const OpP& L0, const OpP& A0) {
  const PrimeContext& f = L0.field();
  OpP L = convert_basis(L0, Basis::Ddw), A = convert_basis(A0, Basis::Ddw);
  auto rd = right_divide(adjoint(L), adjoint(A));
  if (!rd.remainder.coeffs().empty())
    throw InvalidArgument("operator is not a left factor");
  // m L* = Q A*  =>  L m = A Q*  =>  L = A (Q* m^-1)
  OpP Qs = adjoint(rd.quotient);
  PolyP m = rd.multiplier;
  int t = Qs.order();
  std::vector<PolyP> Pj{PolyP::constant(f, f.one())};
  for (int j = 0; j < t; ++j)
    Pj.push_back(Pj[j].derivative() * m - (m.derivative() * Pj[j]).scaled(f.from_int(j + 1)));
  std::vector<PolyP> mpow{PolyP::constant(f, f.one())};
  for (int j = 0; j < t; ++j) mpow.push_back(mpow.back() * m);
  auto binom = binomials(f, t);
  std::vector<PolyP> out(t + 1, PolyP(f));
  for (int i = 0; i <= t; ++i)
    for (int j = 0; j <= i; ++j)
      out[i - j] += (Qs.coeff(i) * Pj[j] * mpow[t - j]).scaled(binom[i][j]);
  return primitive_part(OpP(f, Basis::Ddw, std::move(out)));
}

// ---- driver ----

const char* node_status_name(NodeStatus s) {
  switch (s) {
    case NodeStatus::Split: return "split";
    case NodeStatus::FullyFactored: return "fully-factored";
    case NodeStatus::IrreducibleAtBudget: return "irreducible-at-budget";
    default: return "undecided";
  }
}

std::string FactorNode::str(int indent) const {
  std::ostringstream os;
  os << std::string(2 * indent, ' ') << "order=" << op.order() << " via=" << via
     << " status=" << node_status_name(status) << "\n";
  for (auto& c : children) os << c.str(indent + 1);
  return os.str();
}

std::vector<int> FactorNode::leaf_orders() const {
  if (children.empty()) return {op.order()};
  std::vector<int> r;
  for (auto& c : children) {
    auto s = c.leaf_orders();
    r.insert(r.end(), s.begin(), s.end());
  }
  return r;
}

namespace {

int theta_degree(const OpP& L) {
  OpP t = strip_w_power(convert_basis(L, Basis::Theta));
  int d = 0;
  for (int i = 0; i <= t.order(); ++i) d = std::max(d, t.coeff(i).degree());
  return d;
}

bool is_zero_op(const OpP& R) { return R.coeffs().empty(); }

std::optional<Split> try_witness(const OpP& L, const OpP& wit_local, uint32_t point, bool adj,
                                 const std::string& via) {
  const PrimeContext& f = L.field();
  OpP R = convert_basis(wit_local, Basis::Ddw);
  if (point != 0) R = translate(R, f.neg(point));
  R = primitive_part(R);
  if (R.order() < 1 || R.order() >= L.order()) return std::nullopt;
  OpP right = R;
  if (adj) {
    // R right-divides L*, so R* is a left factor of L
    try {
      right = right_cofactor(L, adjoint(R));
    } catch (const Error&) {
      return std::nullopt;
    }
  }
  auto rd = right_divide(convert_basis(L, Basis::Ddw), right);
  if (!is_zero_op(rd.remainder)) return std::nullopt;
  return Split{primitive_part(rd.quotient), normalized(right), via};
}

}  // namespace

std::optional<Split> find_split(const OpP& L0, const FactorOptions& opt, SweepStats* stats) {
  const PrimeContext& f = L0.field();
  OpP L = convert_basis(L0, Basis::Ddw);
  const int n = L.order();
  if (n <= 1) return std::nullopt;
  const int dt = theta_degree(L);
  const int Dcap = 2 * dt + 4;
  const int guard = kGuessGuard;
  int nterms = opt.nterms;
  if (nterms <= 0) nterms = n * (Dcap + 1) + guard + Dcap + 40;
  nterms = std::min<int>(nterms, static_cast<int>(f.modulus()) - 1);

  std::mt19937_64 rng(opt.seed);
  std::vector<uint32_t> points{0};
  for (int t = 0; t < 50; ++t) {
    uint32_t s = static_cast<uint32_t>(1 + rng() % (f.modulus() - 1));
    if (!f.is_zero(L.lead().eval(s))) {
      points.push_back(s);
      break;
    }
  }
  std::vector<int> dsched;
  for (int d : {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64})
    if (d <= Dcap) dsched.push_back(d);
  if (dsched.empty() || dsched.back() < Dcap) dsched.push_back(Dcap);

  for (int k = 0; k <= opt.multi_param; ++k) {
    for (uint32_t pt : points) {
      for (int side = 0; side < (opt.use_adjoint ? 2 : 1); ++side) {
        OpP base = side ? adjoint(L) : L;
        OpP Lloc = pt ? translate(base, pt) : base;
        std::vector<SeriesP> basis;
        try {
          basis = analytic_solutions(Lloc, nterms);
        } catch (const Error&) {
          continue;
        }
        int m = static_cast<int>(basis.size());
        if (k > m - 1) continue;
        int i = m - 1 - k;
        FrobeniusFamily<PrimeContext> fam;
        fam.exponent = basis[i].first_nonzero();
        fam.series.base = basis[i];
        for (int j = i + 1; j < m; ++j) {
          fam.series.directions.push_back({"a" + std::to_string(basis[j].first_nonzero()), basis[j]});
          fam.param_exponents.push_back(basis[j].first_nonzero());
        }
        int Qp = n - std::max(k, 1);
        for (int D : dsched) {
          int U = (Qp + 1) * (D + 1);
          if (k == 2 && U > 60) break;
          if (U + guard > nterms) break;
          SweepOptions so;
          so.Q = Qp;
          so.D = D;
          so.exhaustive = opt.exhaustive;
          so.budget = opt.budget;
          so.jobs = opt.jobs;
          so.seed = opt.seed + 7919 * D + 104729 * k;
          auto res = alpha_sweep(fam, n, so, stats);
          for (auto& r : res) {
            std::ostringstream via;
            via << "sweep alpha=";
            for (size_t t = 0; t < r.alpha.size(); ++t) via << (t ? "," : "") << r.alpha[t];
            if (r.alpha.empty()) via << "-";
            via << " at w=" << pt << " exponent=" << fam.exponent;
            if (side) via << " adjoint";
            auto sp = try_witness(L, r.witness, pt, side == 1, via.str());
            if (sp) return sp;
          }
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

FactorNode factor_rec(const OpP& L, const std::string& via, const FactorOptions& opt,
                      SweepStats* st) {
  FactorNode node;
  node.op = L;
  node.via = via;
  if (L.order() <= 1) {
    node.status = NodeStatus::FullyFactored;
    return node;
  }
  std::optional<Split> sp;
  try {
    sp = find_split(L, opt, st);
  } catch (const SweepBudgetExceeded&) {
    node.status = NodeStatus::Undecided;
    return node;
  }
  if (!sp) {
    node.status = NodeStatus::IrreducibleAtBudget;
    return node;
  }
  node.status = NodeStatus::Split;
  node.children.push_back(factor_rec(sp->left, "division", opt, st));
  node.children.push_back(factor_rec(sp->right, sp->via, opt, st));
  return node;
}

}  // namespace

FactorNode factorize(const OpP& L, const FactorOptions& opt) {
  SweepStats st;
  return factor_rec(normalized(convert_basis(L, Basis::Ddw)), "input", opt, &st);
}

// ---- schemes ----

std::vector<Partition> reconcile_schemes(const std::vector<Partition>& schemes) {
  if (schemes.empty()) return {};
  int M = 0;
  for (auto& s : schemes)
    for (int x : s) M = std::max(M, x);
  auto closure = [&](const Partition& p0) {
    std::set<Partition> seen{p0};
    std::vector<Partition> todo{p0};
    while (!todo.empty()) {
      Partition p = todo.back();
      todo.pop_back();
      for (size_t i = 0; i + 1 < p.size(); ++i) {
        if (p[i] != p[i + 1] || 2 * p[i] > M) continue;
        Partition q = p;
        q[i] *= 2;
        q.erase(q.begin() + i + 1);
        std::sort(q.rbegin(), q.rend());
        if (seen.insert(q).second) todo.push_back(q);
      }
    }
    return seen;
  };
  std::set<Partition> acc = closure(schemes[0]);
  for (size_t i = 1; i < schemes.size(); ++i) {
    auto c = closure(schemes[i]);
    std::set<Partition> keep;
    for (auto& p : acc)
      if (c.count(p)) keep.insert(p);
    acc = keep;
  }
  std::vector<Partition> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a > b;
  });
  return out;
}

std::string SchemeReport::str() const {
  std::ostringstream os;
  auto put = [&](const Partition& p) {
    for (size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  };
  for (auto& [name, p] : per_point) {
    os << "point " << name << ": ";
    put(p);
    os << "\n";
  }
  for (auto& c : candidates) {
    os << "candidate: ";
    put(c);
    os << "\n";
  }
  return os.str();
}

}  // namespace orefactor
