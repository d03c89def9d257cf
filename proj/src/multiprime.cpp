#include "orefactor/multiprime.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "orefactor/io.hpp"
#include "orefactor/local.hpp"
#include "orefactor/pcurv.hpp"

namespace orefactor {

namespace fs = std::filesystem;

std::string ScaleHint::str() const {
  std::string s = "scale=" + scale.get_str();
  if (var_scale != 1) s += " var=" + var_scale.get_str();
  return s;
}

ReconstructionTask align_operators(const std::vector<OpP>& ops, int anchor_i, int anchor_j) {
  ReconstructionTask t;
  if (ops.empty()) throw InvalidArgument("no operators to align");
  t.basis = ops[0].basis();
  t.order = ops[0].order();
  t.degree = ops[0].degree();
  if (t.order < 0) throw ShapeMismatch("zero operator");
  if (anchor_i < 0) {
    anchor_i = t.order;
    anchor_j = ops[0].lead().degree();
  }
  t.anchor_i = anchor_i;
  t.anchor_j = anchor_j;
  std::set<uint32_t> seen;
  for (auto& L : ops) {
    if (L.basis() != t.basis || L.order() != t.order || L.degree() != t.degree)
      throw ShapeMismatch("operator shape (" + std::string(basis_name(L.basis())) + ", " +
                          std::to_string(L.order()) + ", " + std::to_string(L.degree()) +
                          ") differs from (" + basis_name(t.basis) + ", " +
                          std::to_string(t.order) + ", " + std::to_string(t.degree) + ")");
    const auto& f = L.field();
    if (!seen.insert(f.modulus()).second)
      throw ShapeMismatch("prime " + std::to_string(f.modulus()) + " given twice");
    auto a = L.coeff(anchor_i).coeff(anchor_j);
    if (f.is_zero(a))
      throw ShapeMismatch("anchor coefficient vanishes modulo " + std::to_string(f.modulus()));
    t.primes.push_back(f.modulus());
    t.ops.push_back(L.scaled(f.inv(a)));
  }
  t.status.assign(t.order + 1,
                  std::vector<CoeffStatus>(t.degree + 1, CoeffStatus::Pending));
  return t;
}

std::vector<ScaleHint> scaling_hints_from(const PolyQ& known, int spread) {
  std::vector<ScaleHint> out;
  if (known.is_zero()) return out;
  Rational low = known.coeff(known.valuation());
  Integer mag = abs(low.get_num()) * low.get_den();
  int bits = static_cast<int>(mpz_sizeinbase(mag.get_mpz_t(), 2)) - 1;
  for (int d = 0; d <= spread; ++d)
    for (int s : {1, -1}) {
      if (d == 0 && s < 0) continue;
      int e = bits + s * d;
      if (e < 0) continue;
      Integer v = 1;
      v <<= e;
      out.push_back({v, 1});
    }
  return out;
}

namespace {

int height_bits(const Rational& q) {
  Integer n = abs(q.get_num());
  size_t a = mpz_sizeinbase(n.get_mpz_t(), 2), b = mpz_sizeinbase(q.get_den().get_mpz_t(), 2);
  return static_cast<int>(std::max(a, b));
}

Rational pow_q(const Rational& r, int j) {
  Rational out = 1;
  for (int k = 0; k < j; ++k) out *= r;
  return out;
}

struct Candidate {
  bool ok = false;
  Rational value;
  int height = 0;
  size_t hint = 0;
};

Candidate best_candidate(const Integer& x, const Integer& m, int j,
                         const std::vector<ScaleHint>& hints) {
  Candidate best;
  for (size_t h = 0; h < hints.size(); ++h) {
    Rational mu = Rational(hints[h].scale) * pow_q(hints[h].var_scale, j);
    if (mu == 0) continue;
    Integer u;
    try {
      u = Integer(x * reduce_mod(mu, m)) % m;
    } catch (const BadReductionAtP&) {
      continue;
    }
    Rational q;
    try {
      q = rational_reconstruct(u, m);
    } catch (const NoReconstruction&) {
      continue;
    }
    int hb = height_bits(q);
    if (!best.ok || hb < best.height) {
      best.ok = true;
      best.height = hb;
      best.value = q / mu;
      best.hint = h;
    }
  }
  return best;
}

bool matches(const Rational& v, uint32_t residue, uint32_t p) {
  try {
    return reduce_mod(v, Integer(p)) == Integer(residue);
  } catch (const BadReductionAtP&) {
    return false;
  }
}

std::vector<ScaleHint> with_identity(const std::vector<ScaleHint>& hints) {
  std::vector<ScaleHint> h{{1, 1}};
  for (auto& x : hints)
    if (!(x.scale == 1 && x.var_scale == 1)) h.push_back(x);
  return h;
}

// 2-adic hints from the denominators of recovered coefficients.
std::vector<ScaleHint> dyadic_hints(const std::vector<Rational>& values) {
  std::set<unsigned long> vs;
  for (auto& v : values) {
    if (v.get_den() == 1) continue;
    vs.insert(mpz_scan1(v.get_den().get_mpz_t(), 0));
  }
  std::vector<ScaleHint> out;
  for (auto e : vs) {
    if (e == 0) continue;
    Integer s = 1;
    s <<= e;
    out.push_back({s, 1});
  }
  return out;
}

struct BlockOutcome {
  int inconsistent = 0;
};

// Reconstructs the coefficients (i, j) of the listed blocks. Strict mode
// marks holdout failures Inconsistent; lenient mode leaves them Pending.
void reconstruct_blocks(ReconstructionTask& task, const std::vector<int>& blocks,
                        const std::vector<ScaleHint>& hints0, bool strict,
                        std::vector<std::vector<Rational>>& value, BlockOutcome& out) {
  size_t np = task.primes.size();
  bool has_holdout = np >= 3;
  size_t nuse = has_holdout ? np - 1 : np;
  if (np < 2) {
    for (int i : blocks)
      for (int j = 0; j <= task.degree; ++j) task.status[i][j] = CoeffStatus::Pending;
    return;
  }
  auto hints = with_identity(hints0);
  std::vector<Rational> recovered;
  for (int pass = 0; pass < 2; ++pass) {
    if (pass == 1) {
      auto extra = dyadic_hints(recovered);
      bool any_pending = false;
      for (int i : blocks)
        for (int j = 0; j <= task.degree; ++j)
          if (task.status[i][j] == CoeffStatus::Pending) any_pending = true;
      if (!task.auto_hints || extra.empty() || !any_pending) break;
      for (auto& e : extra) hints.push_back(e);
    }
    for (int i : blocks)
      for (int j = 0; j <= task.degree; ++j) {
        if (pass == 1 && task.status[i][j] != CoeffStatus::Pending) continue;
        ResidueSystem rs;
        for (size_t k = 0; k < nuse; ++k)
          rs.push_back({Integer(task.ops[k].coeff(i).coeff(j)), Integer(task.primes[k])});
        auto [x, m] = crt_combine(rs);
        auto c = best_candidate(x, m, j, hints);
        if (!c.ok) {
          task.status[i][j] = CoeffStatus::Pending;
          continue;
        }
        if (has_holdout &&
            !matches(c.value, task.ops[np - 1].coeff(i).coeff(j), task.primes[np - 1])) {
          task.status[i][j] = strict ? CoeffStatus::Inconsistent : CoeffStatus::Pending;
          continue;
        }
        task.status[i][j] = CoeffStatus::Reconstructed;
        value[i][j] = c.value;
        recovered.push_back(c.value);
      }
  }
  for (int i : blocks)
    for (int j = 0; j <= task.degree; ++j)
      if (task.status[i][j] == CoeffStatus::Inconsistent) ++out.inconsistent;
}

ReconstructionResult assemble(const ReconstructionTask& task,
                              const std::vector<std::vector<Rational>>& value) {
  RationalField Q;
  ReconstructionResult r;
  std::vector<PolyQ> c;
  for (int i = 0; i <= task.order; ++i) {
    c.emplace_back(Q, value[i]);
    for (int j = 0; j <= task.degree; ++j) {
      if (task.status[i][j] == CoeffStatus::Reconstructed)
        ++r.reconstructed;
      else
        ++r.pending;
    }
  }
  r.op = OpQ(Q, task.basis, std::move(c));
  r.complete = r.pending == 0;
  r.provisional = task.primes.size() < 3;
  r.holdout = task.primes.size() >= 3 ? task.primes.back() : 0;
  std::ostringstream os;
  os << "primes:";
  for (auto p : task.primes) os << " " << p;
  os << "\nholdout: " << (r.holdout ? std::to_string(r.holdout) : "none") << "\n";
  os << "reconstructed: " << r.reconstructed << " pending: " << r.pending << "\n";
  if (r.provisional && r.complete) os << "provisional: true\n";
  for (int i = 0; i <= task.order; ++i)
    for (int j = 0; j <= task.degree; ++j) {
      os << "c[" << i << "][" << j << "] ";
      switch (task.status[i][j]) {
        case CoeffStatus::Reconstructed: os << "reconstructed " << value[i][j].get_str(); break;
        case CoeffStatus::Pending: os << "pending"; break;
        case CoeffStatus::Inconsistent: os << "inconsistent"; break;
      }
      os << "\n";
    }
  r.report = os.str();
  return r;
}

}  // namespace

ReconstructionResult reconstruct_operator(ReconstructionTask& task) {
  if (task.order < 0) throw InvalidArgument("empty reconstruction task");
  std::vector<std::vector<Rational>> value(task.order + 1,
                                           std::vector<Rational>(task.degree + 1, 0));
  std::vector<int> blocks;
  for (int i = task.order; i >= 0; --i) blocks.push_back(i);
  BlockOutcome out;
  reconstruct_blocks(task, blocks, task.hints, true, value, out);
  if (out.inconsistent > 0)
    throw HoldoutMismatch(std::to_string(out.inconsistent) +
                          " coefficient(s) disagree with the held-out prime " +
                          std::to_string(task.primes.back()));
  return assemble(task, value);
}

namespace {

void check_constraints_mod_p(const ReconstructionTask& task, const StructuralConstraints& sc) {
  for (size_t k = 0; k < task.ops.size(); ++k) {
    PrimeContext f(task.primes[k]);
    const auto& L = task.ops[k];
    for (auto& d : sc.divides_leading) {
      PolyP dp;
      try {
        dp = reduce_poly(d, f);
      } catch (const BadReductionAtP&) {
        continue;
      }
      if (dp.degree() < 1) continue;
      PolyP q;
      if (!poly_divides(dp, L.lead(), &q))
        throw ConstraintViolation("leading coefficient is not divisible by " + d.str() +
                                  " modulo " + std::to_string(f.modulus()));
    }
    for (auto& ec : sc.exponents) {
      uint32_t pt;
      PolyP want = PolyP::constant(f, f.one());
      try {
        pt = f.from_rational(ec.point);
        for (auto& e : ec.exponents)
          want = want * PolyP(f, {f.neg(f.from_rational(e)), f.one()});
      } catch (const BadReductionAtP&) {
        continue;
      }
      PolyP ind;
      try {
        ind = indicial_polynomial(L, Point<PrimeContext>::at(pt));
      } catch (const IrregularPoint&) {
        throw ConstraintViolation("point " + ec.point.get_str() + " is irregular modulo " +
                                  std::to_string(f.modulus()));
      }
      if (ind != want)
        throw ConstraintViolation("local exponents at " + ec.point.get_str() +
                                  " disagree modulo " + std::to_string(f.modulus()));
    }
  }
}

void check_constraints_exact(const OpQ& L, const StructuralConstraints& sc) {
  RationalField Q;
  for (auto& d : sc.divides_leading) {
    PolyQ q;
    if (d.degree() >= 1 && !poly_divides(d, L.lead(), &q))
      throw ConstraintViolation("leading coefficient is not divisible by " + d.str());
  }
  for (auto& ec : sc.exponents) {
    PolyQ want = PolyQ::constant(Q, 1);
    for (auto& e : ec.exponents) want = want * PolyQ(Q, {Rational(-e), Rational(1)});
    if (indicial_polynomial(L, Point<RationalField>::at(ec.point)) != want)
      throw ConstraintViolation("local exponents at " + ec.point.get_str() +
                                " disagree with the reconstruction");
  }
}

}  // namespace

std::string IterativeResult::str() const {
  std::ostringstream os;
  for (auto& s : stages) {
    os << "stage block=" << s.block << " reconstructed=" << s.reconstructed
       << " pending=" << s.pending << " hints:";
    for (auto& h : s.hints_used) os << " [" << h.str() << "]";
    os << "\n";
  }
  os << result.report;
  return os.str();
}

IterativeResult iterative_reconstruct(ReconstructionTask& task,
                                      const StructuralConstraints& constraints) {
  if (task.order < 0) throw InvalidArgument("empty reconstruction task");
  check_constraints_mod_p(task, constraints);
  IterativeResult res;
  std::vector<std::vector<Rational>> value(task.order + 1,
                                           std::vector<Rational>(task.degree + 1, 0));
  std::vector<ScaleHint> hints = task.hints;
  RationalField Q;
  for (int i = task.order; i >= 0; --i) {
    BlockOutcome out;
    reconstruct_blocks(task, {i}, hints, false, value, out);
    StageReport st{i, 0, 0, with_identity(hints)};
    for (int j = 0; j <= task.degree; ++j)
      (task.status[i][j] == CoeffStatus::Reconstructed ? st.reconstructed : st.pending)++;
    res.stages.push_back(st);
    if (st.pending == 0 && task.auto_hints) {
      // a finished block is exactly known: its scale guides the next ones
      PolyQ block(Q, value[i]);
      Integer den = 1;
      for (auto& c : value[i]) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
      auto add = [&](const ScaleHint& h) {
        for (auto& x : hints)
          if (x.scale == h.scale && x.var_scale == h.var_scale) return;
        hints.push_back(h);
      };
      if (den != 1) add({den, 1});
      for (auto& h : scaling_hints_from(block, 0)) add(h);
    }
  }
  res.result = assemble(task, value);
  if (res.result.complete) check_constraints_exact(res.result.op, constraints);
  return res;
}

bool nilpotence_gate(const OpQ& L, const std::vector<uint32_t>& avoid, int count) {
  int done = 0;
  uint64_t p = 10007;
  for (int tries = 0; done < count && tries < 50; ++tries, p = next_prime(p + 1)) {
    if (std::find(avoid.begin(), avoid.end(), p) != avoid.end()) continue;
    CurvatureReport rep;
    try {
      rep = p_curvature(L, static_cast<uint32_t>(p));
    } catch (const BadReductionAtP&) {
      continue;
    } catch (const ZeroInverse&) {
      continue;
    }
    if (!rep.nilpotent) return false;
    ++done;
  }
  return done == count;
}

void save_task(const std::string& dir, const std::string& stem, const ReconstructionTask& task) {
  fs::create_directories(dir);
  for (size_t k = 0; k < task.ops.size(); ++k)
    write_file((fs::path(dir) / (stem + ".p" + std::to_string(task.primes[k]) + ".lode")).string(),
               write_operator(task.ops[k]));
}

ReconstructionTask load_task(const std::string& dir, std::string* stem) {
  if (!fs::is_directory(dir)) throw InvalidArgument("not a directory: " + dir);
  std::map<uint32_t, OpP, std::greater<uint32_t>> by_prime;
  std::string st;
  for (auto& e : fs::directory_iterator(dir)) {
    std::string name = e.path().filename().string();
    const std::string ext = ".lode";
    if (name.size() <= ext.size() || name.compare(name.size() - ext.size(), ext.size(), ext) != 0)
      continue;
    std::string base = name.substr(0, name.size() - ext.size());
    auto dot = base.rfind(".p");
    if (dot == std::string::npos) continue;
    std::string digits = base.substr(dot + 2);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) continue;
    auto op = load_operator(e.path().string());
    auto* p = std::get_if<OpP>(&op);
    if (!p) throw ParseError(name + " is not a modular operator");
    if (std::to_string(p->field().modulus()) != digits)
      throw ParseError(name + " declares modulus " + std::to_string(p->field().modulus()));
    std::string s = base.substr(0, dot);
    if (!st.empty() && s != st) throw InvalidArgument("task directory holds two stems");
    st = s;
    by_prime.emplace(p->field().modulus(), *p);
  }
  if (by_prime.empty()) throw InvalidArgument("no <stem>.p<prime>.lode files in " + dir);
  std::vector<OpP> ops;
  for (auto& [p, L] : by_prime) ops.push_back(L);
  if (stem) *stem = st;
  return align_operators(ops);
}

void save_result(const std::string& dir, const std::string& stem, const ReconstructionResult& r) {
  fs::create_directories(dir);
  write_file((fs::path(dir) / (stem + ".recon.lode")).string(), write_operator(r.op));
  write_file((fs::path(dir) / "report.txt").string(), r.report);
}

}  // namespace orefactor
