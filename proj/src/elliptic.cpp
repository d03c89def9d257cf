#include "orefactor/elliptic.hpp"

namespace orefactor {

Prefactor<PrimeContext> reduce_prefactor(const Prefactor<RationalField>& pf,
                                         const PrimeContext& ctx) {
  Prefactor<PrimeContext> out;
  for (auto& t : pf) out.push_back({reduce_poly(t.poly, ctx), t.exponent});
  return out;
}

AnsatzSolution<RationalField> reconstruct_ansatz(
    const std::vector<AnsatzSolution<PrimeContext>>& per_prime,
    const std::vector<uint32_t>& primes) {
  if (per_prime.empty() || per_prime.size() != primes.size())
    throw InvalidArgument("reconstruct_ansatz needs one solution per prime");
  const auto& s0 = per_prime[0];
  RationalField Q;
  AnsatzSolution<RationalField> out;
  out.g = s0.g;
  out.var = s0.var;
  for (int i = 0; i <= s0.g; ++i) {
    int deg = -1;
    for (auto& s : per_prime) {
      if (s.g != s0.g) throw ShapeMismatch("ansatz degrees differ across primes");
      deg = std::max(deg, s.P[i].degree());
    }
    std::vector<Rational> c;
    for (int k = 0; k <= deg; ++k) {
      ResidueSystem rs;
      for (size_t j = 0; j < primes.size(); ++j)
        rs.push_back({Integer(per_prime[j].P[i].coeff(k)), Integer(primes[j])});
      auto [x, m] = crt_combine(rs);
      c.push_back(rational_reconstruct(x, m));
    }
    out.P.emplace_back(Q, std::move(c));
  }
  return out;
}

namespace {

bool same(const std::vector<AnsatzSolution<RationalField>>& a,
          const std::vector<AnsatzSolution<RationalField>>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].P != b[i].P) return false;
  return true;
}

}  // namespace

std::vector<AnsatzSolution<RationalField>> ansatz_solve_rational(
    const OpQ& L, int g, const Prefactor<RationalField>& pf, int Dmax, EllipticVar var,
    const std::vector<uint32_t>& primes_in) {
  std::vector<uint32_t> pool = primes_in.empty() ? configured_primes() : primes_in;
  const size_t max_primes = primes_in.empty() ? 40 : primes_in.size();
  std::vector<uint32_t> used;
  std::vector<std::vector<AnsatzSolution<PrimeContext>>> sols;
  std::vector<AnsatzSolution<RationalField>> prev;
  int shape_dim = -1, shape_D = -1;
  bool any_solution = false;
  for (size_t idx = 0; used.size() < max_primes; ++idx) {
    if (idx >= pool.size()) {
      if (!primes_in.empty()) break;
      pool.push_back(static_cast<uint32_t>(prev_prime(pool.back() - 1)));
    }
    PrimeContext ctx(pool[idx]);
    std::vector<AnsatzSolution<PrimeContext>> s;
    try {
      s = ansatz_solve(reduce_op(L, ctx), g, reduce_prefactor(pf, ctx), Dmax, var);
    } catch (const NoSolutionAtDegree&) {
      continue;
    } catch (const BadReductionAtP&) {
      continue;
    } catch (const ZeroInverse&) {
      continue;
    }
    any_solution = true;
    int D = 0;
    for (auto& a : s)
      for (auto& p : a.P) D = std::max(D, p.degree());
    // Unlucky primes give larger kernels or need larger degrees; keep the
    // smallest shape seen.
    int dim = static_cast<int>(s.size());
    if (shape_dim >= 0 && (dim > shape_dim || (dim == shape_dim && D > shape_D))) continue;
    if (shape_dim < 0 || dim < shape_dim || D < shape_D) {
      used.clear();
      sols.clear();
      prev.clear();
      shape_dim = dim;
      shape_D = D;
    }
    used.push_back(pool[idx]);
    sols.push_back(std::move(s));
    std::vector<AnsatzSolution<RationalField>> cur;
    try {
      for (int b = 0; b < shape_dim; ++b) {
        std::vector<AnsatzSolution<PrimeContext>> col;
        for (auto& v : sols) col.push_back(v[b]);
        auto r = reconstruct_ansatz(col, used);
        r.prefactor = pf;
        cur.push_back(std::move(r));
      }
    } catch (const NoReconstruction&) {
      continue;
    }
    if (!prev.empty() && same(prev, cur)) return cur;
    prev = std::move(cur);
  }
  if (!any_solution)
    throw NoSolutionAtDegree("no ansatz solution with polynomial degree <= " +
                             std::to_string(Dmax));
  throw NoReconstruction("ansatz coefficients did not stabilise");
}

}  // namespace orefactor
