#include "orefactor/polyroots.hpp"

#include <algorithm>

#include "orefactor/modarith.hpp"

namespace orefactor {

namespace {

PolyP one_poly(const PrimeContext& f) { return PolyP::constant(f, 1); }

bool poly_less(const PolyP& a, const PolyP& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = a.degree(); i >= 0; --i)
    if (a.coeff(i) != b.coeff(i)) return a.coeff(i) < b.coeff(i);
  return false;
}

// Yun's algorithm; also handles p-th powers.
std::vector<std::pair<PolyP, int>> squarefree_decomp(const PolyP& f0) {
  const PrimeContext& F = f0.field();
  std::vector<std::pair<PolyP, int>> out;
  PolyP f = f0.monic();
  if (f.degree() <= 0) return out;
  PolyP d = f.derivative();
  if (d.is_zero()) {
    // f = g(x^p) = g(x)^p
    std::vector<uint32_t> c;
    for (int i = 0; i <= f.degree(); i += F.modulus()) c.push_back(f.coeff(i));
    for (auto& [g, m] : squarefree_decomp(PolyP(F, c)))
      out.push_back({g, m * static_cast<int>(F.modulus())});
    return out;
  }
  PolyP a = poly_gcd(f, d);
  PolyP b = f / a;
  PolyP c = d / a;
  int i = 1;
  while (b.degree() > 0) {
    PolyP cd = c - b.derivative();
    PolyP g = poly_gcd(b, cd);
    if (g.degree() > 0) out.push_back({g.monic(), i});
    b = b / g;
    c = cd / g;
    a = a / g;
    ++i;
  }
  // leftover p-th power part in a
  if (a.degree() > 0) {
    for (auto& [g, m] : squarefree_decomp(a)) {
      bool merged = false;
      for (auto& [h, mm] : out)
        if (h == g) {
          mm += m;
          merged = true;
        }
      if (!merged) out.push_back({g, m});
    }
  }
  return out;
}

void equal_degree_split(const PolyP& g, int d, std::mt19937_64& rng,
                        std::vector<PolyP>& out) {
  const PrimeContext& F = g.field();
  if (g.degree() == d) {
    out.push_back(g.monic());
    return;
  }
  const uint64_t p = F.modulus();
  std::uniform_int_distribution<uint32_t> dist(0, F.modulus() - 1);
  for (;;) {
    std::vector<uint32_t> c(g.degree());
    for (auto& x : c) x = dist(rng);
    PolyP a(F, c);
    if (a.degree() <= 0) continue;
    // a^(1 + p + ... + p^(d-1)) then ^((p-1)/2)
    PolyP t = a % g, ap = a % g;
    for (int i = 1; i < d; ++i) {
      ap = powmod(ap, p, g);
      t = (t * ap) % g;
    }
    PolyP b = powmod(t, (p - 1) / 2, g) - one_poly(F);
    PolyP h = poly_gcd(g, b);
    if (h.degree() > 0 && h.degree() < g.degree()) {
      equal_degree_split(h, d, rng, out);
      equal_degree_split(g / h, d, rng, out);
      return;
    }
  }
}

}  // namespace

PolyP powmod(const PolyP& a, uint64_t e, const PolyP& m) {
  PolyP r = one_poly(a.field()) % m, b = a % m;
  while (e) {
    if (e & 1) r = (r * b) % m;
    e >>= 1;
    if (e) b = (b * b) % m;
  }
  return r;
}

PolyP powmod_x(uint64_t e, const PolyP& m) {
  return powmod(PolyP::x(m.field()), e, m);
}

std::vector<uint32_t> roots_mod_p(const PolyP& f0, uint64_t seed) {
  if (f0.is_zero()) throw InvalidArgument("roots of the zero polynomial");
  const PrimeContext& F = f0.field();
  std::vector<uint32_t> roots;
  PolyP f = f0.monic();
  if (f.degree() <= 0) return roots;
  PolyP xp = powmod_x(F.modulus(), f);
  PolyP g = poly_gcd(f, xp - PolyP::x(F));
  if (g.degree() <= 0) return roots;
  std::mt19937_64 rng(seed);
  std::vector<PolyP> lin;
  equal_degree_split(g, 1, rng, lin);
  for (auto& l : lin) roots.push_back(F.neg(l.coeff(0)));
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<std::pair<uint32_t, int>> roots_with_mult(const PolyP& f) {
  std::vector<std::pair<uint32_t, int>> out;
  const PrimeContext& F = f.field();
  for (uint32_t r : roots_mod_p(f)) {
    int m = 0;
    PolyP g = f;
    PolyP lin(F, {F.neg(r), 1});
    PolyP q;
    while (poly_divides(lin, g, &q)) {
      ++m;
      g = q;
    }
    out.push_back({r, m});
  }
  return out;
}

std::vector<FactorMult> factor_mod_p(const PolyP& f, uint64_t seed) {
  if (f.is_zero()) throw InvalidArgument("factoring the zero polynomial");
  std::vector<FactorMult> out;
  std::mt19937_64 rng(seed);
  const PrimeContext& F = f.field();
  for (auto& [s, mult] : squarefree_decomp(f)) {
    PolyP rest = s;
    PolyP h = PolyP::x(F);
    for (int d = 1; 2 * d <= rest.degree(); ++d) {
      h = powmod(h, F.modulus(), rest);
      PolyP g = poly_gcd(rest, h - PolyP::x(F));
      if (g.degree() > 0) {
        std::vector<PolyP> parts;
        equal_degree_split(g, d, rng, parts);
        for (auto& pp : parts) out.push_back({pp, mult});
        rest = rest / g;
        h = h % rest;
      }
    }
    if (rest.degree() > 0) out.push_back({rest.monic(), mult});
  }
  std::sort(out.begin(), out.end(), [](const FactorMult& a, const FactorMult& b) {
    if (a.factor != b.factor) return poly_less(a.factor, b.factor);
    return a.multiplicity < b.multiplicity;
  });
  return out;
}

namespace {

Integer eval_mod(const PolyQ& f, const Integer& x, const Integer& m) {
  Integer r = 0;
  for (int i = f.degree(); i >= 0; --i) {
    r = (r * x + Integer(f.coeff(i).get_num())) % m;
  }
  if (r < 0) r += m;
  return r;
}

std::vector<std::pair<PolyQ, int>> squarefree_decomp_q(const PolyQ& f0) {
  std::vector<std::pair<PolyQ, int>> out;
  PolyQ f = f0.monic();
  if (f.degree() <= 0) return out;
  PolyQ d = f.derivative();
  PolyQ a = poly_gcd(f, d);
  PolyQ b = f / a;
  PolyQ c = d / a;
  int i = 1;
  while (b.degree() > 0) {
    PolyQ cd = c - b.derivative();
    PolyQ g = poly_gcd(b, cd);
    if (g.degree() > 0) out.push_back({primitive_integer(g), i});
    b = b / g;
    c = cd / g;
    ++i;
  }
  return out;
}

}  // namespace

RationalRoots rational_roots(const PolyQ& f0) {
  if (f0.is_zero()) throw InvalidArgument("roots of the zero polynomial");
  RationalField Q;
  RationalRoots res;
  PolyQ f = primitive_integer(f0);
  int v = f.valuation();
  if (v > 0) {
    res.roots.push_back({Rational(0), v});
    f = f.shifted(-v);
  }
  if (f.degree() <= 0) return res;

  PolyQ s = primitive_integer(f / poly_gcd(f, f.derivative()));
  Integer lc = s.lead().get_num(), tc = s.coeff(0).get_num();
  Integer N = abs(lc) > abs(tc) ? Integer(abs(lc)) : Integer(abs(tc));
  Integer need = 2 * N * N;

  uint64_t P = (1ull << 31) - 1;
  for (;; P = prev_prime(P - 1)) {
    if (Integer(lc % Integer(static_cast<unsigned long>(P))) == 0) continue;
    PrimeContext F(P);
    PolyP sp = reduce_poly(s, F);
    if (poly_gcd(sp, sp.derivative()).degree() > 0) continue;
    std::vector<Rational> found;
    PolyQ ds = s.derivative();
    for (uint32_t r0 : roots_mod_p(sp)) {
      // Newton lifting of a simple root.
      Integer m = P, r = r0;
      while (m <= need) {
        Integer m2 = m * m;
        Integer fv = eval_mod(s, r, m2);
        Integer dv = eval_mod(ds, r, m2);
        Integer inv;
        mpz_invert(inv.get_mpz_t(), dv.get_mpz_t(), m2.get_mpz_t());
        r = (r - fv * inv) % m2;
        if (r < 0) r += m2;
        m = m2;
      }
      Rational cand;
      try {
        cand = rational_reconstruct(r, m);
      } catch (const NoReconstruction&) {
        continue;
      }
      if (s.eval(cand) == 0) found.push_back(cand);
    }
    std::sort(found.begin(), found.end());
    for (const auto& a : found) {
      PolyQ lin(Q, {-a, Rational(1)});
      int mult = 0;
      PolyQ q;
      while (poly_divides(lin, f, &q)) {
        ++mult;
        f = q;
      }
      res.roots.push_back({a, mult});
    }
    break;
  }
  std::sort(res.roots.begin(), res.roots.end());
  if (f.degree() > 0) res.remaining = squarefree_decomp_q(f);
  return res;
}

}  // namespace orefactor
