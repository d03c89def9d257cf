#include "orefactor/poly.hpp"

namespace orefactor {

Integer poly_content_lcm_den(const PolyQ& p) {
  Integer l = 1;
  for (const auto& c : p.coeffs())
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den().get_mpz_t());
  return l;
}

PolyQ primitive_integer(const PolyQ& p) {
  if (p.is_zero()) return p;
  Integer l = poly_content_lcm_den(p);
  Integer g = 0;
  std::vector<Rational> c;
  c.reserve(p.size());
  for (const auto& a : p.coeffs()) {
    Rational b = a * l;
    c.push_back(b);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), b.get_num().get_mpz_t());
  }
  if (p.lead() < 0) g = -g;
  for (auto& a : c) a /= g;
  return PolyQ(p.field(), std::move(c));
}

PolyP reduce_poly(const PolyQ& p, const PrimeContext& ctx) {
  std::vector<uint32_t> c;
  c.reserve(p.size());
  for (const auto& a : p.coeffs()) c.push_back(ctx.from_rational(a));
  return PolyP(ctx, std::move(c));
}

}  // namespace orefactor
