#include "orefactor/diffop.hpp"

namespace orefactor {

SeriesP reduce_series(const SeriesQ& s, const PrimeContext& ctx) {
  std::vector<uint32_t> c;
  c.reserve(s.length());
  for (const auto& a : s.coeffs()) c.push_back(ctx.from_rational(a));
  return SeriesP(ctx, s.valuation(), std::move(c));
}

OpP reduce_op(const OpQ& L, const PrimeContext& ctx) {
  std::vector<PolyP> c;
  for (const auto& p : L.coeffs()) c.push_back(reduce_poly(p, ctx));
  OpP r(ctx, L.basis(), std::move(c));
  if (r.order() != L.order())
    throw BadReductionAtP("leading coefficient vanishes mod " +
                          std::to_string(ctx.modulus()));
  return r;
}

}  // namespace orefactor
