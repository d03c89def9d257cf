#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "orefactor/poly.hpp"

namespace orefactor {

struct FactorMult {
  PolyP factor;  // monic, irreducible over F_p
  int multiplicity;
};

// x^e mod m over F_p.
PolyP powmod_x(uint64_t e, const PolyP& m);
PolyP powmod(const PolyP& a, uint64_t e, const PolyP& m);

// Distinct roots in F_p of a nonzero polynomial, ascending.
std::vector<uint32_t> roots_mod_p(const PolyP& f, uint64_t seed = 1);
// Roots with multiplicity.
std::vector<std::pair<uint32_t, int>> roots_with_mult(const PolyP& f);
// Complete factorization into monic irreducibles with multiplicities,
// sorted by (degree, coefficients).
std::vector<FactorMult> factor_mod_p(const PolyP& f, uint64_t seed = 1);

struct RationalRoots {
  std::vector<std::pair<Rational, int>> roots;  // ascending
  // What is left after dividing out all rational roots (integer primitive,
  // may still be reducible over Q), with multiplicity.
  std::vector<std::pair<PolyQ, int>> remaining;
};

RationalRoots rational_roots(const PolyQ& f);

}  // namespace orefactor
