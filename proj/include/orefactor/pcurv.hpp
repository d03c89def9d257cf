#pragma once

#include <cstdint>
#include <string>

#include "orefactor/diffop.hpp"
#include "orefactor/extfield.hpp"
#include "orefactor/linalg.hpp"

namespace orefactor {

struct CurvatureReport {
  uint32_t prime = 0;
  int order = 0;
  bool nilpotent = false;
  int index = 0;  // smallest k with M^k = 0, 0 when not nilpotent
  std::string str() const;
};

// Value at an ordinary point w0 of the p-curvature of the companion system.
// Computed from the Taylor expansion of a fundamental matrix at w0, whose
// obstruction in degree p is the curvature. Cost O(p * deg * n^3).
Matrix<PrimeContext> p_curvature_at(const OpP& L, uint32_t w0);

// Exact p-curvature matrix over F_p(w) by M_1 = A, M_{k+1} = M_k' + M_k A.
// Only sensible for small p.
Matrix<RatFuncField<PrimeContext>> p_curvature_matrix(const OpP& L);

// Nilpotency test from the curvature at `samples` random ordinary points.
CurvatureReport p_curvature(const OpP& L, int samples = 3, uint64_t seed = 1);
CurvatureReport p_curvature(const OpQ& L, uint32_t p, int samples = 3);

// Smallest k <= n with M^k = 0, or 0.
int nilpotency_index(const PrimeContext& f, const Matrix<PrimeContext>& M);

}  // namespace orefactor
