#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "orefactor/field.hpp"

namespace orefactor {

struct Residue {
  Integer value;
  Integer modulus;
};

using ResidueSystem = std::vector<Residue>;

uint32_t mod_inverse(uint32_t a, const PrimeContext& ctx);

// Returns (x, M) with 0 <= x < M = prod m_i and x = v_i mod m_i.
std::pair<Integer, Integer> crt_combine(const ResidueSystem& rs);

// Wang reconstruction: n/d = u mod m with 2 max(|n|, d)^2 < m.
Rational rational_reconstruct(const Integer& u, const Integer& m);
Rational scaled_reconstruct(const Integer& u, const Integer& m,
                            const Integer& scale);

// Reduction of a rational modulo an arbitrary modulus (throws
// NoReconstruction-free BadReductionAtP when the denominator is not a unit).
Integer reduce_mod(const Rational& r, const Integer& m);

uint64_t next_prime(uint64_t n);
uint64_t prev_prime(uint64_t n);

// 2^15 - 19, -49, -51, -55.
std::vector<uint32_t> default_primes();
// OREFACTOR_PRIMES (comma separated) if set, default family otherwise.
std::vector<uint32_t> configured_primes();
// The configured family extended downwards with further primes to n entries.
std::vector<uint32_t> prime_family(size_t n);

}  // namespace orefactor
