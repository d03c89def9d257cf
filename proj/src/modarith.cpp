#include "orefactor/modarith.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <string>

namespace orefactor {

namespace {

uint64_t mulmod64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

uint64_t powmod64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod64(r, a, m);
    a = mulmod64(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                     29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // This witness set is deterministic for all n < 2^64.
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                     29ull, 31ull, 37ull}) {
    uint64_t x = powmod64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeContext::PrimeContext(uint64_t p) {
  if (p >= (1ull << 31) || !is_prime_u64(p) || p == 2)
    throw NotPrime("modulus " + std::to_string(p) +
                   " is not an odd prime below 2^31");
  p_ = static_cast<uint32_t>(p);
}

PrimeContext::Elem PrimeContext::inv(Elem a) const {
  if (a == 0) throw ZeroInverse("inverse of 0 mod " + std::to_string(p_));
  int64_t r0 = p_, r1 = a, t0 = 0, t1 = 1;
  while (r1 != 0) {
    int64_t q = r0 / r1;
    int64_t r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    int64_t t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  return from_int(t0);
}

PrimeContext::Elem PrimeContext::pow(Elem a, uint64_t e) const {
  return static_cast<Elem>(powmod64(a, e, p_));
}

PrimeContext::Elem PrimeContext::from_integer(const Integer& v) const {
  Integer r = v % p_;
  if (r < 0) r += p_;
  return static_cast<Elem>(r.get_ui());
}

PrimeContext::Elem PrimeContext::from_rational(const Rational& v) const {
  Elem d = from_integer(v.get_den());
  if (d == 0)
    throw BadReductionAtP("denominator " + v.get_den().get_str() +
                          " vanishes mod " + std::to_string(p_));
  return mul(from_integer(v.get_num()), inv(d));
}

RationalField::Elem RationalField::pow(const Elem& a, uint64_t e) const {
  Elem r(1), b(a);
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

uint32_t mod_inverse(uint32_t a, const PrimeContext& ctx) {
  return ctx.inv(a % ctx.modulus());
}

std::pair<Integer, Integer> crt_combine(const ResidueSystem& rs) {
  Integer x = 0, m = 1;
  for (const auto& r : rs) {
    if (r.modulus <= 0) throw InvalidArgument("non-positive modulus");
    Integer g;
    mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), r.modulus.get_mpz_t());
    if (g != 1)
      throw NonCoprimeModuli("moduli " + m.get_str() + " and " +
                             r.modulus.get_str() + " share a factor");
    Integer v = r.value % r.modulus;
    if (v < 0) v += r.modulus;
    // x + m*t = v (mod m_i)
    Integer inv;
    mpz_invert(inv.get_mpz_t(), Integer(m % r.modulus).get_mpz_t(),
               r.modulus.get_mpz_t());
    Integer t = ((v - x) % r.modulus) * inv % r.modulus;
    if (t < 0) t += r.modulus;
    x += m * t;
    m *= r.modulus;
  }
  return {x, m};
}

Rational rational_reconstruct(const Integer& u, const Integer& m) {
  if (m <= 1) throw NoReconstruction("modulus too small");
  Integer uu = u % m;
  if (uu < 0) uu += m;
  // Largest N with 2 N^2 < m.
  Integer bound;
  mpz_sqrt(bound.get_mpz_t(), Integer((m - 1) / 2).get_mpz_t());
  while (2 * bound * bound >= m) --bound;
  Integer r0 = m, r1 = uu, t0 = 0, t1 = 1;
  while (abs(r1) > bound) {
    Integer q = r0 / r1;
    Integer r2 = r0 - q * r1;
    r0 = r1;
    r1 = r2;
    Integer t2 = t0 - q * t1;
    t0 = t1;
    t1 = t2;
  }
  if (t1 == 0 || abs(t1) > bound)
    throw NoReconstruction("no rational below the bound for " + uu.get_str() +
                           " mod " + m.get_str());
  Integer n = r1, d = t1;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  Integer g;
  mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  if (g != 1)
    throw NoReconstruction("reconstructed fraction is not reduced");
  mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), m.get_mpz_t());
  if (g != 1) throw NoReconstruction("denominator shares a factor with m");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

Rational scaled_reconstruct(const Integer& u, const Integer& m,
                            const Integer& scale) {
  if (scale == 0) throw ZeroScale("scale 0");
  Integer g;
  mpz_gcd(g.get_mpz_t(), scale.get_mpz_t(), m.get_mpz_t());
  if (g != 1) throw InvalidArgument("scale not coprime to modulus");
  Integer su = (u % m) * (scale % m) % m;
  if (su < 0) su += m;
  Rational r = rational_reconstruct(su, m);
  r /= Rational(scale);
  return r;
}

Integer reduce_mod(const Rational& r, const Integer& m) {
  Integer inv;
  if (mpz_invert(inv.get_mpz_t(), r.get_den().get_mpz_t(), m.get_mpz_t()) == 0)
    throw BadReductionAtP("denominator not invertible mod " + m.get_str());
  Integer v = r.get_num() * inv % m;
  if (v < 0) v += m;
  return v;
}

uint64_t next_prime(uint64_t n) {
  while (!is_prime_u64(n)) ++n;
  return n;
}

uint64_t prev_prime(uint64_t n) {
  while (n > 2 && !is_prime_u64(n)) --n;
  return n;
}

std::vector<uint32_t> default_primes() {
  return {32768 - 19, 32768 - 49, 32768 - 51, 32768 - 55};
}

std::vector<uint32_t> configured_primes() {
  const char* env = std::getenv("OREFACTOR_PRIMES");
  if (!env || !*env) return default_primes();
  std::vector<uint32_t> out;
  std::stringstream ss(env);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    uint64_t v = std::stoull(tok);
    PrimeContext check(v);
    out.push_back(static_cast<uint32_t>(v));
  }
  if (out.empty()) throw InvalidArgument("OREFACTOR_PRIMES is empty");
  return out;
}

std::vector<uint32_t> prime_family(size_t n) {
  std::vector<uint32_t> out = configured_primes();
  if (out.size() >= n) {
    out.resize(n);
    return out;
  }
  uint32_t lo = *std::min_element(out.begin(), out.end());
  while (out.size() < n) {
    lo = static_cast<uint32_t>(prev_prime(lo - 1));
    if (lo < 3) throw InvalidArgument("ran out of primes below the configured family");
    if (std::find(out.begin(), out.end(), lo) == out.end()) out.push_back(lo);
  }
  return out;
}

}  // namespace orefactor
