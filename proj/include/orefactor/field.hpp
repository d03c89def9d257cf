#pragma once

#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "orefactor/errors.hpp"

namespace orefactor {

using Rational = mpq_class;
using Integer = mpz_class;

bool is_prime_u64(uint64_t n);

// Arithmetic in Z/pZ for a prime p < 2^31. Elements are kept in [0, p).
class PrimeContext {
 public:
  using Elem = uint32_t;

  PrimeContext() = default;  // placeholder only; not a usable field
  explicit PrimeContext(uint64_t p);

  uint32_t modulus() const { return p_; }
  uint64_t characteristic() const { return p_; }
  static constexpr bool exact = false;

  Elem zero() const { return 0; }
  Elem one() const { return 1; }
  bool is_zero(Elem a) const { return a == 0; }
  bool eq(Elem a, Elem b) const { return a == b; }

  Elem add(Elem a, Elem b) const {
    uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Elem sub(Elem a, Elem b) const { return a >= b ? a - b : a + p_ - b; }
  Elem neg(Elem a) const { return a == 0 ? 0 : p_ - a; }
  Elem mul(Elem a, Elem b) const {
    return static_cast<Elem>(static_cast<uint64_t>(a) * b % p_);
  }
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }
  Elem pow(Elem a, uint64_t e) const;

  Elem from_int(int64_t v) const {
    int64_t r = v % static_cast<int64_t>(p_);
    if (r < 0) r += p_;
    return static_cast<Elem>(r);
  }
  Elem from_integer(const Integer& v) const;
  // Throws BadReductionAtP when the denominator vanishes mod p.
  Elem from_rational(const Rational& v) const;

  std::string str(Elem a) const { return std::to_string(a); }
  Integer to_integer(Elem a) const { return Integer(a); }

  bool operator==(const PrimeContext& o) const { return p_ == o.p_; }
  bool operator!=(const PrimeContext& o) const { return p_ != o.p_; }

 private:
  uint32_t p_ = 0;
};

// Exact rationals backed by GMP.
class RationalField {
 public:
  using Elem = Rational;

  uint64_t characteristic() const { return 0; }
  static constexpr bool exact = true;

  Elem zero() const { return Elem(0); }
  Elem one() const { return Elem(1); }
  bool is_zero(const Elem& a) const { return sgn(a) == 0; }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }

  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem inv(const Elem& a) const {
    if (sgn(a) == 0) throw ZeroInverse("inverse of zero rational");
    return 1 / a;
  }
  Elem div(const Elem& a, const Elem& b) const { return mul(a, inv(b)); }
  Elem pow(const Elem& a, uint64_t e) const;

  Elem from_int(int64_t v) const { return Elem(static_cast<long>(v)); }
  Elem from_integer(const Integer& v) const { return Elem(v); }
  Elem from_rational(const Rational& v) const { return v; }

  std::string str(const Elem& a) const { return a.get_str(); }

  bool operator==(const RationalField&) const { return true; }
  bool operator!=(const RationalField&) const { return false; }
};

}  // namespace orefactor
