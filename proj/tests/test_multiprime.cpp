#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <functional>
#include <random>

#include "orefactor/io.hpp"
#include "orefactor/multiprime.hpp"

using namespace orefactor;

namespace {

RationalField QQ;

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(uint64_t seed) : rng(seed) {}
  Integer integer(int bits) {
    Integer v = 0;
    for (int b = 0; b < bits; b += 30) {
      v <<= 30;
      v += static_cast<unsigned long>(rng() & ((1u << 30) - 1));
    }
    v >>= (bits + 29) / 30 * 30 - bits;
    return (rng() & 1) ? Integer(-v) : v;
  }
  Integer bounded(const Integer& h) {  // uniform-ish in [-h, h]
    Integer v = integer(static_cast<int>(mpz_sizeinbase(h.get_mpz_t(), 2)) + 1);
    v %= (h + 1);
    return v;
  }
  // Operator whose top coefficient of the leading polynomial is 1.
  OpQ op(int order, int degree, const std::function<Rational(int, int)>& coeff) {
    std::vector<PolyQ> c;
    for (int i = 0; i <= order; ++i) {
      std::vector<Rational> v;
      for (int j = 0; j <= degree; ++j) v.push_back(i == order && j == degree ? Rational(1) : coeff(i, j));
      c.emplace_back(QQ, v);
    }
    return OpQ(QQ, Basis::Ddw, c);
  }
};

std::vector<OpP> reduce_all(const OpQ& L, const std::vector<uint32_t>& primes) {
  std::vector<OpP> out;
  for (auto p : primes) out.push_back(reduce_op(L, PrimeContext(p)));
  return out;
}

}  // namespace

TEST_CASE("alignment fixes the gauge") {
  Gen g(1);
  auto L = g.op(2, 7, [&](int, int) { return Rational(g.bounded(1000000)); });
  auto ops = reduce_all(L, {32749, 32719, 32717});
  // scale one of them by an arbitrary unit
  ops[1] = ops[1].scaled(12345);
  auto t = align_operators(ops);
  CHECK(t.num_primes() == 3);
  for (auto& o : t.ops) CHECK(o.lead().lead() == 1);
  CHECK(t.ops[1] == reduce_op(L, PrimeContext(32719)));
}

TEST_CASE("alignment rejects differing shapes") {
  auto A = make_op(QQ, Basis::Ddw, {{1}, {0, 1}});
  auto B = make_op(QQ, Basis::Ddw, {{1}, {0, 1}, {1}});
  CHECK_THROWS_AS(align_operators({reduce_op(A, PrimeContext(32749)), reduce_op(B, PrimeContext(32719))}),
                  ShapeMismatch);
  CHECK_THROWS_AS(align_operators({reduce_op(A, PrimeContext(32749)), reduce_op(A, PrimeContext(32749))}),
                  ShapeMismatch);
  auto C = make_op(QQ, Basis::Theta, {{1}, {0, 1}});
  CHECK_THROWS_AS(align_operators({reduce_op(A, PrimeContext(32749)), reduce_op(C, PrimeContext(32719))}),
                  ShapeMismatch);
}

TEST_CASE("one prime leaves every coefficient pending") {
  Gen g(2);
  auto L = g.op(1, 3, [&](int, int) { return Rational(g.bounded(100)); });
  auto t = align_operators(reduce_all(L, {32749}));
  auto r = reconstruct_operator(t);
  CHECK_FALSE(r.complete);
  CHECK(r.reconstructed == 0);
  CHECK(r.pending == 8);
}

TEST_CASE("roundtrip with a held-out prime") {
  Gen g(3);
  for (int rep = 0; rep < 10; ++rep) {
    auto L = g.op(2, 7, [&](int, int) { return Rational(g.bounded(1000000)); });
    auto t = align_operators(reduce_all(L, default_primes()));
    auto r = reconstruct_operator(t);
    CHECK(r.complete);
    CHECK_FALSE(r.provisional);
    CHECK(r.holdout == 32713);
    CHECK(r.op == L);
  }
}

TEST_CASE("dyadic denominators need the scale hint with two primes") {
  Gen g(4);
  Integer s = Integer(1) << 16;
  auto L = g.op(2, 7, [&](int, int) {
    Rational r(2 * g.bounded(100) + 1, s);
    r.canonicalize();
    return r;
  });
  std::vector<uint32_t> two{32749, 32719};
  auto plain = align_operators(reduce_all(L, two));
  auto r0 = reconstruct_operator(plain);
  CHECK(r0.op != L);
  auto hinted = align_operators(reduce_all(L, two));
  hinted.hints.push_back({s, 1});
  auto r1 = reconstruct_operator(hinted);
  CHECK(r1.complete);
  CHECK(r1.provisional);
  CHECK(r1.op == L);
}

TEST_CASE("too few primes is caught by the held-out prime") {
  Gen g(5);
  auto L = g.op(2, 7, [&](int, int) {
    Rational r(g.integer(40), g.integer(40) * 2 + 1);
    r.canonicalize();
    return r;
  });
  auto t = align_operators(reduce_all(L, {32749, 32719, 32717}));
  CHECK_THROWS_AS(reconstruct_operator(t), HoldoutMismatch);
  bool inconsistent = false;
  for (auto& row : t.status)
    for (auto st : row) inconsistent = inconsistent || st == CoeffStatus::Inconsistent;
  CHECK(inconsistent);
}

TEST_CASE("adding primes never changes a verified coefficient") {
  Gen g(6);
  auto L = g.op(1, 5, [&](int i, int j) {
    // mixed heights: some coefficients are easy, others need many primes
    Rational r(g.integer(8 + 12 * ((i + j) % 5)), 1);
    return r;
  });
  auto primes = prime_family(9);
  std::vector<std::vector<Rational>> seen(2, std::vector<Rational>(6));
  std::vector<std::vector<bool>> have(2, std::vector<bool>(6, false));
  for (size_t n = 3; n <= primes.size(); ++n) {
    auto t = align_operators(reduce_all(L, std::vector<uint32_t>(primes.begin(), primes.begin() + n)));
    ReconstructionResult r;
    try {
      r = iterative_reconstruct(t, {}).result;
    } catch (const HoldoutMismatch&) {
      continue;
    }
    for (int i = 0; i <= 1; ++i)
      for (int j = 0; j <= 5; ++j) {
        if (t.status[i][j] != CoeffStatus::Reconstructed) continue;
        auto v = r.op.coeff(i).coeff(j);
        if (have[i][j]) CHECK(seen[i][j] == v);
        seen[i][j] = v;
        have[i][j] = true;
      }
    if (n == primes.size()) CHECK(r.op == L);
  }
}

TEST_CASE("scaling hints from a known polynomial") {
  auto p = PolyQ(QQ, {Rational(0), Rational(3) * Rational(Integer(1) << 38), Rational(5)});
  auto h = scaling_hints_from(p, 1);
  REQUIRE(h.size() == 3);
  CHECK(h[0].scale == Integer(1) << 39);
  CHECK(h[1].scale == Integer(1) << 40);
  CHECK(h[2].scale == Integer(1) << 38);
}

TEST_CASE("degree-37 apparent polynomial: dyadic scale and w -> w/2") {
  // P(w) = U(2w) with |u_j| < 2^35; normalised to a monic top coefficient
  // its coefficients are u_j / (u_37 2^(37-j)).
  Gen g(7);
  std::vector<Integer> u(38);
  for (auto& x : u) x = g.integer(35);
  u[37] = abs(u[37]) | 1;
  std::vector<Rational> c;
  for (int j = 0; j <= 37; ++j) {
    Rational r(u[j] << j, 1);
    c.push_back(r);
  }
  PolyQ lead(QQ, c);
  auto L = OpQ(QQ, Basis::Ddw, {PolyQ(QQ), lead}).scaled(Rational(1) / lead.lead());
  auto primes = prime_family(11);

  // 0: no hints at all, 1: automatic 2-adic hints, 2: explicit scale and
  // variable rescaling
  auto needed = [&](int mode) {
    for (size_t n = 2; n + 1 <= primes.size(); ++n) {
      auto t = align_operators(reduce_all(L, std::vector<uint32_t>(primes.begin(), primes.begin() + n + 1)));
      t.auto_hints = mode == 1;
      if (mode == 2) t.hints.push_back({Integer(1) << 37, Rational(1, 2)});
      try {
        auto r = iterative_reconstruct(t, {}).result;
        if (r.complete && r.op == L) return static_cast<int>(n);
      } catch (const HoldoutMismatch&) {
      }
    }
    return 99;
  };
  int plain = needed(0), dyadic = needed(1), scaled = needed(2);
  CHECK(plain > 9);
  CHECK(dyadic < plain);
  CHECK(dyadic > 5);
  CHECK(scaled == 5);
}

TEST_CASE("staged reconstruction uses the finished block as a scale") {
  // monic apparent block with lowest coefficient 2^20, trailing block with
  // denominators 2^24; three primes plus a held-out one
  Gen g(8);
  std::vector<Rational> a{Rational(Integer(1) << 20)};
  for (int j = 1; j < 6; ++j) a.push_back(Rational(g.bounded(50)));
  a.push_back(1);
  std::vector<Rational> b;
  Integer s = Integer(1) << 24;
  for (int j = 0; j <= 6; ++j) {
    Rational r(2 * g.bounded(500) + 1, s);
    r.canonicalize();
    b.push_back(r);
  }
  OpQ L(QQ, Basis::Ddw, {PolyQ(QQ, b), PolyQ(QQ, a)});
  auto primes = prime_family(4);
  auto t = align_operators(reduce_all(L, primes));
  try {
    auto r = reconstruct_operator(t);
    CHECK_FALSE(r.complete);
  } catch (const HoldoutMismatch&) {
  }
  auto t2 = align_operators(reduce_all(L, primes));
  auto it = iterative_reconstruct(t2, {});
  REQUIRE(it.stages.size() == 2);
  CHECK(it.stages[0].block == 1);
  CHECK(it.stages[0].pending == 0);
  CHECK(it.stages[1].pending == 0);
  CHECK(it.result.op == L);
}

TEST_CASE("structural constraints") {
  // (w - 1) D - 1 with exponent 1 at w = 1
  auto L = make_op(QQ, Basis::Ddw, {{-1}, {-1, 1}});
  auto primes = prime_family(4);
  auto t = align_operators(reduce_all(L, primes));
  StructuralConstraints ok;
  ok.divides_leading.push_back(PolyQ::from_ints(QQ, {-1, 1}));
  ok.exponents.push_back({Rational(1), {Rational(1)}});
  auto r = iterative_reconstruct(t, ok);
  CHECK(r.result.op == L);

  StructuralConstraints bad_div;
  bad_div.divides_leading.push_back(PolyQ::from_ints(QQ, {1, 1}));
  auto t2 = align_operators(reduce_all(L, primes));
  CHECK_THROWS_AS(iterative_reconstruct(t2, bad_div), ConstraintViolation);

  StructuralConstraints bad_exp;
  bad_exp.exponents.push_back({Rational(1), {Rational(3)}});
  auto t3 = align_operators(reduce_all(L, primes));
  CHECK_THROWS_AS(iterative_reconstruct(t3, bad_exp), ConstraintViolation);
}

TEST_CASE("global nilpotence gate") {
  auto E = make_op(QQ, Basis::Theta, {{0, 0, 16}, {0}, {1, 0, -16}});
  CHECK(nilpotence_gate(E));
  auto N = make_op(QQ, Basis::Ddw, {{1, 3}, {1, 0, 2}, {2, 1, 0, 1}});
  CHECK_FALSE(nilpotence_gate(N));
}

TEST_CASE("task directory roundtrip") {
  Gen g(9);
  auto L = g.op(2, 4, [&](int, int) { return Rational(g.bounded(1000)); });
  auto t = align_operators(reduce_all(L, default_primes()));
  auto dir = (std::filesystem::temp_directory_path() / "orefactor_task_test").string();
  std::filesystem::remove_all(dir);
  save_task(dir, "demo", t);
  std::string stem;
  auto back = load_task(dir, &stem);
  CHECK(stem == "demo");
  CHECK(back.primes == t.primes);
  auto r = reconstruct_operator(back);
  CHECK(r.op == L);
  save_result(dir, stem, r);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "demo.recon.lode"));
  CHECK(std::get<OpQ>(load_operator(dir + "/demo.recon.lode")) == L);
  CHECK(read_file(dir + "/report.txt").find("c[2][4] reconstructed 1") != std::string::npos);
  std::filesystem::remove_all(dir);
}
