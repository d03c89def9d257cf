#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "orefactor/local.hpp"

using namespace orefactor;

namespace {

RationalField QQ;

OpQ theta_q(std::vector<std::vector<int64_t>> rows) {
  std::vector<PolyQ> c;
  for (auto& r : rows) c.push_back(PolyQ::from_ints(QQ, r));
  return OpQ(QQ, Basis::Theta, c);
}
OpQ ddw_q(std::vector<std::vector<int64_t>> rows) {
  std::vector<PolyQ> c;
  for (auto& r : rows) c.push_back(PolyQ::from_ints(QQ, r));
  return OpQ(QQ, Basis::Ddw, c);
}

using PtQ = Point<RationalField>;

}  // namespace

TEST_CASE("exponents at zero") {
  auto L = theta_q({{3}, {-4}, {1}});
  auto em = local_exponents(L, PtQ::at(0));
  REQUIRE(em.exponents.size() == 2);
  CHECK(em.exponents[0].first == 1);
  CHECK(em.exponents[1].first == 3);
  CHECK(em.exponents[0].second == 1);
  CHECK(em.total() == 2);
}

TEST_CASE("double exponent gives one log block") {
  auto L = theta_q({{0}, {0}, {1}});
  auto ls = formal_log_solutions(L, PtQ::at(0));
  REQUIRE(ls.blocks.size() == 1);
  CHECK(ls.blocks[0].max_log == 1);
  CHECK(ls.blocks[0].leading == 0);
  REQUIRE(ls.blocks[0].attach.size() == 2);
  CHECK(*ls.blocks[0].attach[0] == 0);
  CHECK(*ls.blocks[0].attach[1] == 0);

  auto L2 = theta_q({{4}, {-4}, {1}});  // (theta-2)^2
  auto ls2 = formal_log_solutions(L2, PtQ::at(0));
  REQUIRE(ls2.blocks.size() == 1);
  CHECK(ls2.blocks[0].leading == 2);
  CHECK(*ls2.blocks[0].attach[0] == 2);
  CHECK(*ls2.blocks[0].attach[1] == 2);
}

TEST_CASE("resonant exponents") {
  // theta(theta-3): solutions 1, w^3
  auto L = theta_q({{0}, {-3}, {1}});
  auto ls = formal_log_solutions(L, PtQ::at(0));
  CHECK(ls.solutions() == 2);
  CHECK(ls.max_log() == 0);
  CHECK(classify_singularity(L, PtQ::at(0)) == Singularity::Apparent);

  // theta(theta-3) + w forces a log
  auto L2 = theta_q({{0, 1}, {-3}, {1}});
  auto ls2 = formal_log_solutions(L2, PtQ::at(0));
  CHECK(ls2.solutions() == 2);
  CHECK(ls2.max_log() == 1);
  REQUIRE(ls2.blocks.size() == 1);
  // the log solution's log^1 part starts at w^3, log^0 part can start at w^0
  CHECK(ls2.blocks[0].max_log == 1);
  CHECK(ls2.blocks[0].leading == 3);
  CHECK(*ls2.blocks[0].attach[1] == 0);
  CHECK(classify_singularity(L2, PtQ::at(0)) == Singularity::TrueSingular);
}

TEST_CASE("irregular point") {
  auto L = ddw_q({{1}, {0, 0, 1}});  // w^2 D + 1
  CHECK_THROWS_AS(local_exponents(L, PtQ::at(0)), IrregularPoint);
  CHECK_THROWS_AS(classify_singularity(L, PtQ::at(0)), IrregularPoint);
}

TEST_CASE("ordinary points") {
  auto L = ddw_q({{0}, {0}, {0, 0, 1}});  // w^2 D^2
  CHECK(classify_singularity(L, PtQ::at(0)) == Singularity::Ordinary);
  auto L2 = ddw_q({{-1}, {-1, 1}});  // (w-1)D - 1
  CHECK(classify_singularity(L2, PtQ::at(2)) == Singularity::Ordinary);
  auto em = local_exponents(L2, PtQ::at(1));
  REQUIRE(em.exponents.size() == 1);
  CHECK(em.exponents[0].first == 1);
}

TEST_CASE("infinity") {
  auto L = theta_q({{-2}, {1}});  // y = w^2 -> x^-2
  auto em = local_exponents(L, PtQ::infinity());
  REQUIRE(em.exponents.size() == 1);
  CHECK(em.exponents[0].first == -2);
}

TEST_CASE("root-of point") {
  // (w^2+1) D - w, solution sqrt(w^2+1)
  auto L = ddw_q({{0, -1}, {1, 0, 1}});
  auto P = PolyQ::from_ints(QQ, {1, 0, 1});
  auto em = local_exponents(L, PtQ::root_of(P));
  REQUIRE(em.exponents.size() == 1);
  CHECK(em.exponents[0].first == Rational(1, 2));
  CHECK(classify_singularity(L, PtQ::root_of(P)) == Singularity::TrueSingular);
  // order 2 with a double exponent at the roots of w^2+1
  auto L2 = multiply(L, L);
  auto ls = formal_log_solutions(L2, PtQ::root_of(P));
  CHECK(ls.solutions() == 2);
  CHECK(ls.max_log() == 1);
  // ordinary at roots of w^2-2
  auto Q2 = PolyQ::from_ints(QQ, {-2, 0, 1});
  CHECK(classify_singularity(L, PtQ::root_of(Q2)) == Singularity::Ordinary);
}

TEST_CASE("log structure counts match order for split exponents") {
  // random operators whose indicial polynomial has integer roots
  std::mt19937 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 1 + rng() % 3;
    PolyQ R0 = PolyQ::constant(QQ, 1);
    for (int i = 0; i < n; ++i)
      R0 = R0 * PolyQ::from_ints(QQ, {-static_cast<int64_t>(rng() % 3), 1});
    std::vector<PolyQ> c(n + 1, PolyQ(QQ));
    for (int i = 0; i <= n; ++i) {
      std::vector<Rational> v{R0.coeff(i)};
      for (int j = 1; j <= 2; ++j) v.push_back(Rational(static_cast<int>(rng() % 5) - 2));
      c[i] = PolyQ(QQ, v);
    }
    if (c[n].coeff(0) == 0) continue;
    OpQ L(QQ, Basis::Theta, c);
    auto ls = formal_log_solutions(L, PtQ::at(0));
    CHECK(ls.solutions() == n);
    // same counts modulo a prime
    PrimeContext ctx(32749);
    auto Lp = reduce_op(L, ctx);
    auto lsp = formal_log_solutions(Lp, Point<PrimeContext>::at(0));
    CHECK(lsp.solutions() == n);
    CHECK(lsp.max_log() == ls.max_log());
  }
}
