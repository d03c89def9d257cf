#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "orefactor/io.hpp"

using namespace orefactor;

namespace {
RationalField QQ;
PrimeContext P(32749);
}  // namespace

TEST_CASE("series-v1 layout") {
  SeriesQ s(QQ, 1, {Rational(1), Rational(-1, 2), Rational(0), Rational(7, 3)});
  std::string t = write_series(s);
  CHECK(t == "series-v1\nmodulus: 0\nvaluation: 1\ncount: 4\n1 -1/2 0 7/3\n");
  auto back = std::get<SeriesQ>(parse_series(t));
  CHECK(back == s);
}

TEST_CASE("series-v1 modular roundtrip and reduction of fractions") {
  SeriesP s(P, 0, {1, 2, 32748});
  auto back = std::get<SeriesP>(parse_series(write_series(s)));
  CHECK(back == s);
  auto r = std::get<SeriesP>(parse_series("series-v1\nmodulus: 32749\nvaluation: 0\ncount: 2\n-1 1/2\n"));
  CHECK(r.at(0) == 32748);
  CHECK(r.at(1) == P.inv(2));
}

TEST_CASE("series-v1 errors") {
  CHECK_THROWS_AS(parse_series("series-v2\n"), ParseError);
  CHECK_THROWS_AS(parse_series("series-v1\nmodulus: 0\nvaluation: 0\ncount: 3\n1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_series("series-v1\nmodulus: 0\nvaluation: 0\ncount: 1\n1/0\n"), ParseError);
  CHECK_THROWS_AS(parse_series("series-v1\nmodulus: 0\nvaluation: 0\ncount: 1\nabc\n"), ParseError);
  CHECK_THROWS_AS(parse_series("series-v1\nmodulus: 32750\nvaluation: 0\ncount: 0\n"), NotPrime);
}

TEST_CASE("lode-v1 layout and roundtrip") {
  auto L = make_op(QQ, Basis::Ddw, {{4, 28, 16}, {0, -3}, {0, 0, 1}});
  std::string t = write_operator(L);
  CHECK(t ==
        "lode-v1\nmodulus: 0\nbasis: ddw\norder: 2\ndegree: 2\n"
        "0: 4 28 16\n1: 0 -3 0\n2: 0 0 1\n");
  CHECK(std::get<OpQ>(parse_operator(t)) == L);
  auto Lp = reduce_op(L, P);
  CHECK(std::get<OpP>(parse_operator(write_operator(Lp))) == Lp);
  CHECK(as_modular(parse_operator(t), P) == Lp);
  CHECK(modulus_of(parse_operator(write_operator(Lp))) == 32749);
  CHECK_THROWS_AS(as_rational(parse_operator(write_operator(Lp))), InvalidArgument);
}

TEST_CASE("lode-v1 comments and errors") {
  auto L = std::get<OpQ>(parse_operator(
      "# V test\nlode-v1\nmodulus: 0\nbasis: theta\norder: 1\ndegree: 1\n0: 1 -1/2\n1: 0 1  # lead\n"));
  CHECK(L.basis() == Basis::Theta);
  CHECK(L.coeff(0).coeff(1) == Rational(-1, 2));
  CHECK_THROWS_AS(parse_operator("lode-v1\nmodulus: 0\nbasis: foo\norder: 0\ndegree: 0\n0: 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_operator("lode-v1\nmodulus: 0\nbasis: ddw\norder: 1\ndegree: 0\n0: 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_operator("lode-v1\nmodulus: 0\nbasis: ddw\norder: 0\ndegree: 1\n0: 1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_operator("lode-v1\nmodulus: 0\nbasis: ddw\norder: 0\ndegree: 0\n1: 1\n"),
                  ParseError);
}

TEST_CASE("ansatz listing roundtrip") {
  AnsatzSolution<RationalField> s{1, EllipticVar::W,
                                  {{PolyQ::from_ints(QQ, {0, 1}), 2},
                                   {PolyQ::from_ints(QQ, {1, -4}), -1}},
                                  {PolyQ::from_ints(QQ, {1, 0, -16}), PolyQ::constant(QQ, Rational(-2, 3))}};
  std::string t = s.str();
  CHECK(t ==
        "degree: 1\nvariable: w\nprefactor: [0 1]^2 [1 -4]^-1\nP_{1,0}: 1 0 -16\nP_{0,1}: -2/3\n");
  auto b = parse_ansatz(t);
  CHECK(b.g == 1);
  CHECK(b.var == EllipticVar::W);
  REQUIRE(b.prefactor.size() == 2);
  CHECK(b.prefactor[1].exponent == -1);
  CHECK(b.prefactor[1].poly == s.prefactor[1].poly);
  CHECK(b.P == s.P);
}

TEST_CASE("prefactor terms from the command line") {
  auto t = parse_prefactor_term("1,-16:-4");
  CHECK(t.exponent == -4);
  CHECK(t.poly == PolyQ::from_ints(QQ, {1, -16}));
  CHECK_THROWS_AS(parse_prefactor_term("1,-16"), ParseError);
  CHECK_THROWS_AS(parse_prefactor_term("5:2"), ParseError);
}
