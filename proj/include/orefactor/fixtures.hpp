#pragma once

#include <string>
#include <vector>

#include "orefactor/elliptic.hpp"
#include "orefactor/io.hpp"

namespace orefactor {

struct FixtureInfo {
  std::string name;
  std::string file;
  std::string sha256;  // pinned digest of the shipped file
  std::string description;
};

const std::vector<FixtureInfo>& fixture_registry();
const FixtureInfo& fixture_info(const std::string& name);

// OREFACTOR_FIXTURES if set, otherwise the fixtures/ directory of the source tree.
std::string fixture_dir();
std::string fixture_path(const std::string& name, const std::string& dir = "");

std::string sha256_hex(const std::string& data);

OpQ load_fixture_operator(const std::string& name, const std::string& dir = "");
AnsatzSolution<RationalField> load_fixture_ansatz(const std::string& name,
                                                  const std::string& dir = "");

// App(F_2) = 1 + w - 24w^2 - 145w^3 - 192w^4 + 96w^5 + 128w^7
PolyQ f2_apparent_polynomial();

struct ExponentRow {
  std::string label;  // "0", "1/4", "inf", "App(F2)"
  Point<RationalField> point;
  std::vector<Rational> expected;  // ascending, with multiplicity
};

// Local exponents of F~_3 at its singular points, as published.
std::vector<ExponentRow> f3tilde_exponent_table();

// F_3 with solutions multiplied by mu = w^2 (1-4w)^(9/2) (1+4w)^(7/2) (1-w)
// (1+2w) (1+3w+4w^2) App(F_2).
OpQ f3_to_f3tilde(const OpQ& F3);

// Product of L_1 with F_2 in monic form, cleared of denominators.
OpQ desingularized_f2(const OpQ& L1, const OpQ& F2);

struct CheckLine {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckLine> lines;
  bool ok() const;
  std::string str() const;
  void add(std::string name, bool ok, std::string detail = "");
};

// Sorted exponent list, or empty when the indicial polynomial has irrational roots.
std::vector<Rational> exponent_list(const OpQ& L, const Point<RationalField>& pt);
std::string exponent_str(const std::vector<Rational>& e);

// Hash pins plus cheap invariants: V_2 annihilates its elliptic solution,
// F~_3 at w = 1/2, the appendix combination is a valid listing.
CheckReport verify_fixtures(const std::string& dir = "");

// L_1 F_2 desingularization, the full F~_3 exponent table, F~_3 = gauge of
// F_3, and p-curvature nilpotence of F_3 at three primes.
CheckReport selftest_f3(const std::string& dir = "");

}  // namespace orefactor
