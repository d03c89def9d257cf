#include "orefactor/fixtures.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "orefactor/local.hpp"
#include "orefactor/pcurv.hpp"

#ifndef OREFACTOR_FIXTURE_DIR
#define OREFACTOR_FIXTURE_DIR "fixtures"
#endif

namespace orefactor {

namespace {
RationalField QQ;

PolyQ P(std::vector<int64_t> c) { return PolyQ::from_ints(QQ, c); }
}  // namespace

const std::vector<FixtureInfo>& fixture_registry() {
  static const std::vector<FixtureInfo> reg = {
      {"V2", "V2.lode",
       "eda2e5a595ad5f2eef0543a04335c17b030675b19165d0499776d186331998c2",
       "second order factor V_2 of L_11"},
      {"F2", "F2.lode",
       "17027d4a8adf3317f234b859cee79b53a0e3b66d4a8102ae47fa4f4ef502e43a",
       "second order factor F_2, seven apparent singularities"},
      {"L1", "L1.lode",
       "9664db52638112107fbc86c7117438fadd0b2171bc01c75b4eca715328df2acd",
       "first order left multiplier desingularizing F_2"},
      {"F3", "F3.lode",
       "f97034bd71588fa4409d1e71420429f3eda4bd63dbd6d76bfb7d90a2a6b71da3",
       "third order factor F_3"},
      {"F3tilde", "F3tilde.lode",
       "04cf2d9c97ea368de3763c7d0c1bf9ffc45432d273ac3aed0b707a452e5fce4d",
       "F_3 with solutions multiplied by mu"},
      {"V2sol", "V2sol.ansatz",
       "76ce2689ea4ae68d23b9bc7811338c4dc6d8b4b9ea9b88feed1b5d9d24618903",
       "elliptic solution of V_2"},
      {"M2", "M2.ansatz",
       "43ea8ef7ec4e30cf787a2c448d3fdc3714427e40376a11b69eb23fe9005667b7",
       "degree-3 K/E combination solving M_2, in x = w^2"},
  };
  return reg;
}

const FixtureInfo& fixture_info(const std::string& name) {
  for (auto& f : fixture_registry())
    if (f.name == name) return f;
  throw InvalidArgument("unknown fixture '" + name + "'");
}

std::string fixture_dir() {
  if (const char* e = std::getenv("OREFACTOR_FIXTURES"); e && *e) return e;
  return OREFACTOR_FIXTURE_DIR;
}

std::string fixture_path(const std::string& name, const std::string& dir) {
  return (dir.empty() ? fixture_dir() : dir) + "/" + fixture_info(name).file;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

OpQ load_fixture_operator(const std::string& name, const std::string& dir) {
  return as_rational(load_operator(fixture_path(name, dir)));
}

AnsatzSolution<RationalField> load_fixture_ansatz(const std::string& name, const std::string& dir) {
  return parse_ansatz(read_file(fixture_path(name, dir)));
}

PolyQ f2_apparent_polynomial() { return P({1, 1, -24, -145, -192, 96, 0, 128}); }

std::vector<ExponentRow> f3tilde_exponent_table() {
  using Pt = Point<RationalField>;
  auto R = [](long n, long d = 1) { return Rational(n, d); };
  return {
      {"0", Pt::at(0), {R(0), R(1), R(3)}},
      {"1/4", Pt::at(R(1, 4)), {R(0), R(1), R(3, 2)}},
      {"-1/4", Pt::at(R(-1, 4)), {R(0), R(1), R(5, 2)}},
      {"inf", Pt::infinity(), {R(-18), R(-18), R(-16)}},
      {"1/2", Pt::at(R(1, 2)), {R(0), R(1, 2), R(1)}},
      {"-1/2", Pt::at(R(-1, 2)), {R(0), R(1, 2), R(1)}},
      {"App(F2)", Pt::root_of(f2_apparent_polynomial()), {R(0), R(2), R(3)}},
  };
}

OpQ f3_to_f3tilde(const OpQ& F3) {
  // mu'/mu = sum e_i f_i'/f_i over the factors f_i^e_i
  std::vector<std::pair<PolyQ, Rational>> mu = {
      {P({0, 1}), Rational(2)},     {P({1, -4}), Rational(9, 2)}, {P({1, 4}), Rational(7, 2)},
      {P({1, -1}), Rational(1)},    {P({1, 2}), Rational(1)},     {P({1, 3, 4}), Rational(1)},
      {f2_apparent_polynomial(), Rational(1)}};
  PolyQ den = PolyQ::constant(QQ, 1);
  for (auto& [f, e] : mu) den = den * f;
  PolyQ num(QQ);
  for (auto& [f, e] : mu) num = num + (f.derivative() * (den / f)).scaled(e);
  return gauge_transform(F3, num, den);
}

OpQ desingularized_f2(const OpQ& L1, const OpQ& F2) {
  // L1 (1/a) (a D^2 + ...) = (1/a) L1(D -> D - a'/a) (a D^2 + ...)
  OpQ F = convert_basis(F2, Basis::Ddw);
  const PolyQ& a = F.lead();
  return primitive_part(multiply(gauge_transform(L1, a.derivative(), a), F));
}

std::vector<Rational> exponent_list(const OpQ& L, const Point<RationalField>& pt) {
  auto em = local_exponents(L, pt);
  if (!em.nonlinear.empty()) return {};
  std::vector<Rational> out;
  for (auto& [e, m] : em.exponents)
    for (int k = 0; k < m; ++k) out.push_back(e);
  std::sort(out.begin(), out.end());
  return out;
}

std::string exponent_str(const std::vector<Rational>& e) {
  if (e.empty()) return "(irrational)";
  std::string s;
  for (size_t i = 0; i < e.size(); ++i) s += (i ? ", " : "") + e[i].get_str();
  return s;
}

bool CheckReport::ok() const {
  return std::all_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.ok; });
}

void CheckReport::add(std::string name, bool ok, std::string detail) {
  lines.push_back({std::move(name), ok, std::move(detail)});
}

std::string CheckReport::str() const {
  std::ostringstream os;
  for (auto& l : lines) {
    os << (l.ok ? "ok   " : "FAIL ") << l.name;
    if (!l.detail.empty()) os << ": " << l.detail;
    os << "\n";
  }
  return os.str();
}

namespace {

void check_hashes(const std::string& dir, CheckReport& rep) {
  for (auto& f : fixture_registry()) {
    std::string got;
    try {
      got = sha256_hex(read_file(fixture_path(f.name, dir)));
    } catch (const Error& e) {
      rep.add("sha256 " + f.file, false, e.what());
      continue;
    }
    rep.add("sha256 " + f.file, got == f.sha256, got == f.sha256 ? "" : "got " + got);
  }
}

// Nilpotence at the first `count` primes from 10007 where the operator has
// good reduction.
std::string nilpotence_summary(const OpQ& L, int count, bool* all, bool* any) {
  *all = true;
  *any = false;
  std::string s;
  uint64_t p = 10007;
  for (int found = 0; found < count; p = next_prime(p + 1)) {
    CurvatureReport r;
    try {
      r = p_curvature(L, static_cast<uint32_t>(p));
    } catch (const BadReductionAtP&) {
      continue;
    } catch (const ZeroInverse&) {
      continue;
    }
    ++found;
    *all = *all && r.nilpotent;
    *any = *any || r.nilpotent;
    s += (s.empty() ? "" : " ") + std::to_string(p) + (r.nilpotent ? ":nilpotent" : ":not");
  }
  return s;
}

}  // namespace

CheckReport verify_fixtures(const std::string& dir) {
  CheckReport rep;
  check_hashes(dir, rep);
  try {
    auto V2 = load_fixture_operator("V2", dir);
    auto sol = load_fixture_ansatz("V2sol", dir);
    rep.add("V2 annihilates w^2/(1-4w) (K - 2E/(1-16w^2))", verify_membership(V2, sol, 100));
    auto F3t = load_fixture_operator("F3tilde", dir);
    auto e = exponent_list(F3t, Point<RationalField>::at(Rational(1, 2)));
    std::vector<Rational> want{0, Rational(1, 2), 1};
    rep.add("F3tilde exponents at w = 1/2", e == want, exponent_str(e));
    auto M2 = load_fixture_ansatz("M2", dir);
    rep.add("M2 listing", M2.g == 3 && M2.var == EllipticVar::X && M2.P.size() == 4 &&
                              M2.P[0].coeff(0) == 63,
            "P_{3,0}(0) = " + M2.P[0].coeff(0).get_str());
  } catch (const Error& ex) {
    rep.add("fixture invariants", false, ex.name() + ": " + ex.what());
  }
  return rep;
}

CheckReport selftest_f3(const std::string& dir) {
  CheckReport rep;
  try {
    auto F2 = load_fixture_operator("F2", dir);
    auto L1 = load_fixture_operator("L1", dir);
    auto F3 = load_fixture_operator("F3", dir);
    auto F3t = load_fixture_operator("F3tilde", dir);
    auto app = Point<RationalField>::root_of(f2_apparent_polynomial());

    rep.add("App(F2) roots apparent in F2",
            classify_singularity(F2, app) == Singularity::Apparent);
    auto prod = desingularized_f2(L1, F2);
    rep.add("L1 F2 has order 3", prod.order() == 3, std::to_string(prod.order()));
    rep.add("App(F2) roots ordinary in L1 F2",
            classify_singularity(prod, app) == Singularity::Ordinary);

    rep.add("F3tilde equals the gauge transform of F3", f3_to_f3tilde(F3) == primitive_part(F3t));

    for (auto& row : f3tilde_exponent_table()) {
      auto e = exponent_list(F3t, row.point);
      rep.add("F3tilde exponents at " + row.label, e == row.expected, exponent_str(e));
    }
    rep.add("F3tilde ordinary at w = 1",
            is_ordinary_point(F3t, Point<RationalField>::at(1)));
    rep.add("F3tilde ordinary at 1+3w+4w^2 = 0",
            is_ordinary_point(F3t, Point<RationalField>::root_of(P({1, 3, 4}))));

    bool all, any;
    std::string s = nilpotence_summary(F3, 3, &all, &any);
    rep.add("F3 p-curvature nilpotent", all, s);
  } catch (const Error& ex) {
    rep.add("selftest", false, ex.name() + ": " + ex.what());
  }
  return rep;
}

}  // namespace orefactor
