#include "orefactor/io.hpp"

#include <fstream>
#include <sstream>

namespace orefactor {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Lines with comments (#) and blank lines removed.
std::vector<std::string> content_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    line = trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string field_value(const std::string& line, const std::string& key) {
  if (line.rfind(key + ":", 0) != 0) throw ParseError("expected '" + key + ":' but got '" + line + "'");
  return trim(line.substr(key.size() + 1));
}

long long parse_int(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw ParseError("bad " + what + ": " + s);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad " + what + ": " + s);
  }
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

uint64_t parse_modulus(const std::string& line) {
  long long m = parse_int(field_value(line, "modulus"), "modulus");
  if (m < 0 || m >= (1LL << 31)) throw ParseError("modulus out of range");
  return static_cast<uint64_t>(m);
}

}  // namespace

Rational parse_rational(const std::string& token) {
  auto bad = [&] { return ParseError("bad number '" + token + "'"); };
  if (token.empty()) throw bad();
  auto slash = token.find('/');
  auto valid_int = [](const std::string& s) {
    size_t i = (s.size() > 0 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i >= s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto mk = [](std::string s) {
    if (!s.empty() && s[0] == '+') s = s.substr(1);
    return Integer(s);
  };
  if (slash == std::string::npos) {
    if (!valid_int(token)) throw bad();
    return Rational(mk(token));
  }
  std::string n = token.substr(0, slash), d = token.substr(slash + 1);
  if (!valid_int(n) || !valid_int(d)) throw bad();
  Integer dd = mk(d);
  if (dd == 0) throw ParseError("zero denominator in '" + token + "'");
  Rational r(mk(n), dd);
  r.canonicalize();
  return r;
}

std::string write_series(const SeriesQ& s) {
  std::ostringstream os;
  os << "series-v1\nmodulus: 0\nvaluation: " << s.valuation() << "\ncount: " << s.length()
     << "\n";
  for (int i = 0; i < s.length(); ++i) os << (i ? " " : "") << s.coeffs()[i].get_str();
  os << "\n";
  return os.str();
}

std::string write_series(const SeriesP& s) {
  std::ostringstream os;
  os << "series-v1\nmodulus: " << s.field().modulus() << "\nvaluation: " << s.valuation()
     << "\ncount: " << s.length() << "\n";
  for (int i = 0; i < s.length(); ++i) os << (i ? " " : "") << s.coeffs()[i];
  os << "\n";
  return os.str();
}

namespace {

template <class F>
std::string write_op(const DiffOp<F>& L, uint64_t modulus) {
  std::ostringstream os;
  int D = std::max(0, L.degree());
  os << "lode-v1\nmodulus: " << modulus << "\nbasis: " << basis_name(L.basis())
     << "\norder: " << L.order() << "\ndegree: " << D << "\n";
  for (int i = 0; i <= L.order(); ++i) {
    os << i << ":";
    for (int j = 0; j <= D; ++j) os << " " << L.field().str(L.coeff(i).coeff(j));
    os << "\n";
  }
  return os.str();
}

}  // namespace

std::string write_operator(const OpQ& L) { return write_op(L, 0); }
std::string write_operator(const OpP& L) { return write_op(L, L.field().modulus()); }

AnySeries parse_series(const std::string& text) {
  auto lines = content_lines(text);
  if (lines.size() < 4 || lines[0] != "series-v1") throw ParseError("not a series-v1 file");
  uint64_t m = parse_modulus(lines[1]);
  int v = static_cast<int>(parse_int(field_value(lines[2], "valuation"), "valuation"));
  long long n = parse_int(field_value(lines[3], "count"), "count");
  if (n < 0) throw ParseError("negative count");
  std::vector<std::string> toks;
  for (size_t i = 4; i < lines.size(); ++i)
    for (auto& t : tokens(lines[i])) toks.push_back(t);
  if (static_cast<long long>(toks.size()) != n)
    throw ParseError("series count " + std::to_string(n) + " but " +
                     std::to_string(toks.size()) + " coefficients");
  if (m == 0) {
    RationalField Q;
    std::vector<Rational> c;
    for (auto& t : toks) c.push_back(parse_rational(t));
    return SeriesQ(Q, v, std::move(c));
  }
  PrimeContext ctx(m);
  std::vector<uint32_t> c;
  for (auto& t : toks) c.push_back(ctx.from_rational(parse_rational(t)));
  return SeriesP(ctx, v, std::move(c));
}

AnyOperator parse_operator(const std::string& text) {
  auto lines = content_lines(text);
  if (lines.size() < 5 || lines[0] != "lode-v1") throw ParseError("not a lode-v1 file");
  uint64_t m = parse_modulus(lines[1]);
  std::string b = field_value(lines[2], "basis");
  Basis basis;
  if (b == "theta")
    basis = Basis::Theta;
  else if (b == "ddw")
    basis = Basis::Ddw;
  else
    throw ParseError("unknown basis '" + b + "'");
  long long Q = parse_int(field_value(lines[3], "order"), "order");
  long long D = parse_int(field_value(lines[4], "degree"), "degree");
  if (Q < 0 || D < 0) throw ParseError("negative order or degree");
  if (static_cast<long long>(lines.size()) != 5 + Q + 1)
    throw ParseError("expected " + std::to_string(Q + 1) + " coefficient rows");
  std::vector<std::vector<Rational>> rows;
  for (long long i = 0; i <= Q; ++i) {
    const auto& line = lines[5 + i];
    auto colon = line.find(':');
    if (colon == std::string::npos || parse_int(trim(line.substr(0, colon)), "row index") != i)
      throw ParseError("expected row '" + std::to_string(i) + ":'");
    auto toks = tokens(line.substr(colon + 1));
    if (static_cast<long long>(toks.size()) != D + 1)
      throw ParseError("row " + std::to_string(i) + " needs " + std::to_string(D + 1) +
                       " coefficients");
    std::vector<Rational> r;
    for (auto& t : toks) r.push_back(parse_rational(t));
    rows.push_back(std::move(r));
  }
  if (m == 0) {
    RationalField F;
    std::vector<PolyQ> c;
    for (auto& r : rows) c.emplace_back(F, r);
    return OpQ(F, basis, std::move(c));
  }
  PrimeContext ctx(m);
  std::vector<PolyP> c;
  for (auto& r : rows) {
    std::vector<uint32_t> v;
    for (auto& x : r) v.push_back(ctx.from_rational(x));
    c.emplace_back(ctx, std::move(v));
  }
  return OpP(ctx, basis, std::move(c));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << text;
}

AnySeries load_series(const std::string& path) { return parse_series(read_file(path)); }
AnyOperator load_operator(const std::string& path) { return parse_operator(read_file(path)); }

OpQ as_rational(const AnyOperator& op) {
  if (auto q = std::get_if<OpQ>(&op)) return *q;
  throw InvalidArgument("operator is given modulo a prime, rational input required");
}

OpP as_modular(const AnyOperator& op, const PrimeContext& ctx) {
  if (auto q = std::get_if<OpQ>(&op)) return reduce_op(*q, ctx);
  const auto& p = std::get<OpP>(op);
  if (p.field() != ctx)
    throw ContextMismatch("operator is modulo " + std::to_string(p.field().modulus()));
  return p;
}

SeriesP as_modular(const AnySeries& s, const PrimeContext& ctx) {
  if (auto q = std::get_if<SeriesQ>(&s)) return reduce_series(*q, ctx);
  const auto& p = std::get<SeriesP>(s);
  if (p.field() != ctx)
    throw ContextMismatch("series is modulo " + std::to_string(p.field().modulus()));
  return p;
}

uint64_t modulus_of(const AnyOperator& op) {
  if (auto p = std::get_if<OpP>(&op)) return p->field().modulus();
  return 0;
}
uint64_t modulus_of(const AnySeries& s) {
  if (auto p = std::get_if<SeriesP>(&s)) return p->field().modulus();
  return 0;
}

PrefactorTerm<RationalField> parse_prefactor_term(const std::string& text) {
  auto colon = text.rfind(':');
  if (colon == std::string::npos) throw ParseError("prefactor term needs ':exponent'");
  int e = static_cast<int>(parse_int(trim(text.substr(colon + 1)), "exponent"));
  std::vector<Rational> c;
  std::stringstream ss(text.substr(0, colon));
  std::string t;
  while (std::getline(ss, t, ',')) c.push_back(parse_rational(trim(t)));
  RationalField Q;
  PolyQ p(Q, std::move(c));
  if (p.degree() < 1) throw ParseError("prefactor polynomial must be non-constant");
  return {p, e};
}

AnsatzSolution<RationalField> parse_ansatz(const std::string& text) {
  auto lines = content_lines(text);
  if (lines.size() < 3) throw ParseError("truncated ansatz listing");
  RationalField Q;
  AnsatzSolution<RationalField> s;
  s.g = static_cast<int>(parse_int(field_value(lines[0], "degree"), "degree"));
  if (s.g < 0) throw ParseError("negative ansatz degree");
  std::string v = field_value(lines[1], "variable");
  if (v == "w")
    s.var = EllipticVar::W;
  else if (v == "x")
    s.var = EllipticVar::X;
  else
    throw ParseError("unknown variable '" + v + "'");
  std::string pf = field_value(lines[2], "prefactor");
  size_t pos = 0;
  while ((pos = pf.find('[', pos)) != std::string::npos) {
    auto close = pf.find("]^", pos);
    if (close == std::string::npos) throw ParseError("bad prefactor term");
    std::vector<Rational> c;
    for (auto& t : tokens(pf.substr(pos + 1, close - pos - 1))) c.push_back(parse_rational(t));
    size_t end = pf.find(' ', close + 2);
    std::string e = pf.substr(close + 2, end == std::string::npos ? std::string::npos : end - close - 2);
    s.prefactor.push_back({PolyQ(Q, std::move(c)), static_cast<int>(parse_int(e, "exponent"))});
    pos = close + 2;
  }
  if (static_cast<int>(lines.size()) != 3 + s.g + 1)
    throw ParseError("expected " + std::to_string(s.g + 1) + " polynomial rows");
  for (int i = 0; i <= s.g; ++i) {
    std::string head = "P_{" + std::to_string(s.g - i) + "," + std::to_string(i) + "}";
    std::vector<Rational> c;
    for (auto& t : tokens(field_value(lines[3 + i], head))) c.push_back(parse_rational(t));
    s.P.emplace_back(Q, std::move(c));
  }
  return s;
}

}  // namespace orefactor
