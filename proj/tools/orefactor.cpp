// orefactor command line driver.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "orefactor/elliptic.hpp"
#include "orefactor/factor.hpp"
#include "orefactor/fixtures.hpp"
#include "orefactor/guess.hpp"
#include "orefactor/io.hpp"
#include "orefactor/local.hpp"
#include "orefactor/multiprime.hpp"
#include "orefactor/pcurv.hpp"
#include "orefactor/sympow.hpp"

#ifndef OREFACTOR_VERSION
#define OREFACTOR_VERSION "0.0.0"
#endif

using namespace orefactor;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// Thrown for argument combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Run {
  std::string command;
  std::vector<std::string> argv;
  std::vector<std::string> inputs, outputs;
  std::vector<uint32_t> primes;
  std::string manifest;
  int jobs = 1;
  std::ostringstream out;  // everything that goes to stdout

  void input(const std::string& path) { inputs.push_back(path); }

  // Writes an artifact to --out (or stdout when empty).
  void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
      out << text;
      return;
    }
    write_file(path, text);
    outputs.push_back(path);
  }

  void write_manifest() const {
    if (manifest.empty()) return;
    json j;
    j["tool"] = "orefactor";
    j["version"] = OREFACTOR_VERSION;
    j["command"] = command;
    j["argv"] = argv;
    j["primes"] = primes;
    auto files = [](const std::vector<std::string>& v) {
      json a = json::array();
      for (auto& p : v) {
        json e;
        e["path"] = p;
        e["sha256"] = fs::is_regular_file(p) ? sha256_hex(read_file(p)) : "";
        a.push_back(e);
      }
      return a;
    };
    j["inputs"] = files(inputs);
    j["outputs"] = files(outputs);
    j["stdout_sha256"] = sha256_hex(out.str());
    write_file(manifest, j.dump(2) + "\n");
  }
};

// --prime if given, else the head of the configured family.
uint32_t pick_prime(const std::optional<uint32_t>& p) {
  if (p) {
    PrimeContext check(*p);  // throws NotPrime
    return *p;
  }
  return configured_primes().front();
}

Point<RationalField> parse_point_q(const std::string& s) {
  if (s == "inf" || s == "infinity") return Point<RationalField>::infinity();
  if (s.rfind("root:", 0) == 0) {
    std::vector<Rational> c;
    std::stringstream ss(s.substr(5));
    std::string t;
    while (std::getline(ss, t, ',')) c.push_back(parse_rational(t));
    PolyQ p(RationalField{}, std::move(c));
    if (p.degree() < 1) throw UsageError("root: needs a non-constant polynomial");
    return Point<RationalField>::root_of(p);
  }
  return Point<RationalField>::at(parse_rational(s));
}

Point<PrimeContext> to_modular(const Point<RationalField>& pt, const PrimeContext& ctx) {
  using Pt = Point<PrimeContext>;
  switch (pt.kind) {
    case Point<RationalField>::Kind::Infinity: return Pt::infinity();
    case Point<RationalField>::Kind::Finite: return Pt::at(ctx.from_rational(pt.value));
    default: return Pt::root_of(reduce_poly(pt.poly, ctx));
  }
}

template <class F>
std::string exponents_text(const ExponentMultiset<F>& em, const F& f) {
  std::string s;
  for (auto& [e, m] : em.exponents)
    for (int k = 0; k < m; ++k) s += (s.empty() ? "" : ", ") + f.str(e);
  for (auto& [p, m] : em.nonlinear)
    for (int k = 0; k < m; ++k)
      s += (s.empty() ? "" : ", ") + std::string("root of ") + p.str();
  return s;
}

template <class E, class F>
std::string log_text(const LogStructure<E>& ls, const F& f) {
  std::ostringstream os;
  os << "solutions=" << ls.solutions() << " max_log=" << ls.max_log() << "\n";
  for (auto& b : ls.blocks) {
    os << "block leading=" << f.str(b.leading) << " logs=" << b.max_log << " attach=";
    for (size_t i = 0; i < b.attach.size(); ++i)
      os << (i ? "," : "") << (b.attach[i] ? f.str(*b.attach[i]) : "-");
    os << "\n";
  }
  return os.str();
}

OpP modular_op(const AnyOperator& a, const std::optional<uint32_t>& prime, Run& run) {
  if (auto p = std::get_if<OpP>(&a)) {
    if (prime && *prime != p->field().modulus())
      throw UsageError("operator file is modulo " + std::to_string(p->field().modulus()));
    run.primes = {static_cast<uint32_t>(p->field().modulus())};
    return *p;
  }
  uint32_t p = pick_prime(prime);
  run.primes = {p};
  return reduce_op(std::get<OpQ>(a), PrimeContext(p));
}

SeriesP modular_series(const AnySeries& a, const std::optional<uint32_t>& prime, Run& run) {
  if (auto p = std::get_if<SeriesP>(&a)) {
    if (prime && *prime != p->field().modulus())
      throw UsageError("series file is modulo " + std::to_string(p->field().modulus()));
    run.primes = {static_cast<uint32_t>(p->field().modulus())};
    return *p;
  }
  uint32_t p = pick_prime(prime);
  run.primes = {p};
  return reduce_series(std::get<SeriesQ>(a), PrimeContext(p));
}

EllipticVar parse_var(const std::string& v) {
  if (v == "w") return EllipticVar::W;
  if (v == "x") return EllipticVar::X;
  throw UsageError("--var must be w or x");
}

Basis parse_basis(const std::string& b) {
  if (b == "theta") return Basis::Theta;
  if (b == "ddw") return Basis::Ddw;
  throw UsageError("--basis must be theta or ddw");
}

}  // namespace

int main(int argc, char** argv) {
  Run run;
  for (int i = 1; i < argc; ++i) run.argv.push_back(argv[i]);

  CLI::App app{"orefactor: guessing, local analysis and factorization of linear ODEs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", OREFACTOR_VERSION);
  app.add_option("--jobs", run.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--manifest", run.manifest, "write a JSON run manifest here");

  // guess
  auto* g = app.add_subcommand("guess", "fit an ODE to a series at (Q, D)");
  std::string g_series, g_basis = "theta", g_out;
  int g_Q = 1, g_D = 1, g_guard = kGuessGuard;
  std::optional<uint32_t> g_prime;
  std::vector<int> g_infer;
  g->add_option("--series", g_series, "series-v1 file")->required();
  g->add_option("--Q", g_Q, "probe order")->check(CLI::NonNegativeNumber);
  g->add_option("--D", g_D, "probe degree")->check(CLI::NonNegativeNumber);
  g->add_option("--basis", g_basis, "theta or ddw");
  g->add_option("--guard", g_guard, "extra equations beyond the unknowns");
  g->add_option("--prime", g_prime, "prime for rational input");
  g->add_option("--infer", g_infer, "q_hint D_hint: fit the ODE formula on probes")
      ->expected(2);
  g->add_option("--out", g_out, "write the operators here");

  // exponents
  auto* ex = app.add_subcommand("exponents", "local exponents at a point");
  std::string ex_op, ex_point;
  ex->add_option("--op", ex_op, "lode-v1 file")->required();
  ex->add_option("--point", ex_point, "rational, inf, or root:c0,c1,...")->required();

  // logscheme
  auto* ls = app.add_subcommand("logscheme", "formal log structure at points");
  std::string ls_op;
  std::vector<std::string> ls_points;
  ls->add_option("--op", ls_op, "lode-v1 file")->required();
  ls->add_option("--point", ls_points, "one or more points")->required();

  // factor
  auto* fa = app.add_subcommand("factor", "factor an operator over F_p");
  std::string fa_op, fa_series;
  std::optional<uint32_t> fa_prime;
  uint64_t budget = 1000000;
  int multi = 1, fa_qmax = 8, fa_dmax = 24;
  bool fa_exhaustive = false;
  auto* fa_o = fa->add_option("--op", fa_op, "lode-v1 file");
  auto* fa_s = fa->add_option("--series", fa_series, "series-v1 file (guess its annihilator first)");
  fa_o->excludes(fa_s);
  fa->add_option("--prime", fa_prime, "prime for rational input");
  fa->add_option("--budget-alpha", budget, "cap on sweep iterations");
  fa->add_option("--multi-param", multi, "number of free parameters swept jointly")
      ->check(CLI::Range(1, 3));
  fa->add_option("--qmax", fa_qmax, "order bound when guessing from a series");
  fa->add_option("--dmax", fa_dmax, "degree bound when guessing from a series");
  fa->add_flag("--exhaustive", fa_exhaustive, "sweep every alpha even after a hit");

  // sweep
  auto* sw = app.add_subcommand("sweep", "alpha sweep over a Frobenius family");
  std::string sw_op, sw_point = "0";
  int sw_exp = 0, sw_Q = 1, sw_D = 4, sw_terms = 0;
  std::optional<uint32_t> sw_prime;
  bool sw_exhaustive = false;
  sw->add_option("--op", sw_op, "lode-v1 file")->required();
  sw->add_option("--point", sw_point, "expansion point");
  sw->add_option("--exponent", sw_exp, "leading exponent of the family");
  sw->add_option("--Q", sw_Q, "probe order");
  sw->add_option("--D", sw_D, "probe degree");
  sw->add_option("--terms", sw_terms, "series length (default from the probe)");
  sw->add_option("--prime", sw_prime, "prime for rational input");
  sw->add_option("--budget-alpha", budget, "cap on sweep iterations");
  sw->add_flag("--exhaustive", sw_exhaustive, "report every alpha");

  // pcurv
  auto* pc = app.add_subcommand("pcurv", "p-curvature nilpotence");
  std::string pc_op;
  std::vector<uint32_t> pc_primes;
  int pc_samples = 3;
  pc->add_option("--op", pc_op, "lode-v1 file")->required();
  pc->add_option("--prime", pc_primes, "primes (default: the configured family)");
  pc->add_option("--samples", pc_samples, "evaluation points per prime");

  // sympow
  auto* sp = app.add_subcommand("sympow", "symmetric power");
  std::string sp_op, sp_out;
  int sp_k = 2;
  std::optional<uint32_t> sp_prime;
  sp->add_option("--op", sp_op, "lode-v1 file")->required();
  sp->add_option("--k", sp_k, "power")->check(CLI::PositiveNumber);
  sp->add_option("--prime", sp_prime, "work modulo this prime");
  sp->add_option("--out", sp_out, "output file");

  // ansatz
  auto* an = app.add_subcommand("ansatz", "polynomial ansatz in K and E");
  std::string an_op, an_series, an_var = "w", an_out;
  std::vector<std::string> an_pf;
  int an_g = 1, an_dmax = 8;
  std::optional<uint32_t> an_prime;
  auto* an_o = an->add_option("--op", an_op, "operator to solve");
  auto* an_s = an->add_option("--series", an_series, "series to match");
  an_o->excludes(an_s);
  an->add_option("--degree", an_g, "total degree in K, E")->check(CLI::NonNegativeNumber);
  an->add_option("--prefactor", an_pf, "c0,c1,...:exponent (repeatable)");
  an->add_option("--dmax", an_dmax, "degree bound of the P_{g-i,i}");
  an->add_option("--var", an_var, "w, or x for x = w^2");
  an->add_option("--prime", an_prime, "solve modulo this prime only");
  an->add_option("--out", an_out, "output file");

  // reconstruct
  auto* rc = app.add_subcommand("reconstruct", "rational operator from per-prime residues");
  std::string rc_task, rc_out;
  std::vector<std::string> rc_hints;
  bool rc_iter = false, rc_no_auto = false;
  rc->add_option("--task", rc_task, "directory of <stem>.p<prime>.lode files")->required();
  rc->add_option("--hint", rc_hints, "scale or scale:var_scale (repeatable)");
  rc->add_flag("--iterative", rc_iter, "block by block, hints from finished blocks");
  rc->add_flag("--no-auto-hints", rc_no_auto, "only use the given hints");
  rc->add_option("--out", rc_out, "result directory (default: the task directory)");

  // verify
  auto* vf = app.add_subcommand("verify", "check that an operator annihilates a series or solution");
  std::string vf_op, vf_series, vf_sol;
  int vf_terms = 200;
  std::optional<uint32_t> vf_prime;
  vf->add_option("--op", vf_op, "lode-v1 file")->required();
  auto* vf_s = vf->add_option("--series", vf_series, "series-v1 file");
  auto* vf_a = vf->add_option("--solution", vf_sol, "ansatz listing");
  vf_s->excludes(vf_a);
  vf->add_option("--terms", vf_terms, "coefficients checked beyond the ansatz degree");
  vf->add_option("--prime", vf_prime, "check modulo this prime");

  // fixtures
  auto* fx = app.add_subcommand("fixtures", "list, export or check the shipped fixtures");
  std::string fx_export, fx_out, fx_dir;
  bool fx_verify = false, fx_self = false;
  fx->add_option("--export", fx_export, "fixture name");
  fx->add_option("--out", fx_out, "export destination (default stdout)");
  fx->add_option("--dir", fx_dir, "fixture directory");
  fx->add_flag("--verify", fx_verify, "check hashes and invariants");
  fx->add_flag("--selftest-f3", fx_self, "desingularization, exponent tables, nilpotence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  int status = 0;
  try {
    run.command = app.get_subcommands().front()->get_name();

    if (*g) {
      run.input(g_series);
      auto s = modular_series(load_series(g_series), g_prime, run);
      if (!g_infer.empty()) {
        auto inf = infer_minimal_order(s, g_infer[0], g_infer[1], g_guard);
        run.out << inf.report();
      } else {
        auto r = guess_ode(GuessRequest<PrimeContext>{s, g_Q, g_D, parse_basis(g_basis), g_guard});
        run.out << "prime=" << run.primes[0] << " Q=" << g_Q << " D=" << g_D << "\n"
                << "found=" << (r.found ? "true" : "false") << " N=" << r.N << " f=" << r.f
                << " rows_used=" << r.rows_used << "\n";
        std::string ops;
        for (auto& op : r.ops) ops += write_operator(op);
        if (!ops.empty()) run.emit(g_out, ops);
      }
    } else if (*ex) {
      run.input(ex_op);
      auto a = load_operator(ex_op);
      auto pt = parse_point_q(ex_point);
      if (auto q = std::get_if<OpQ>(&a)) {
        auto em = local_exponents(*q, pt);
        run.out << "exponents: " << exponents_text(em, q->field()) << "\n";
        run.out << "point: " << singularity_name(classify_singularity(*q, pt)) << "\n";
      } else {
        const auto& p = std::get<OpP>(a);
        run.primes = {static_cast<uint32_t>(p.field().modulus())};
        auto ptp = to_modular(pt, p.field());
        run.out << "exponents: " << exponents_text(local_exponents(p, ptp), p.field()) << "\n";
        run.out << "point: " << singularity_name(classify_singularity(p, ptp)) << "\n";
      }
    } else if (*ls) {
      run.input(ls_op);
      auto a = load_operator(ls_op);
      std::vector<Partition> schemes;
      for (auto& s : ls_points) {
        auto pt = parse_point_q(s);
        run.out << "point " << s << "\n";
        if (auto q = std::get_if<OpQ>(&a)) {
          auto l = formal_log_solutions(*q, pt);
          run.out << log_text(l, q->field());
          schemes.push_back(scheme_of(l, q->order()));
        } else {
          const auto& p = std::get<OpP>(a);
          auto l = formal_log_solutions(p, to_modular(pt, p.field()));
          run.out << log_text(l, p.field());
          schemes.push_back(scheme_of(l, p.order()));
        }
      }
      for (auto& c : reconcile_schemes(schemes)) {
        run.out << "candidate:";
        for (int x : c) run.out << " " << x;
        run.out << "\n";
      }
    } else if (*fa) {
      if (fa_op.empty() == fa_series.empty()) throw UsageError("factor needs --op or --series");
      OpP L;
      if (!fa_op.empty()) {
        run.input(fa_op);
        L = modular_op(load_operator(fa_op), fa_prime, run);
      } else {
        run.input(fa_series);
        auto s = modular_series(load_series(fa_series), fa_prime, run);
        auto ann = minimal_annihilator(s, fa_qmax, fa_dmax);
        if (!ann) throw NoSolutionAtBounds("no annihilator within --qmax/--dmax");
        run.out << "annihilator: order=" << ann->Q << " degree=" << ann->D << "\n";
        L = ann->op;
      }
      FactorOptions opt;
      opt.budget = budget;
      opt.multi_param = multi;
      opt.jobs = run.jobs;
      opt.exhaustive = fa_exhaustive;
      auto tree = factorize(L, opt);
      run.out << tree.str();
    } else if (*sw) {
      run.input(sw_op);
      OpP L = modular_op(load_operator(sw_op), sw_prime, run);
      auto pt = to_modular(parse_point_q(sw_point), L.field());
      SweepOptions opt;
      opt.Q = sw_Q;
      opt.D = sw_D;
      opt.exhaustive = sw_exhaustive;
      opt.budget = budget;
      opt.jobs = run.jobs;
      int terms = sw_terms > 0 ? sw_terms : (sw_Q + 1) * (sw_D + 1) + 2 * kGuessGuard + 20;
      auto fam = frobenius_family(L, pt, L.field().from_int(sw_exp), terms);
      SweepStats stats;
      auto res = alpha_sweep(fam, L.order(), opt, &stats);
      run.out << "prime=" << run.primes[0] << " parameters=" << fam.series.num_params()
              << " iterations=" << stats.iterations << "\n";
      for (auto& r : res) run.out << r.str() << "\n";
    } else if (*pc) {
      run.input(pc_op);
      auto a = load_operator(pc_op);
      std::vector<uint32_t> primes = pc_primes;
      if (auto p = std::get_if<OpP>(&a)) {
        primes = {static_cast<uint32_t>(p->field().modulus())};
        if (!pc_primes.empty() && pc_primes != primes)
          throw UsageError("operator file is modulo " + std::to_string(primes[0]));
      } else if (primes.empty()) {
        primes = configured_primes();
      }
      run.primes = primes;
      for (uint32_t p : primes) {
        PrimeContext ctx(p);
        run.out << p_curvature(as_modular(a, ctx), pc_samples).str() << "\n";
      }
    } else if (*sp) {
      run.input(sp_op);
      auto a = load_operator(sp_op);
      if (sp_prime || std::holds_alternative<OpP>(a)) {
        run.emit(sp_out, write_operator(symmetric_power(modular_op(a, sp_prime, run), sp_k)));
      } else {
        run.emit(sp_out, write_operator(primitive_part(symmetric_power(std::get<OpQ>(a), sp_k))));
      }
    } else if (*an) {
      if (an_op.empty() == an_series.empty()) throw UsageError("ansatz needs --op or --series");
      auto var = parse_var(an_var);
      Prefactor<RationalField> pf;
      for (auto& t : an_pf) pf.push_back(parse_prefactor_term(t));
      auto pf_mod = [&](const PrimeContext& ctx) {
        Prefactor<PrimeContext> r;
        for (auto& t : pf) r.push_back({reduce_poly(t.poly, ctx), t.exponent});
        return r;
      };
      std::string text;
      if (!an_series.empty()) {
        run.input(an_series);
        auto s = modular_series(load_series(an_series), an_prime, run);
        text = ansatz_solve(s, an_g, pf_mod(s.field()), an_dmax, var).str();
      } else {
        run.input(an_op);
        auto a = load_operator(an_op);
        if (an_prime || std::holds_alternative<OpP>(a)) {
          auto L = modular_op(a, an_prime, run);
          auto sols = ansatz_solve(L, an_g, pf_mod(L.field()), an_dmax, var);
          for (size_t i = 0; i < sols.size(); ++i) text += (i ? "\n" : "") + sols[i].str();
        } else {
          auto primes = prime_family(5);
          run.primes = primes;
          auto sols = ansatz_solve_rational(std::get<OpQ>(a), an_g, pf, an_dmax, var, primes);
          for (size_t i = 0; i < sols.size(); ++i) text += (i ? "\n" : "") + sols[i].str();
        }
      }
      run.emit(an_out, text);
    } else if (*rc) {
      std::string stem;
      run.input(rc_task);
      auto task = load_task(rc_task, &stem);
      run.primes = task.primes;
      for (auto& h : rc_hints) {
        ScaleHint sh;
        auto c = h.find(':');
        Rational s = parse_rational(h.substr(0, c));
        if (s.get_den() != 1 || s == 0) throw UsageError("hint scale must be a nonzero integer");
        sh.scale = s.get_num();
        if (c != std::string::npos) sh.var_scale = parse_rational(h.substr(c + 1));
        task.hints.push_back(sh);
      }
      task.auto_hints = !rc_no_auto;
      ReconstructionResult r;
      if (rc_iter) {
        auto it = iterative_reconstruct(task, {});
        run.out << it.str();
        r = it.result;
      } else {
        r = reconstruct_operator(task);
      }
      run.out << r.report;
      std::string dir = rc_out.empty() ? rc_task : rc_out;
      save_result(dir, stem, r);
      run.outputs.push_back((fs::path(dir) / (stem + ".recon.lode")).string());
      run.outputs.push_back((fs::path(dir) / "report.txt").string());
      if (!r.complete) status = 1;
    } else if (*vf) {
      if (vf_series.empty() == vf_sol.empty())
        throw UsageError("verify needs --series or --solution");
      run.input(vf_op);
      auto a = load_operator(vf_op);
      bool ok;
      if (!vf_series.empty()) {
        run.input(vf_series);
        auto s = modular_series(load_series(vf_series), vf_prime, run);
        OpP L = as_modular(a, s.field());
        auto r = apply_operator(L, s);
        ok = r.is_zero();
        run.out << "checked=" << r.length() << "\n";
      } else {
        run.input(vf_sol);
        auto sol = parse_ansatz(read_file(vf_sol));
        if (vf_prime || std::holds_alternative<OpP>(a)) {
          auto L = modular_op(a, vf_prime, run);
          AnsatzSolution<PrimeContext> sp{sol.g, sol.var, {}, {}};
          for (auto& t : sol.prefactor) sp.prefactor.push_back({reduce_poly(t.poly, L.field()), t.exponent});
          for (auto& p : sol.P) sp.P.push_back(reduce_poly(p, L.field()));
          ok = verify_membership(L, sp, vf_terms);
        } else {
          ok = verify_membership(std::get<OpQ>(a), sol, vf_terms);
        }
      }
      run.out << "annihilates=" << (ok ? "true" : "false") << "\n";
      if (!ok) status = 1;
    } else if (*fx) {
      if (!fx_export.empty()) {
        auto path = fixture_path(fx_export, fx_dir);
        run.input(path);
        run.emit(fx_out, read_file(path));
      }
      if (fx_verify) {
        auto rep = verify_fixtures(fx_dir);
        run.out << rep.str();
        if (!rep.ok()) status = 1;
      }
      if (fx_self) {
        auto rep = selftest_f3(fx_dir);
        run.out << rep.str();
        if (!rep.ok()) status = 1;
      }
      if (fx_export.empty() && !fx_verify && !fx_self)
        for (auto& f : fixture_registry())
          run.out << f.name << "\t" << f.file << "\t" << f.description << "\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cout << run.out.str();
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 1;
  }
  std::cout << run.out.str();
  run.write_manifest();
  return status;
}
