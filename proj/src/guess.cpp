#include "orefactor/guess.hpp"

#include <sstream>

namespace orefactor {

std::string OdeFormula::str() const {
  std::ostringstream os;
  os << "d=" << d << " q=" << q << " C=" << C << " Dapp=" << apparent_degree(*this);
  return os.str();
}

OdeFormula fit_ode_formula(const std::vector<ProbeSample>& samples) {
  if (samples.size() < 3) throw DegenerateSamples("need at least three samples");
  // first independent triple of rows (Q, D, -1)
  const size_t n = samples.size();
  for (size_t a = 0; a < n; ++a)
    for (size_t b = a + 1; b < n; ++b)
      for (size_t c = b + 1; c < n; ++c) {
        const ProbeSample* t[3] = {&samples[a], &samples[b], &samples[c]};
        Rational M[3][4];
        for (int i = 0; i < 3; ++i) {
          M[i][0] = t[i]->Q;
          M[i][1] = t[i]->D;
          M[i][2] = -1;
          M[i][3] = t[i]->N;
        }
        // Gauss-Jordan
        bool singular = false;
        for (int col = 0; col < 3 && !singular; ++col) {
          int p = -1;
          for (int r = col; r < 3; ++r)
            if (M[r][col] != 0) {
              p = r;
              break;
            }
          if (p < 0) {
            singular = true;
            break;
          }
          for (int k = 0; k < 4; ++k) std::swap(M[col][k], M[p][k]);
          Rational iv = 1 / M[col][col];
          for (int k = 0; k < 4; ++k) M[col][k] *= iv;
          for (int r = 0; r < 3; ++r)
            if (r != col && M[r][col] != 0) {
              Rational s = M[r][col];
              for (int k = 0; k < 4; ++k) M[r][k] -= s * M[col][k];
            }
        }
        if (singular) continue;
        for (int i = 0; i < 3; ++i)
          if (M[i][3].get_den() != 1)
            throw InconsistentSamples("formula coefficients are not integers");
        OdeFormula fm{M[0][3].get_num().get_si(), M[1][3].get_num().get_si(),
                      M[2][3].get_num().get_si()};
        for (auto& s : samples)
          if (fm.d * s.Q + fm.q * s.D - fm.C != s.N)
            throw InconsistentSamples("sample Q=" + std::to_string(s.Q) + " D=" +
                                      std::to_string(s.D) + " violates the fitted formula");
        return fm;
      }
  throw DegenerateSamples("samples do not determine d, q, C");
}

long apparent_degree(const OdeFormula& fm) { return (fm.d - 1) * (fm.q - 1) - fm.C - 1; }

long factor_formula_constant(long C_L, long C_R, long q, long q_R, long Dapp_R, long d) {
  if (q_R < 2) throw InvalidArgument("q_R must be at least 2");
  Rational C = Rational(C_L) + Rational(Integer(q - q_R - 1), Integer(q_R - 1)) * C_R +
               Rational(Integer(q_R), Integer(q_R - 1)) *
                   Rational((q - q_R - 1) * Dapp_R + d * q_R - 2 * q_R + q - d);
  C.canonicalize();
  if (C.get_den() != 1) throw NonIntegerResult("factor formula constant is " + C.get_str());
  return C.get_num().get_si();
}

std::vector<std::pair<int, int>> default_probe_plan(int q, int D) {
  return {{q, D}, {q + 2, D + 2}, {q + 4, D + 1}, {q + 3, D + 3}};
}

std::string OrderInference::report() const {
  std::ostringstream os;
  for (auto& p : probes) os << "Q=" << p.Q << " D=" << p.D << " N=" << p.N << " f=" << p.f << "\n";
  os << "formula: " << formula.str() << "\n";
  return os.str();
}

}  // namespace orefactor
