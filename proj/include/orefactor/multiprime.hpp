#pragma once

#include <string>
#include <vector>

#include "orefactor/diffop.hpp"
#include "orefactor/modarith.hpp"

namespace orefactor {

enum class CoeffStatus { Reconstructed, Pending, Inconsistent };

// Coefficient c_{i,j} is reconstructed as (c * scale * var_scale^j) and then
// divided back; var_scale = 1/2 corresponds to the substitution w -> w/2.
struct ScaleHint {
  Integer scale = 1;
  Rational var_scale = 1;
  std::string str() const;
};

struct ReconstructionTask {
  Basis basis = Basis::Theta;
  int order = -1;
  int degree = -1;
  int anchor_i = -1, anchor_j = -1;  // gauge: this coefficient is 1 mod every prime
  std::vector<uint32_t> primes;
  std::vector<OpP> ops;  // aligned, one per prime
  std::vector<ScaleHint> hints;
  bool auto_hints = true;  // derive 2-adic hints from recovered coefficients
  std::vector<std::vector<CoeffStatus>> status;  // [i][j]

  size_t num_primes() const { return primes.size(); }
};

// Scales every operator so the anchor coefficient (default: top coefficient
// of the leading polynomial) is 1. Throws ShapeMismatch on differing basis,
// order or degree, or when the anchor vanishes modulo some prime.
ReconstructionTask align_operators(const std::vector<OpP>& ops, int anchor_i = -1,
                                   int anchor_j = -1);

struct ReconstructionResult {
  OpQ op;                // pending coefficients are left at 0
  bool complete = false;
  bool provisional = true;  // no held-out prime was available
  int reconstructed = 0, pending = 0;
  uint32_t holdout = 0;
  std::string report;  // one line per coefficient
};

// CRT then rational reconstruction per coefficient. Candidates come from
// the identity scale, the task hints and 2-adic hints read off coefficients
// already recovered; the smallest one wins. With 3 or more primes the last
// one is held out and every recovered coefficient is checked against it.
ReconstructionResult reconstruct_operator(ReconstructionTask& task);

// Powers of two around the magnitude of the lowest nonzero coefficient of an
// exactly known polynomial.
std::vector<ScaleHint> scaling_hints_from(const PolyQ& known, int spread = 1);

struct ExponentConstraint {
  Rational point;
  std::vector<Rational> exponents;  // full multiset at the point
};

struct StructuralConstraints {
  std::vector<ExponentConstraint> exponents;
  // polynomials that must divide the leading coefficient
  std::vector<PolyQ> divides_leading;
};

struct StageReport {
  int block;  // coefficient index i
  int reconstructed = 0, pending = 0;
  std::vector<ScaleHint> hints_used;
};

struct IterativeResult {
  ReconstructionResult result;
  std::vector<StageReport> stages;
  std::string str() const;
};

// Blocks are reconstructed from the leading one down. Each finished block
// contributes scaling hints for the next; constraints are checked on
// residues first and on the rational result once it is complete.
IterativeResult iterative_reconstruct(ReconstructionTask& task,
                                      const StructuralConstraints& constraints);

// p-curvature nilpotence at `count` primes >= 10007 not in `avoid`.
bool nilpotence_gate(const OpQ& L, const std::vector<uint32_t>& avoid = {}, int count = 3);

// Task directory: <stem>.p<prime>.lode per prime, <stem>.recon.lode and
// report.txt after reconstruction.
void save_task(const std::string& dir, const std::string& stem, const ReconstructionTask& task);
ReconstructionTask load_task(const std::string& dir, std::string* stem = nullptr);
void save_result(const std::string& dir, const std::string& stem, const ReconstructionResult& r);

}  // namespace orefactor
