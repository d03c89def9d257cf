#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "orefactor/diffop.hpp"
#include "orefactor/elliptic.hpp"
#include "orefactor/series.hpp"

namespace orefactor {

// Text formats: series-v1, lode-v1 and the ansatz listing. Modulus 0 means
// rational coefficients written as integers or num/den.

std::string write_series(const SeriesQ& s);
std::string write_series(const SeriesP& s);
std::string write_operator(const OpQ& L);
std::string write_operator(const OpP& L);

using AnySeries = std::variant<SeriesQ, SeriesP>;
using AnyOperator = std::variant<OpQ, OpP>;

AnySeries parse_series(const std::string& text);
AnyOperator parse_operator(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

AnySeries load_series(const std::string& path);
AnyOperator load_operator(const std::string& path);

// Operator over Q from either variant; modular input is rejected.
OpQ as_rational(const AnyOperator& op);
// Operator reduced (or checked) modulo p.
OpP as_modular(const AnyOperator& op, const PrimeContext& ctx);
SeriesP as_modular(const AnySeries& s, const PrimeContext& ctx);
uint64_t modulus_of(const AnyOperator& op);
uint64_t modulus_of(const AnySeries& s);

// Ansatz listing over Q as produced by AnsatzSolution::str().
AnsatzSolution<RationalField> parse_ansatz(const std::string& text);

Rational parse_rational(const std::string& token);
// "c0,c1,...:e" as used on the command line.
PrefactorTerm<RationalField> parse_prefactor_term(const std::string& text);

}  // namespace orefactor
