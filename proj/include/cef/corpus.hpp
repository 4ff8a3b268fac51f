#pragma once

// Declarative test cases (JSON files under corpus/) and the checks run on
// them by the CLI and the acceptance suite.
//
// A file holds {"kind": ..., "cases": [...]}. Kinds:
//   integral          dsl, bind, expected, box {var: vmin}, depth, at {param: value}
//   schwartz-bruhat   dsl, vars, alpha0
//   residue           dsl, vars
//   convolution       operands (two or three DSL sources), vars

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cef/cexp.hpp"
#include "cef/oracle.hpp"

namespace cef {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorpusCase {
  std::string file;
  std::string kind;
  std::string name;
  std::string note;
  std::string dsl;
  std::vector<std::string> bind;
  std::optional<std::string> expected;
  std::vector<std::string> vars;
  int64_t alpha0 = 0;
  std::vector<std::string> operands;
  IntegrationBox box;
  /// Values of free residue or integer parameters for the numeric checks.
  std::map<std::string, int64_t> at;

  CExp expr() const;
  /// expr() with the parameters of `at` substituted.
  CExp closed_expr() const;
  Point params(const LocalField& K) const;
};

std::vector<CorpusCase> load_corpus(const std::string& path);

struct CheckResult {
  std::string check;
  bool passed = false;
  double delta = 0;
  std::string detail;
};

/// Integral in the bind order equals the expected expression exactly.
CheckResult check_symbolic(const CorpusCase& c);
/// Symbolic integral at L = p against coset enumeration over Q_p with the
/// canonical character, to tol.
CheckResult check_specialization(const CorpusCase& c, int64_t p, double tol = 1e-9);
/// Two-variable cases: both integration orders agree exactly, and their
/// values at p = 5, 7 agree with each other to tol.
CheckResult check_fubini(const CorpusCase& c, double tol = 1e-9);
/// Q_p against F_p((t)) over all twists mod w^twist_depth.
CheckResult check_transfer(const CorpusCase& c, const std::vector<int64_t>& primes, int twist_depth,
                           double tol = 1e-9);
/// Schwartz-Bruhat membership and F o F = L^(-d) reflection.
CheckResult check_sb_inversion(const CorpusCase& c);
/// Residue transform applied twice is L^d times the reflection.
CheckResult check_residue_inversion(const CorpusCase& c);
/// Commutativity and F(f * g) = F(f) F(g) for pairs; associativity as well for triples.
std::vector<CheckResult> check_convolution(const CorpusCase& c);

/// Every check applicable to the case kind: specialization at p = 3, 5, 7, 11
/// and, if asked, transfer at p = 5, 7, 11 with twist depth 2.
std::vector<CheckResult> run_case(const CorpusCase& c, bool with_transfer = false);

}  // namespace cef
