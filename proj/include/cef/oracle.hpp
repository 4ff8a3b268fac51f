#pragma once

// Brute-force evaluation over truncated local fields: Haar integrals by
// coset enumeration, residue point counts, G(j), and Q_p vs F_p((t)).

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cef/cexp.hpp"
#include "cef/interpret.hpp"
#include "cef/localfield.hpp"

namespace cef {

class TooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VfRange {
  std::string var;
  int64_t vmin = 0;
};

struct IntRange {
  std::string var;
  int64_t lo = 0;
  int64_t hi = 0;
};

struct IntegrationBox {
  std::vector<VfRange> vf;
  /// Cosets are refined until w^(vmin + depth) when the integrand is not
  /// yet constant on them.
  int depth = 6;
  std::vector<IntRange> ints;
  std::vector<std::string> res;  // summed over F_p
};

struct OracleResult {
  std::complex<double> value;
  double delta = 0;        // |value(depth) - value(depth + 1)|
  bool truncated = false;  // support not certified inside the box, or undecided cosets left
  std::optional<Rational> exact;  // character-free integrands
};

/// Integrand on a tuple of cosets (one element per valued variable, each
/// known modulo its precision). Throws InsufficientPrecision if the value is
/// not constant on the cosets.
using CosetIntegrand = std::function<std::complex<double>(const std::vector<Element>&)>;

struct AdaptiveResult {
  std::complex<double> value;
  bool undecided = false;  // some coset at maximal depth was not decided
};

AdaptiveResult adaptive_integrate(const LocalField& K, const std::vector<int64_t>& vmin, int depth,
                                  const CosetIntegrand& f);

/// Integral of e over the box with the remaining free variables taken from
/// params.
OracleResult numeric_integrate(const CExp& e, const Character& ch, const IntegrationBox& box, const Point& params = {});

/// Exact value of a character-free expression at a point (nullopt if the
/// expression has E or e factors).
std::optional<Rational> interpret_exact(const CExp& e, const LocalField& K, const Point& pt);

/// Solutions over F_p of residue conditions in the given variables.
int64_t count_points(const std::vector<CondAtom>& conds, const std::vector<std::string>& vars, int64_t p,
                     const Point& params = {});

/// G(j) = integral over ord u = j, u in lambda P_m of psi(u) du.
std::complex<double> gauss_G(int64_t j, int64_t m, const Element& lambda, const Character& ch, int depth = 6);

struct TransferRow {
  int64_t p;
  std::string field;
  std::string twist;
  std::complex<double> value;
  double delta;
};

struct TransferReport {
  std::vector<TransferRow> rows;
  double max_discrepancy = 0;   // over matched twists
  bool pattern_agrees = true;   // vanishing pattern over all twists
  bool twist_stable = true;     // every field's value independent of the twist
};

TransferReport transfer_compare(const CExp& e, const std::vector<int64_t>& primes, int twist_depth,
                                const IntegrationBox& box, double tol = 1e-9);

}  // namespace cef
