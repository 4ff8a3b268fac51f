#pragma once

// Elimination of bound variables: valued-field integration over cells,
// residue sums and integer series.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cef/cexp.hpp"

namespace cef {

class UnsupportedIntegrand : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UndeterminedUnitOrder : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonAffineResidueArgument : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class IntegrationStatus { Integrable, NonIntegrable, PartiallySymbolic };
std::string status_name(IntegrationStatus s);

struct IntegrationResult {
  CExp value;
  IntegrationStatus status = IntegrationStatus::Integrable;
  /// Parameter guards under which a series diverged.
  std::vector<PresConj> divergent;
  /// Terms still carrying residue sums the rules could not evaluate.
  std::vector<std::string> opaque;
};

/// Integral of E(u*z + w) over {ord z = j} (and ac z = ac_value when given).
CExp model_integral(const LinForm& j, const std::optional<RTerm>& ac_value, const VTerm& u, const VTerm& w);

IntegrationResult integrate_vf(const CExp& e, const std::string& var);
/// Sum over a residue variable. Throws NonAffineResidueArgument when the
/// character argument is not affine in it.
CExp sum_res(const CExp& e, const std::string& var);
IntegrationResult sum_int(const CExp& e, const std::string& var);
/// Eliminates the variables in order, each according to its sort.
IntegrationResult integrate_all(const CExp& e, const std::vector<std::string>& order);

/// Pull-back along t = u*(s - c) + w times the Jacobian factor L^(-ord u).
CExp change_of_variables_affine(const CExp& e, const std::string& t, const std::string& s, const VTerm& u,
                                const VTerm& c, const VTerm& w);

/// rewrite plus the residue line split sum_eta e(c*eta + d) = L*e(d)*[c == 0].
CExp simplify(const CExp& e);

/// Sort of a name in e: from the context, else inferred from its uses.
std::optional<Sort> sort_of(const CExp& e, const std::string& name);

}  // namespace cef
