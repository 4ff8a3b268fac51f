#pragma once

// Valued-field and residue Fourier transforms, convolution and the
// Schwartz-Bruhat test, built on integrate.

#include <string>
#include <vector>

#include "cef/integrate.hpp"

namespace cef {

/// Ball indicator prod [ord x_i >= alpha].
CExp phi(const LinForm& alpha, const std::vector<std::string>& vars);
/// Shell indicator prod [ord x_i == alpha].
CExp psi(const LinForm& alpha, const std::vector<std::string>& vars);
/// Shell with fixed angular components: prod [ord x_i == alpha, ac x_i == xi_i, xi_i != 0].
CExp psi_ac(const LinForm& alpha, const std::vector<RTerm>& xi, const std::vector<std::string>& vars);

/// F(e)(x) = integral of e(y) E(sum x_i y_i) dy; the result is again a
/// function of vars.
IntegrationResult fourier_vf(const CExp& e, const std::vector<std::string>& vars);
/// f(e)(x) = sum over y of e(y) e(sum x_i y_i), for residue variables.
CExp fourier_res(const CExp& e, const std::vector<std::string>& vars);
/// (f * g)(x) = integral of f(x - z) g(z) dz.
IntegrationResult convolve(const CExp& f, const CExp& g, const std::vector<std::string>& vars);
/// x -> -x in the given variables (valued or residue, by sort).
CExp reflect(const CExp& e, const std::vector<std::string>& vars);

struct SchwartzBruhatReport {
  bool compact = false;  // e * phi_{-alpha0} == e
  bool locally_constant = false;  // e * phi_{alpha0} == L^(-alpha0 d) e
  bool holds() const { return compact && locally_constant; }
};
SchwartzBruhatReport schwartz_bruhat(const CExp& e, const std::vector<std::string>& vars, int64_t alpha0);
bool is_schwartz_bruhat(const CExp& e, const std::vector<std::string>& vars, int64_t alpha0);

}  // namespace cef
