#pragma once

// Equality of constructible exponential functions.
//
// Three stages: the difference rewrites to zero (syntactic); after residue
// inequalities are expanded as 1 - [r == 0] and residue equations linear in
// an atom are used to eliminate it, terms of the difference sharing their
// non-Presburger shape cancel for every integer
// assignment of the order and integer symbols in a box, with L specialized to
// a random residue modulo 2^61 - 1 (piecewise); point sampling through the
// interpreter at small primes (oracle).

#include <cstdint>
#include <string>
#include <vector>

#include "cef/cexp.hpp"

namespace cef {

enum class Verdict { Syntactic, Piecewise, Oracle, Different, Unknown };
std::string verdict_name(Verdict v);

struct EquivalenceOptions {
  int64_t box = 6;
  int64_t max_box_points = 20000;
  int oracle_samples = 200;
  std::vector<int64_t> primes = {5, 7};
  uint64_t seed = 1;
};

struct EquivalenceReport {
  Verdict verdict = Verdict::Unknown;
  std::string detail;
  /// True for the syntactic and piecewise verdicts.
  bool exact() const { return verdict == Verdict::Syntactic || verdict == Verdict::Piecewise; }
  bool equal() const { return exact() || verdict == Verdict::Oracle; }
};

EquivalenceReport check_equal(const CExp& a, const CExp& b, const EquivalenceOptions& opt = {});

/// Piecewise test alone: true when every shape group of d vanishes on the box.
/// On failure, detail names the first group and assignment that did not cancel.
bool vanishes_piecewise(const CExp& d, const EquivalenceOptions& opt, std::string* detail = nullptr);

}  // namespace cef
