#pragma once

// Text form of constructible exponential functions.
//
//   vf x, y; res xi; int j;
//   L^(-j) * [j >= 1, ord(x) == j] * E(x*y) + sum eta : [eta != 0] * e(eta*ac(x))
//
// Extensions over the minimal grammar: parentheses, unary minus, division by
// invertible constants, integer powers, and `r in P m` for residue m-th
// powers. A `sum` binder scopes over the rest of its product.

#include <stdexcept>
#include <string>

#include "cef/cexp.hpp"

namespace cef {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, int col, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

/// Declarations followed by the expression.
std::string print(const CExp& e);
/// Expression only.
std::string print_expr(const CExp& e);
std::string print_term(const CExpTerm& t);

/// Parses declarations and an expression. Undeclared identifiers take the
/// sort implied by their first unambiguous use (valued inside E, ac, ord;
/// residue inside e; integer otherwise).
CExp parse(const std::string& text);

/// Parses a residue, valued, or linear term against a context.
VTerm parse_vterm(const std::string& text);
RTerm parse_rterm(const std::string& text, const std::map<std::string, Sort>& ctx = {});

}  // namespace cef
