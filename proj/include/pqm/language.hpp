#pragma once

// Terms, formulas and problem files of the verification-statement language.
//
// A term is a variable under a chain of projector and unitary applications.
// An atom [t : p] states that the system denoted by t verifies property p.
// The language has no equality and no constants. See docs/grammar.md for the
// concrete syntax.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pqm/error.hpp"
#include "pqm/subspace.hpp"

namespace pqm {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Var, Proj, Apply };

  Kind kind = Kind::Var;
  /// Variable name for Var, projector subspace symbol for Proj, unitary symbol
  /// for Apply.
  std::string name;
  TermPtr arg;

  static TermPtr var(std::string name);
  static TermPtr proj(std::string subspace, TermPtr arg);
  static TermPtr apply(std::string unitary, TermPtr arg);

  /// The variable at the root of the composition chain.
  const std::string& variable() const;
};

bool operator==(const Term& a, const Term& b);

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Atom, Not, And, Or, Implies, Iff, Exists, Forall };

  Kind kind = Kind::Atom;
  TermPtr term;        // Atom
  std::string symbol;  // Atom: the property symbol
  std::string var;     // Exists / Forall
  FormulaPtr lhs;      // Not operand, quantifier body, left operand
  FormulaPtr rhs;      // right operand of binary connectives

  static FormulaPtr atom(TermPtr term, std::string symbol);
  static FormulaPtr negation(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr implies(FormulaPtr a, FormulaPtr b);
  static FormulaPtr iff(FormulaPtr a, FormulaPtr b);
  static FormulaPtr exists(std::string var, FormulaPtr body);
  static FormulaPtr forall(std::string var, FormulaPtr body);
};

/// Structural equality of syntax trees.
bool operator==(const Formula& a, const Formula& b);

/// Variables occurring free in f.
std::vector<std::string> free_variables(const Formula& f);

/// Symbol tables shared by problem and circuit files. `top` and `bot` are
/// always present in `subspaces`.
struct Definitions {
  int dim = 0;
  std::map<std::string, Subspace> subspaces;
  std::map<std::string, UnitaryOp> unitaries;

  explicit Definitions(int d = 0);
  const Subspace& subspace(const std::string& name) const;
  const UnitaryOp& unitary(const std::string& name) const;
};

struct Problem {
  Definitions defs;
  FormulaPtr sentence;
};

struct CircuitStepRef {
  enum class Kind { Project, Unitary };
  Kind kind;
  std::string symbol;
};

struct CircuitDocument {
  Definitions defs;
  std::vector<CircuitStepRef> steps;
  /// `top` or a subspace symbol.
  std::string input = "top";
};

class ParseError : public Error {
 public:
  enum class Kind { Lex, Parse, Semantic };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string message_;
};

/// Parses a problem file: `dim`, `let` definitions and exactly one `assert`.
/// Throws ParseError on any lexical, syntactic or semantic error.
Problem parse_problem(std::string_view text, const Tolerance& tol = {});

/// Parses a circuit file: `dim`, `let` definitions, one `circuit = [...]` and
/// an optional `input = ...`.
CircuitDocument parse_circuit_document(std::string_view text, const Tolerance& tol = {});

/// Parses only definitions (`dim` and `let`); `assert`, `circuit` and `input`
/// statements are accepted and ignored.
Definitions parse_definitions(std::string_view text, const Tolerance& tol = {});

/// Parses a standalone formula. With `defs`, symbols and closedness are
/// checked as in parse_problem; without, only syntax is checked.
FormulaPtr parse_formula(std::string_view text, const Definitions* defs = nullptr);

std::string pretty_print(const Term& t);
/// Minimal parenthesisation; parse_formula(pretty_print(f)) == f.
std::string pretty_print(const Formula& f);

struct Diagnostic {
  enum class Severity { Error, Warning, Info };
  Severity severity;
  std::string message;
};

/// Well-formedness check for problems built programmatically. Returns an
/// empty list for a well-formed problem with dim >= 3; below dimension 3 a
/// warning records that completeness does not apply.
std::vector<Diagnostic> validate(const Problem& p);

std::string to_string(Diagnostic::Severity s);

}  // namespace pqm
