#pragma once

// Rewrites closed sentences into boolean combinations of basic sentences
//   exists x . [x : p1] & ... & [x : pn] & ~[x : q1] & ... & ~[x : qm]
// which the decider handles directly.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "pqm/language.hpp"
#include "pqm/subspace.hpp"

namespace pqm {

struct BasicSentence {
  std::vector<Subspace> positives;
  std::vector<Subspace> negatives;
};

struct BoolCombo;
using BoolComboPtr = std::shared_ptr<const BoolCombo>;

struct BoolCombo {
  enum class Kind { Leaf, Not, And, Or };

  Kind kind = Kind::Leaf;
  BasicSentence leaf;                  // Leaf
  std::vector<BoolComboPtr> children;  // Not has exactly one; And/Or have two or more

  static BoolComboPtr make_leaf(BasicSentence b);
  static BoolComboPtr make_not(BoolComboPtr c);
  /// Collapses to the single child when given exactly one.
  static BoolComboPtr make_and(std::vector<BoolComboPtr> cs);
  static BoolComboPtr make_or(std::vector<BoolComboPtr> cs);
};

std::size_t node_count(const BoolCombo& c);
std::size_t leaf_count(const BoolCombo& c);

/// An atom whose term is the bare variable: [var : property].
struct ReducedAtom {
  std::string var;
  Subspace property;
};

/// Peels the term of [t : p] from the outside in:
///   [proj[q](t) : p]  =>  [t : p hook q]
///   [U(t) : p]        =>  [t : U^H p]
ReducedAtom reduce_atom(const Term& term, const Subspace& property, const Definitions& defs,
                        const Tolerance& tol = {});

/// Thrown when the disjunctive-normal-form expansion exceeds the node budget.
class NormalFormTooLarge : public Error {
 public:
  explicit NormalFormTooLarge(std::size_t limit)
      : Error("normal form exceeds " + std::to_string(limit) + " nodes") {}
};

inline constexpr std::size_t kNormalFormNodeLimit = 1'000'000;

/// Equivalent boolean combination of basic sentences. The sentence must be
/// closed. Domains are assumed non-empty, as usual in first-order logic.
BoolComboPtr normalize(const Formula& sentence, const Definitions& defs, const Tolerance& tol = {},
                       std::size_t node_limit = kNormalFormNodeLimit);

/// Renders a combination back into a problem: each leaf becomes
/// `exists x . ...` over freshly named subspace symbols.
Problem to_problem(const BoolCombo& c, int dim);

}  // namespace pqm
