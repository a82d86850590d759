#pragma once

// Decision procedure for sentences evaluated in the lattice of subspaces of
// C^d. A basic sentence exists x . /\ [x:p_i] /\ ~[x:q_j] holds iff no q_j
// contains p_inf = meet of the p_i; a ray of p_inf outside every q_j is then
// a witness. For d >= 3 this decides the theory itself.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "pqm/normalizer.hpp"
#include "pqm/report.hpp"
#include "pqm/subspace.hpp"

namespace pqm {

struct LeafTrace {
  std::size_t index = 0;
  bool truth = false;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  /// Meet of the positives (top when there are none).
  Subspace p_inf = Subspace::bottom(1);
  /// Indices j with p_inf <= q_j; the leaf is true iff this is empty.
  std::vector<std::size_t> failing_negatives;
  std::optional<Subspace> witness;
};

struct Verdict {
  bool truth = false;
  /// Present for true existential leaves, and propagated through Or.
  std::optional<Subspace> witness;
  std::vector<LeafTrace> leaves;
};

/// Pointwise truth of the leaf's conjunction at x: x <= p_i and x </= q_j.
bool satisfies(const Subspace& x, const BasicSentence& b, const Tolerance& tol = {});

Verdict decide_basic(const BasicSentence& b, int dim, std::uint64_t seed = 0, const Tolerance& tol = {});

/// Boolean evaluation; every leaf is decided (no short-circuit) so the trace
/// is complete. Leaf k uses seed + k.
Verdict evaluate(const BoolCombo& c, int dim, std::uint64_t seed = 0, const Tolerance& tol = {});

struct VdCrossCheck {
  std::size_t samples = 0;
  /// Sampled rays (or bottom) satisfying the conjunction pointwise.
  std::size_t satisfying_samples = 0;
  bool decider_truth = false;
  /// True when the decider returned no witness or the witness satisfies the
  /// conjunction pointwise.
  bool witness_replayed = true;
  /// satisfying_samples > 0 implies decider_truth, and the witness replayed.
  bool consistent = true;
};

/// One-sided comparison with a Monte-Carlo search over rays. Rays are drawn
/// from C^d, from each positive, and from the intersection of the positives
/// computed as a null space (independently of meet); bottom is always tried.
VdCrossCheck cross_check_vd(const BasicSentence& b, int dim, std::size_t samples, std::uint64_t seed,
                            const Tolerance& tol = {});

/// Checks every axiom of both axiom sets in the subspace and the ray
/// semantics with `samples` random instances each. The strengthened meet
/// axiom and the projection-elimination axiom are only asserted for d >= 3.
SuiteReport check_axiom_suite(int dim, std::size_t samples, std::uint64_t seed, const Tolerance& tol = {});

}  // namespace pqm
