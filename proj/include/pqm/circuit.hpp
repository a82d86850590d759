#pragma once

// Possibilistic semantics of linear circuits: a circuit is a composition of
// projectors and unitaries, a system is denoted by a subspace, and a system
// is impossible exactly when its denotation is bottom.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "pqm/language.hpp"
#include "pqm/report.hpp"
#include "pqm/subspace.hpp"

namespace pqm {

struct ProjectOnto {
  Subspace target;
  std::string label;
};

struct ApplyUnitary {
  UnitaryOp op;
  std::string label;
};

using Step = std::variant<ProjectOnto, ApplyUnitary>;

class Circuit {
 public:
  explicit Circuit(int dim) : dim_(dim) {}
  Circuit(int dim, std::vector<Step> steps);

  int dim() const noexcept { return dim_; }
  const std::vector<Step>& steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_.size(); }

  /// Appends a step; throws DimensionMismatch on a foreign dimension.
  Circuit& project(Subspace q, std::string label = {});
  Circuit& apply(UnitaryOp u, std::string label = {});
  Circuit& append(Step s);
  /// This circuit followed by `next`.
  Circuit then(const Circuit& next) const;

 private:
  int dim_;
  std::vector<Step> steps_;
};

struct SystemState {
  Subspace value;
};

/// Left fold: a projector q maps m to m & q, a unitary U maps m to U(m).
SystemState run_circuit(const Circuit& c, const SystemState& input, const Tolerance& tol = {});

/// The states after each step; element 0 is the input.
std::vector<SystemState> run_circuit_traced(const Circuit& c, const SystemState& input, const Tolerance& tol = {});

bool is_impossible(const Circuit& c, const SystemState& input, const Tolerance& tol = {});

struct VerifyMode {
  enum class Kind { Exact, Sampled };
  Kind kind = Kind::Exact;
  std::size_t count = 0;
  std::uint64_t seed = 0;

  static VerifyMode exact() { return {}; }
  static VerifyMode sampled(std::size_t count, std::uint64_t seed) { return {Kind::Sampled, count, seed}; }
};

/// [s : p]. Exact mode tests containment; sampled mode tests the definition
/// directly: for rays phi <= p^perp, projecting s onto phi is impossible. The
/// rays are the basis vectors of p^perp followed by `count` random rays.
bool verifies(const SystemState& s, const Subspace& p, VerifyMode mode = VerifyMode::exact(),
              const Tolerance& tol = {});

/// Resolves a parsed circuit file against its definitions.
Circuit circuit_from_document(const CircuitDocument& doc);
SystemState input_from_document(const CircuitDocument& doc);

/// The circuit applied to the variable of a term, innermost step first.
Circuit circuit_of_term(const Term& t, const Definitions& defs);

/// Rules R1 to R6 on random instances satisfying their side conditions. Each
/// instance is evaluated on a random input and on top.
SuiteReport check_rule_suite(int dim, std::size_t samples, std::uint64_t seed, const Tolerance& tol = {});

/// The base axioms evaluated with verification defined through impossibility
/// of circuits ending in a projection onto a sampled ray, never through
/// containment. `rays` rays are drawn per verification statement.
SuiteReport check_axioms_from_rules(int dim, std::size_t samples, std::uint64_t seed, std::size_t rays = 16,
                                    const Tolerance& tol = {});

}  // namespace pqm
