#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace pqm {

/// Outcome of one law (axiom, rule or invariant) checked over many instances.
struct CheckResult {
  std::string name;
  /// Which axiom set(s) or suite the law belongs to, e.g. "base", "revised".
  std::string group;
  /// "H" (all subspaces), "V" (rays and bottom), "circuit", or "structure".
  std::string model;
  std::size_t instances = 0;
  /// Instances whose hypothesis held, so that the conclusion was actually
  /// tested. Guards against vacuous passes.
  std::size_t nontrivial = 0;
  std::size_t violations = 0;
  /// Instances that could not be evaluated (structure fragments only).
  std::size_t skipped = 0;
  /// False for exploratory results that are recorded but not required.
  bool asserted = true;
  /// First few violations, human readable.
  std::vector<std::string> examples;

  bool ok() const { return !asserted || violations == 0; }
  void record_violation(std::string what) {
    ++violations;
    if (examples.size() < 5) examples.push_back(std::move(what));
  }
};

struct SuiteReport {
  std::string suite;
  int dim = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  /// Set when every instance was enumerated; `samples` is then the domain size.
  bool exhaustive = false;
  std::vector<CheckResult> results;

  bool passed() const {
    for (const auto& r : results)
      if (!r.ok()) return false;
    return true;
  }
  std::size_t total_violations() const {
    std::size_t n = 0;
    for (const auto& r : results)
      if (r.asserted) n += r.violations;
    return n;
  }
  const CheckResult* find(const std::string& name, const std::string& model = {}) const {
    for (const auto& r : results)
      if (r.name == name && (model.empty() || r.model == model)) return &r;
    return nullptr;
  }
};

}  // namespace pqm
