#pragma once

// Explicit finite structures for the verification language: a finite domain,
// a finite fragment of named subspaces, function tables for the declared
// projectors and unitaries, and the verification relation. Axioms are checked
// over the fragment, and the map kappa sending an element to the least member
// of its filter is built and tested as a strong morphism into the subspace
// model.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pqm/error.hpp"
#include "pqm/report.hpp"
#include "pqm/sampling.hpp"
#include "pqm/subspace.hpp"

namespace pqm {

struct UnitaryTable {
  std::string name;
  UnitaryOp op;
  /// Element index -> element index.
  std::vector<std::size_t> table;
};

struct FiniteStructure {
  int dim = 0;
  std::vector<std::string> domain;
  /// Fragment symbols and their values; always contains `top` and `bot`.
  std::vector<std::string> symbols;
  std::vector<Subspace> values;
  /// Indexed by symbol; present for symbols with a declared projector.
  std::vector<std::optional<std::vector<std::size_t>>> projectors;
  std::vector<UnitaryTable> unitaries;
  /// relation[m][p] holds iff [m : p].
  std::vector<std::vector<char>> relation;

  std::size_t size() const noexcept { return domain.size(); }
  std::size_t fragment_size() const noexcept { return symbols.size(); }
  bool holds(std::size_t m, std::size_t p) const { return relation[m][p] != 0; }

  std::optional<std::size_t> element_index(const std::string& name) const;
  std::optional<std::size_t> symbol_index(const std::string& name) const;
  /// First fragment symbol whose value equals x.
  std::optional<std::size_t> find_value(const Subspace& x, const Tolerance& tol = {}) const;
  std::size_t top() const;
  std::size_t bot() const;
};

struct StructureDiagnostic {
  /// JSON pointer to the offending location ("" for the document).
  std::string path;
  std::string message;
};

/// Every problem found while loading, not only the first.
class StructureError : public Error {
 public:
  explicit StructureError(std::vector<StructureDiagnostic> diagnostics);
  const std::vector<StructureDiagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<StructureDiagnostic> diagnostics_;
};

/// Parses and validates the JSON structure format (see docs/formats.md).
FiniteStructure load_structure(std::string_view json_text, const Tolerance& tol = {});
/// Inverse of load_structure; output is deterministic.
std::string dump_structure(const FiniteStructure& s, int indent = 2);

/// Both axiom sets over the domain and the fragment. Instances whose operands
/// leave the fragment are counted as skipped. The strengthened meet and
/// projection-elimination axioms are asserted only for d >= 3.
SuiteReport check_structure_axioms(const FiniteStructure& s, const Tolerance& tol = {});

struct FilterReport {
  std::size_t element = 0;
  /// Symbols p with [m : p], in fragment order.
  std::vector<std::size_t> members;
  bool contains_top = false;
  /// (p, q) with p a member, p <= q, q not a member.
  std::vector<std::pair<std::size_t, std::size_t>> upward_violations;
  /// (p, q) with p a member, q a declared projector, p & q in the fragment but
  /// not verified by the projected element.
  std::vector<std::pair<std::size_t, std::size_t>> sasaki_violations;
  /// Two distinct rays are members but bottom is not.
  bool two_rays_without_bottom = false;
  /// (p, q): incompatible members that are both minimal (d >= 3 only).
  std::vector<std::pair<std::size_t, std::size_t>> incompatible_minimal_pairs;

  bool ok() const {
    return contains_top && upward_violations.empty() && sasaki_violations.empty() && !two_rays_without_bottom &&
           incompatible_minimal_pairs.empty();
  }
};

/// Throws PreconditionError for an out-of-range element.
FilterReport filter_of(const FiniteStructure& s, std::size_t m, const Tolerance& tol = {});

struct KappaResult {
  /// Meet of the filter members (top for an empty filter).
  Subspace meet = Subspace::bottom(1);
  /// A member equal to the meet, when one exists.
  std::optional<std::size_t> least;
  /// For NoLeast: two minimal members whose meet is not a member.
  std::optional<std::pair<std::size_t, std::size_t>> minimal_pair;

  bool has_least() const { return least.has_value(); }
};

KappaResult kappa_of(const FiniteStructure& s, std::size_t m, const Tolerance& tol = {});

/// Conditions of a strong morphism for kappa:
///   relation:  [m : p] iff kappa(m) <= p
///   projector: kappa(pi_q(m)) = kappa(m) & q
///   unitary:   kappa(U(m)) = U(kappa(m))
/// plus the side condition that some kappa(m) is not bottom. An element
/// without least member is reported under "kappa". "ray-coverage" records,
/// without asserting, whether every ray of the fragment with a declared
/// projector is some kappa(m).
SuiteReport check_strong_morphism(const FiniteStructure& s, const Tolerance& tol = {});

struct Characterization {
  bool axioms_pass = false;
  bool morphism_pass = false;
  std::size_t skipped_instances = 0;
  SuiteReport axioms;
  SuiteReport morphism;

  bool agree() const { return axioms_pass == morphism_pass; }
  /// "agree", "fragment-skip" (disagreement with skipped instances that
  /// could explain it) or "bug".
  std::string status() const;
};

Characterization check_characterization(const FiniteStructure& s, const Tolerance& tol = {});

// ---------------------------------------------------------------------------
// Fragments and generated corpora

struct SaturationResult {
  std::vector<Subspace> elements;
  /// Number of elements after each round, starting with the seed set.
  std::vector<std::size_t> growth;
  /// False when the size cap stopped the closure.
  bool closed = false;
};

/// Closes a set of subspaces under ortho, meet, Sasaki projection, Sasaki
/// hook and the images under the given unitaries and their inverses. `top`
/// and `bot` are always added.
SaturationResult saturate(const std::vector<Subspace>& seeds, const std::vector<UnitaryOp>& unitaries, int dim,
                          std::size_t max_size = 256, const Tolerance& tol = {});

/// A structure whose elements are subspaces, with relation given by
/// containment; `element_values[m]` is the subspace behind element m.
struct ImageStructure {
  FiniteStructure structure;
  std::vector<Subspace> element_values;
};

/// Builds the image structure of `elements` over a named fragment: every
/// fragment symbol gets a projector table and every listed unitary a table.
/// Throws PreconditionError if some image is not among the elements.
ImageStructure make_image_structure(int dim, const std::vector<std::string>& names,
                                    const std::vector<Subspace>& fragment,
                                    const std::vector<std::pair<std::string, UnitaryOp>>& unitaries,
                                    const std::vector<Subspace>& elements, const Tolerance& tol = {});

struct ImageStructureOptions {
  int dim = 3;
  /// Number of rotated bases in the distinguished plane; fragment size is
  /// 4 + 4 * bases.
  int bases = 2;
  /// Extra copies of random elements in the domain.
  int duplicates = 0;
  /// Domain restricted to the rays of the fragment and bottom.
  bool rays_only = false;
  int unitaries = 1;
};

/// Random image structure over a fragment closed under every operation used
/// by the axioms: a plane with `bases` orthonormal bases, its complement W,
/// and the joins of each basis ray with W. Unitaries act as scalars on the
/// plane and on W.
ImageStructure generate_image_structure(const ImageStructureOptions& opts, Rng& rng, const Tolerance& tol = {});

enum class FaultKind { RemoveRelation, AddRelation, RedirectProjector };

std::string to_string(FaultKind k);

struct Mutant {
  FiniteStructure structure;
  FaultKind kind;
  std::string description;
};

/// One injected fault in an image structure, chosen so that both an axiom
/// and a strong-morphism condition fail.
Mutant inject_fault(const ImageStructure& base, FaultKind kind, Rng& rng, const Tolerance& tol = {});

}  // namespace pqm
