#pragma once

// JSON and text renderings of library results. Every JSON document carries
// "schema": 1; object keys are sorted, so output is byte-stable.

#include <string>

#include <json.hpp>

#include "pqm/circuit.hpp"
#include "pqm/decider.hpp"
#include "pqm/normalizer.hpp"
#include "pqm/oracles.hpp"
#include "pqm/report.hpp"
#include "pqm/structure.hpp"
#include "pqm/subspace.hpp"

namespace pqm {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Orthonormal basis depending only on the subspace: Gram-Schmidt over the
/// columns of its projector, in order.
Matrix canonical_basis(const Subspace& p);

/// {"dim", "rank", "basis": [[[re, im], ...], ...]} with the canonical basis
/// and entries below 1e-14 in magnitude written as 0.
Json to_json(const Subspace& p);
/// Reads the same shape; basis vectors need not be orthonormal. Entries may
/// be plain numbers or [re, im] pairs.
Subspace subspace_from_json(const Json& j, const Tolerance& tol = {});

/// "bot", "top", or span{(..), ..} over the canonical basis.
std::string to_text(const Subspace& p, int precision = 6);

Json to_json(const BasicSentence& b);
Json to_json(const BoolCombo& c);
Json to_json(const LeafTrace& t);
/// Leaf traces are included only with `trace`.
Json to_json(const Verdict& v, bool trace);
Json to_json(const CheckResult& r);
Json to_json(const SuiteReport& r);
Json to_json(const VdCrossCheck& c);

Json to_json(const EllipseWitness& w);
Json to_json(const IncompatDecomposition& d);
Json to_json(const EllipseChain& c);

Json to_json(const FilterReport& f, const FiniteStructure& s);
Json to_json(const KappaResult& k, const FiniteStructure& s);
Json to_json(const Characterization& c);
Json to_json(const SaturationResult& r);

Json trace_json(const Circuit& c, const std::vector<SystemState>& trace);

/// Wraps a body object with the schema field.
Json document(Json body);

/// One line per check: name, model, counts and PASS / FAIL / info.
std::string to_text(const SuiteReport& r);

}  // namespace pqm
