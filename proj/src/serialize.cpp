#include "pqm/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace pqm {

namespace {

double clip(double x) { return std::abs(x) < 1e-14 ? 0.0 : x; }

Json complex_json(Complex c) { return Json::array({clip(c.real()), clip(c.imag())}); }

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_json(v(k)));
  return out;
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw DomainError("subspace JSON: entry must be a number or a [re, im] pair");
}

std::string fmt(double x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, clip(x) == 0.0 ? 0.0 : x);
  return buf;
}

std::string complex_text(Complex c, int precision) {
  const double re = clip(c.real());
  const double im = clip(c.imag());
  if (im == 0.0) return fmt(re, precision);
  if (re == 0.0) return fmt(im, precision) + "i";
  return fmt(re, precision) + (im < 0 ? "-" : "+") + fmt(std::abs(im), precision) + "i";
}

}  // namespace

Matrix canonical_basis(const Subspace& p) {
  const int d = p.dim();
  const int r = p.rank();
  Matrix out(d, r);
  if (r == 0) return out;
  const Matrix proj = p.projector();
  int found = 0;
  for (int j = 0; j < d && found < r; ++j) {
    Vector v = proj.col(j);
    for (int k = 0; k < found; ++k) v -= out.col(k).dot(v) * out.col(k);
    for (int k = 0; k < found; ++k) v -= out.col(k).dot(v) * out.col(k);
    if (v.norm() > 1e-6) out.col(found++) = v.normalized();
  }
  if (found < r) return p.basis();
  return out;
}

Json to_json(const Subspace& p) {
  Json basis = Json::array();
  const Matrix b = canonical_basis(p);
  for (int k = 0; k < b.cols(); ++k) basis.push_back(vector_json(b.col(k)));
  return {{"dim", p.dim()}, {"rank", p.rank()}, {"basis", basis}};
}

Subspace subspace_from_json(const Json& j, const Tolerance& tol) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("basis"))
    throw DomainError("subspace JSON: expected an object with 'dim' and 'basis'");
  const int d = j.at("dim").get<int>();
  if (d < 1) throw DomainError("subspace JSON: dimension must be positive");
  const Json& basis = j.at("basis");
  Matrix m(d, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) {
    if (!basis[c].is_array() || static_cast<int>(basis[c].size()) != d)
      throw DimensionMismatch(d, static_cast<int>(basis[c].size()), "subspace JSON");
    for (int r = 0; r < d; ++r) m(r, static_cast<Eigen::Index>(c)) = complex_from_json(basis[c][static_cast<std::size_t>(r)]);
  }
  return span_of(m, tol);
}

std::string to_text(const Subspace& p, int precision) {
  if (p.is_bottom()) return "bot";
  if (p.is_top()) return "top";
  const Matrix b = canonical_basis(p);
  std::string out = "span{";
  for (int k = 0; k < b.cols(); ++k) {
    if (k) out += ", ";
    out += "(";
    for (int i = 0; i < b.rows(); ++i) {
      if (i) out += ", ";
      out += complex_text(b(i, k), precision);
    }
    out += ")";
  }
  return out + "}";
}

Json to_json(const BasicSentence& b) {
  Json pos = Json::array(), neg = Json::array();
  for (const auto& p : b.positives) pos.push_back(to_json(p));
  for (const auto& q : b.negatives) neg.push_back(to_json(q));
  return {{"positives", pos}, {"negatives", neg}};
}

Json to_json(const BoolCombo& c) {
  switch (c.kind) {
    case BoolCombo::Kind::Leaf:
      return {{"kind", "leaf"}, {"leaf", to_json(c.leaf)}};
    case BoolCombo::Kind::Not:
      return {{"kind", "not"}, {"children", Json::array({to_json(*c.children.front())})}};
    case BoolCombo::Kind::And:
    case BoolCombo::Kind::Or: {
      Json ch = Json::array();
      for (const auto& x : c.children) ch.push_back(to_json(*x));
      return {{"kind", c.kind == BoolCombo::Kind::And ? "and" : "or"}, {"children", ch}};
    }
  }
  throw InternalError("to_json: unknown combo kind");
}

Json to_json(const LeafTrace& t) {
  Json j{{"index", t.index},
         {"truth", t.truth},
         {"positives", t.positives},
         {"negatives", t.negatives},
         {"p_inf", to_json(t.p_inf)},
         {"failing_negatives", t.failing_negatives}};
  j["witness"] = t.witness ? to_json(*t.witness) : Json(nullptr);
  return j;
}

Json to_json(const Verdict& v, bool trace) {
  Json j{{"truth", v.truth}};
  j["witness"] = v.witness ? to_json(*v.witness) : Json(nullptr);
  if (trace) {
    Json leaves = Json::array();
    for (const auto& t : v.leaves) leaves.push_back(to_json(t));
    j["leaves"] = leaves;
  }
  return j;
}

Json to_json(const CheckResult& r) {
  return {{"name", r.name},          {"group", r.group},         {"model", r.model},
          {"instances", r.instances}, {"nontrivial", r.nontrivial}, {"violations", r.violations},
          {"skipped", r.skipped},     {"asserted", r.asserted},     {"ok", r.ok()},
          {"examples", r.examples}};
}

Json to_json(const SuiteReport& r) {
  Json results = Json::array();
  for (const auto& c : r.results) results.push_back(to_json(c));
  return {{"suite", r.suite},
          {"dim", r.dim},
          {"seed", r.seed},
          {"samples", r.samples},
          {"exhaustive", r.exhaustive},
          {"passed", r.passed()},
          {"violations", r.total_violations()},
          {"results", results}};
}

Json to_json(const VdCrossCheck& c) {
  return {{"samples", c.samples},
          {"satisfying_samples", c.satisfying_samples},
          {"decider_truth", c.decider_truth},
          {"witness_replayed", c.witness_replayed},
          {"consistent", c.consistent}};
}

Json to_json(const EllipseWitness& w) {
  return {{"a", w.a},
          {"dim", w.dim},
          {"x", w.x},
          {"y", w.y},
          {"w", vector_json(w.w)},
          {"v_plus", vector_json(w.v_plus)},
          {"v_minus", vector_json(w.v_minus)},
          {"w_dot_v_plus", complex_json(w.w_dot_v_plus)},
          {"w_dot_v_minus", complex_json(w.w_dot_v_minus)},
          {"v_plus_dot_v_minus", complex_json(w.v_plus_dot_v_minus)},
          {"ellipse_residual", clip(w.ellipse_residual)},
          {"orthogonal", w.orthogonal},
          {"on_ellipse", w.on_ellipse},
          {"spans_compatible", w.spans_compatible},
          {"consistent", w.consistent()}};
}

Json to_json(const IncompatDecomposition& d) {
  return {{"P", to_json(d.P)},
          {"Q", to_json(d.Q)},
          {"lambda", d.lambda},
          {"u", vector_json(d.u)},
          {"v", vector_json(d.v)},
          {"C", to_json(d.C)},
          {"eigen_residual", clip(d.eigen_residual)},
          {"u_outside_q", d.u_outside_q},
          {"v_outside_p", d.v_outside_p},
          {"c_compatible_p", d.c_compatible_p},
          {"c_compatible_q", d.c_compatible_q},
          {"meet_pc_is_u", d.meet_pc_is_u},
          {"meet_qc_is_v", d.meet_qc_is_v},
          {"ok", d.ok()}};
}

Json to_json(const EllipseChain& c) {
  Json rounds = Json::array();
  for (const auto& r : c.rounds)
    rounds.push_back({{"c_in", r.c_in},
                      {"c_out", r.c_out},
                      {"ellipse_residual", clip(r.ellipse_residual)},
                      {"compatible_plus", r.compatible_plus},
                      {"compatible_minus", r.compatible_minus},
                      {"meet_plus", r.meet_plus},
                      {"meet_minus", r.meet_minus}});
  return {{"a", c.a}, {"dim", c.dim}, {"rounds", rounds}, {"reaches_bottom", c.reaches_bottom}, {"ok", c.ok()}};
}

namespace {

Json pair_list(const std::vector<std::pair<std::size_t, std::size_t>>& ps, const FiniteStructure& s) {
  Json out = Json::array();
  for (auto [p, q] : ps) out.push_back({s.symbols[p], s.symbols[q]});
  return out;
}

}  // namespace

Json to_json(const FilterReport& f, const FiniteStructure& s) {
  Json members = Json::array();
  for (std::size_t p : f.members) members.push_back(s.symbols[p]);
  return {{"element", s.domain[f.element]},
          {"members", members},
          {"contains_top", f.contains_top},
          {"upward_violations", pair_list(f.upward_violations, s)},
          {"sasaki_violations", pair_list(f.sasaki_violations, s)},
          {"two_rays_without_bottom", f.two_rays_without_bottom},
          {"incompatible_minimal_pairs", pair_list(f.incompatible_minimal_pairs, s)},
          {"ok", f.ok()}};
}

Json to_json(const KappaResult& k, const FiniteStructure& s) {
  Json j{{"meet", to_json(k.meet)}, {"has_least", k.has_least()}};
  j["least"] = k.least ? Json(s.symbols[*k.least]) : Json(nullptr);
  j["minimal_pair"] = k.minimal_pair ? Json::array({s.symbols[k.minimal_pair->first], s.symbols[k.minimal_pair->second]})
                                     : Json(nullptr);
  return j;
}

Json to_json(const Characterization& c) {
  return {{"axioms_pass", c.axioms_pass},
          {"morphism_pass", c.morphism_pass},
          {"agree", c.agree()},
          {"status", c.status()},
          {"skipped_instances", c.skipped_instances},
          {"axioms", to_json(c.axioms)},
          {"morphism", to_json(c.morphism)}};
}

Json to_json(const SaturationResult& r) {
  Json elements = Json::array();
  for (const auto& e : r.elements) elements.push_back(to_json(e));
  return {{"closed", r.closed}, {"growth", r.growth}, {"elements", elements}};
}

Json trace_json(const Circuit& c, const std::vector<SystemState>& trace) {
  Json steps = Json::array();
  steps.push_back({{"step", "input"}, {"value", to_json(trace.front().value)}});
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& s = c.steps()[i];
    std::string label;
    if (const auto* p = std::get_if<ProjectOnto>(&s))
      label = p->label.empty() ? "proj" : p->label;
    else
      label = std::get<ApplyUnitary>(s).label.empty() ? "unitary" : std::get<ApplyUnitary>(s).label;
    steps.push_back({{"step", label}, {"value", to_json(trace[i + 1].value)}});
  }
  return steps;
}

Json document(Json body) {
  body["schema"] = kSchemaVersion;
  return body;
}

std::string to_text(const SuiteReport& r) {
  std::ostringstream out;
  out << r.suite << " d=" << r.dim;
  if (r.exhaustive)
    out << " exhaustive elements=" << r.samples << "\n";
  else
    out << " seed=" << r.seed << " samples=" << r.samples << "\n";
  for (const auto& c : r.results) {
    char line[256];
    std::snprintf(line, sizeof line, "  %-16s %-9s %-14s instances=%-6zu nontrivial=%-6zu violations=%-4zu skipped=%-6zu %s\n",
                  c.name.c_str(), c.model.c_str(), c.group.c_str(), c.instances, c.nontrivial, c.violations,
                  c.skipped, !c.asserted ? "info" : (c.ok() ? "PASS" : "FAIL"));
    out << line;
    for (const auto& e : c.examples) out << "      " << e << "\n";
  }
  out << (r.passed() ? "passed" : "failed") << "\n";
  return out.str();
}

}  // namespace pqm
