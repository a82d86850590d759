#include "pqm/structure.hpp"
#include "pqm/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

namespace pqm {

using nlohmann::json;

std::optional<std::size_t> FiniteStructure::element_index(const std::string& name) const {
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> FiniteStructure::symbol_index(const std::string& name) const {
  for (std::size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i] == name) return i;
  return std::nullopt;
}

std::optional<std::size_t> FiniteStructure::find_value(const Subspace& x, const Tolerance& tol) const {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i].rank() == x.rank() && eq(values[i], x, tol)) return i;
  return std::nullopt;
}

std::size_t FiniteStructure::top() const {
  auto i = symbol_index("top");
  if (!i) throw InternalError("structure has no top symbol");
  return *i;
}

std::size_t FiniteStructure::bot() const {
  auto i = symbol_index("bot");
  if (!i) throw InternalError("structure has no bot symbol");
  return *i;
}

namespace {

std::string summarize(const std::vector<StructureDiagnostic>& ds) {
  std::string out = std::to_string(ds.size()) + " structure error(s)";
  for (const auto& d : ds) out += "\n  " + (d.path.empty() ? std::string("/") : d.path) + ": " + d.message;
  return out;
}

}  // namespace

StructureError::StructureError(std::vector<StructureDiagnostic> diagnostics)
    : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

// ---------------------------------------------------------------------------
// Loading

namespace {

std::string pointer_escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

class Loader {
 public:
  Loader(const json& doc, const Tolerance& tol) : doc_(doc), tol_(tol) {}

  FiniteStructure run() {
    if (!doc_.is_object()) {
      fail("", "document must be a JSON object");
      throw StructureError(diags_);
    }
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      static const std::set<std::string> known{"schema",     "dim",       "domain",  "subspaces",
                                               "projectors", "unitaries", "relation"};
      if (!known.count(it.key())) fail("/" + pointer_escape(it.key()), "unknown key");
    }
    if (doc_.contains("schema") && doc_["schema"] != kSchemaVersion) fail("/schema", "unsupported schema version");
    read_dim();
    if (s_.dim <= 0) throw StructureError(diags_);
    read_domain();
    read_subspaces();
    read_projectors();
    read_unitaries();
    read_relation();
    if (!diags_.empty()) throw StructureError(diags_);
    return std::move(s_);
  }

 private:
  void fail(std::string path, std::string message) { diags_.push_back({std::move(path), std::move(message)}); }

  void read_dim() {
    if (!doc_.contains("dim")) return fail("/dim", "missing");
    const json& d = doc_["dim"];
    if (!d.is_number_integer() || d.get<long long>() < 1 || d.get<long long>() > 64)
      return fail("/dim", "must be an integer between 1 and 64");
    s_.dim = d.get<int>();
  }

  void read_domain() {
    if (!doc_.contains("domain")) return fail("/domain", "missing");
    const json& d = doc_["domain"];
    if (!d.is_array()) return fail("/domain", "must be an array of element names");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string path = "/domain/" + std::to_string(i);
      if (!d[i].is_string()) {
        fail(path, "element name must be a string");
        continue;
      }
      const std::string name = d[i].get<std::string>();
      if (!seen.insert(name).second) {
        fail(path, "duplicate element '" + name + "'");
        continue;
      }
      s_.domain.push_back(name);
    }
    s_.relation.assign(s_.domain.size(), {});
  }

  std::optional<Complex> read_complex(const json& v, const std::string& path) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return Complex(v[0].get<double>(), v[1].get<double>());
    fail(path, "entry must be a number or a [re, im] pair");
    return std::nullopt;
  }

  std::optional<Vector> read_vector(const json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "vector must be an array");
      return std::nullopt;
    }
    if (static_cast<int>(v.size()) != s_.dim) {
      fail(path, "vector has " + std::to_string(v.size()) + " entries, expected " + std::to_string(s_.dim));
      return std::nullopt;
    }
    Vector out(s_.dim);
    bool ok = true;
    for (int k = 0; k < s_.dim; ++k) {
      auto c = read_complex(v[static_cast<std::size_t>(k)], path + "/" + std::to_string(k));
      if (c)
        out(k) = *c;
      else
        ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }

  void add_symbol(const std::string& name, Subspace value) {
    s_.symbols.push_back(name);
    s_.values.push_back(std::move(value));
  }

  void read_subspaces() {
    std::map<std::string, Subspace> given;
    if (doc_.contains("subspaces")) {
      const json& ss = doc_["subspaces"];
      if (!ss.is_object()) {
        fail("/subspaces", "must be an object mapping symbols to bases");
      } else {
        for (auto it = ss.begin(); it != ss.end(); ++it) {
          const std::string path = "/subspaces/" + pointer_escape(it.key());
          if (!it.value().is_array()) {
            fail(path, "basis must be an array of vectors");
            continue;
          }
          std::vector<Vector> vs;
          bool ok = true;
          for (std::size_t i = 0; i < it.value().size(); ++i) {
            auto v = read_vector(it.value()[i], path + "/" + std::to_string(i));
            if (v)
              vs.push_back(std::move(*v));
            else
              ok = false;
          }
          if (!ok) continue;
          Subspace value = span_of(std::span<const Vector>(vs), s_.dim, tol_);
          if (it.key() == "top" && !value.is_top()) {
            fail(path, "symbol 'top' must denote the whole space");
            continue;
          }
          if (it.key() == "bot" && !value.is_bottom()) {
            fail(path, "symbol 'bot' must denote the zero subspace");
            continue;
          }
          given.emplace(it.key(), std::move(value));
        }
      }
    }
    add_symbol("top", Subspace::top(s_.dim));
    add_symbol("bot", Subspace::bottom(s_.dim));
    for (auto& [name, value] : given)
      if (name != "top" && name != "bot") add_symbol(name, value);
    for (auto& row : s_.relation) row.assign(s_.symbols.size(), 0);
    s_.projectors.assign(s_.symbols.size(), std::nullopt);
  }

  std::optional<std::vector<std::size_t>> read_table(const json& t, const std::string& path) {
    if (!t.is_object()) {
      fail(path, "table must be an object mapping elements to elements");
      return std::nullopt;
    }
    std::vector<std::optional<std::size_t>> table(s_.domain.size());
    bool ok = true;
    for (auto it = t.begin(); it != t.end(); ++it) {
      const std::string entry = path + "/" + pointer_escape(it.key());
      auto from = s_.element_index(it.key());
      if (!from) {
        fail(entry, "unknown element '" + it.key() + "'");
        ok = false;
        continue;
      }
      if (!it.value().is_string()) {
        fail(entry, "image must be an element name");
        ok = false;
        continue;
      }
      auto to = s_.element_index(it.value().get<std::string>());
      if (!to) {
        fail(entry, "unknown element '" + it.value().get<std::string>() + "'");
        ok = false;
        continue;
      }
      table[*from] = *to;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (!table[i]) {
        fail(path, "table is not total: no image for element '" + s_.domain[i] + "'");
        ok = false;
        continue;
      }
      out.push_back(*table[i]);
    }
    if (!ok) return std::nullopt;
    return out;
  }

  void read_projectors() {
    if (!doc_.contains("projectors")) return;
    const json& ps = doc_["projectors"];
    if (!ps.is_object()) return fail("/projectors", "must be an object mapping symbols to tables");
    for (auto it = ps.begin(); it != ps.end(); ++it) {
      const std::string path = "/projectors/" + pointer_escape(it.key());
      auto sym = s_.symbol_index(it.key());
      if (!sym) {
        fail(path, "unknown subspace symbol '" + it.key() + "'");
        continue;
      }
      s_.projectors[*sym] = read_table(it.value(), path);
    }
  }

  void read_unitaries() {
    if (!doc_.contains("unitaries")) return;
    const json& us = doc_["unitaries"];
    if (!us.is_object()) return fail("/unitaries", "must be an object mapping names to {matrix, table}");
    for (auto it = us.begin(); it != us.end(); ++it) {
      const std::string path = "/unitaries/" + pointer_escape(it.key());
      if (s_.symbol_index(it.key())) fail(path, "name '" + it.key() + "' is already a subspace symbol");
      const json& u = it.value();
      if (!u.is_object() || !u.contains("matrix") || !u.contains("table")) {
        fail(path, "must be an object with 'matrix' and 'table'");
        continue;
      }
      const json& rows = u["matrix"];
      if (!rows.is_array() || static_cast<int>(rows.size()) != s_.dim) {
        fail(path + "/matrix", "must have " + std::to_string(s_.dim) + " rows");
        continue;
      }
      Matrix m(s_.dim, s_.dim);
      bool ok = true;
      for (int r = 0; r < s_.dim; ++r) {
        auto row = read_vector(rows[static_cast<std::size_t>(r)], path + "/matrix/" + std::to_string(r));
        if (row)
          m.row(r) = row->transpose();
        else
          ok = false;
      }
      auto table = read_table(u["table"], path + "/table");
      if (!ok || !table) continue;
      try {
        s_.unitaries.push_back({it.key(), UnitaryOp(m), std::move(*table)});
      } catch (const NotUnitary& e) {
        fail(path + "/matrix", "not unitary (max |U^H U - I| = " + std::to_string(e.deviation()) + ")");
      }
    }
  }

  void read_relation() {
    if (!doc_.contains("relation")) return;
    const json& rel = doc_["relation"];
    if (!rel.is_array()) return fail("/relation", "must be an array of [element, symbol] pairs");
    for (std::size_t i = 0; i < rel.size(); ++i) {
      const std::string path = "/relation/" + std::to_string(i);
      const json& pair = rel[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        fail(path, "must be an [element, symbol] pair of strings");
        continue;
      }
      auto m = s_.element_index(pair[0].get<std::string>());
      auto p = s_.symbol_index(pair[1].get<std::string>());
      if (!m) fail(path + "/0", "unknown element '" + pair[0].get<std::string>() + "'");
      if (!p) fail(path + "/1", "unknown subspace symbol '" + pair[1].get<std::string>() + "'");
      if (m && p) s_.relation[*m][*p] = 1;
    }
  }

  const json& doc_;
  const Tolerance& tol_;
  FiniteStructure s_;
  std::vector<StructureDiagnostic> diags_;
};

json complex_json(Complex c) {
  auto clip = [](double x) { return std::abs(x) < 1e-14 ? 0.0 : x; };
  return json::array({clip(c.real()), clip(c.imag())});
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_json(v(k)));
  return out;
}

}  // namespace

FiniteStructure load_structure(std::string_view json_text, const Tolerance& tol) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw StructureError({{"", "invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what()}});
  }
  return Loader(doc, tol).run();
}

std::string dump_structure(const FiniteStructure& s, int indent) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["dim"] = s.dim;
  doc["domain"] = s.domain;
  json subspaces = json::object();
  for (std::size_t i = 0; i < s.symbols.size(); ++i) {
    json basis = json::array();
    for (int k = 0; k < s.values[i].rank(); ++k) basis.push_back(vector_json(s.values[i].basis().col(k)));
    subspaces[s.symbols[i]] = basis;
  }
  doc["subspaces"] = subspaces;
  json projectors = json::object();
  for (std::size_t q = 0; q < s.symbols.size(); ++q) {
    if (!s.projectors[q]) continue;
    json table = json::object();
    for (std::size_t m = 0; m < s.size(); ++m) table[s.domain[m]] = s.domain[(*s.projectors[q])[m]];
    projectors[s.symbols[q]] = table;
  }
  doc["projectors"] = projectors;
  json unitaries = json::object();
  for (const auto& u : s.unitaries) {
    json rows = json::array();
    for (int r = 0; r < u.op.dim(); ++r) rows.push_back(vector_json(u.op.matrix().row(r).transpose()));
    json table = json::object();
    for (std::size_t m = 0; m < s.size(); ++m) table[s.domain[m]] = s.domain[u.table[m]];
    unitaries[u.name] = {{"matrix", rows}, {"table", table}};
  }
  doc["unitaries"] = unitaries;
  json relation = json::array();
  for (std::size_t m = 0; m < s.size(); ++m)
    for (std::size_t p = 0; p < s.fragment_size(); ++p)
      if (s.holds(m, p)) relation.push_back({s.domain[m], s.symbols[p]});
  doc["relation"] = relation;
  return doc.dump(indent);
}

// ---------------------------------------------------------------------------
// Operation tables over the fragment

namespace {

using Index = std::optional<std::size_t>;

struct FragmentOps {
  std::size_t n = 0;
  std::vector<std::vector<char>> leq_;
  std::vector<std::vector<char>> eq_;
  std::vector<std::vector<char>> compat;
  std::vector<std::vector<Index>> meet_;
  std::vector<std::vector<Index>> and_;   // and_[p][q] = p & q
  std::vector<std::vector<Index>> hook_;  // hook_[p][q] = p hook q
  std::vector<Index> ortho_;
  std::vector<std::vector<Index>> uimg;  // per unitary
  std::vector<std::vector<Index>> uinv;

  FragmentOps(const FiniteStructure& s, const Tolerance& tol) : n(s.fragment_size()) {
    const auto& v = s.values;
    leq_.assign(n, std::vector<char>(n, 0));
    eq_ = compat = leq_;
    meet_.assign(n, std::vector<Index>(n));
    and_ = hook_ = meet_;
    ortho_.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      ortho_[p] = s.find_value(ortho(v[p]), tol);
      for (std::size_t q = 0; q < n; ++q) {
        leq_[p][q] = leq(v[p], v[q], tol);
        compat[p][q] = compatible(v[p], v[q], tol);
        meet_[p][q] = s.find_value(meet(v[p], v[q], tol), tol);
        and_[p][q] = s.find_value(sasaki_and(v[p], v[q], tol), tol);
        hook_[p][q] = s.find_value(sasaki_hook(v[p], v[q], tol), tol);
      }
    }
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) eq_[p][q] = leq_[p][q] && leq_[q][p];
    for (const auto& u : s.unitaries) {
      std::vector<Index> img(n), inv(n);
      const UnitaryOp ui = u.op.inverse();
      for (std::size_t p = 0; p < n; ++p) {
        img[p] = s.find_value(apply_unitary(u.op, v[p], tol), tol);
        inv[p] = s.find_value(apply_unitary(ui, v[p], tol), tol);
      }
      uimg.push_back(std::move(img));
      uinv.push_back(std::move(inv));
    }
  }
};

struct StructureLaw {
  CheckResult r;
  std::size_t domain;

  StructureLaw(const std::string& name, const std::string& group, bool asserted, std::size_t domain_size)
      : domain(domain_size) {
    r.name = name;
    r.group = group;
    r.model = "structure";
    r.asserted = asserted;
  }

  void skip() {
    r.instances += domain;
    r.skipped += domain;
  }

  void check(bool hyp, bool concl, const std::string& what) {
    ++r.instances;
    if (!hyp) return;
    ++r.nontrivial;
    if (!concl) r.record_violation(what);
  }
};

}  // namespace

SuiteReport check_structure_axioms(const FiniteStructure& s, const Tolerance& tol) {
  SuiteReport report;
  report.suite = "structure-axioms";
  report.dim = s.dim;
  report.samples = s.size();
  report.exhaustive = true;
  const FragmentOps ops(s, tol);
  const std::size_t n = ops.n;
  const std::size_t M = s.size();
  const std::size_t top = s.top();
  const std::size_t bot = s.bot();
  const bool strong = s.dim >= 3;
  auto el = [&](std::size_t m) { return s.domain[m]; };
  auto sym = [&](std::size_t p) { return s.symbols[p]; };

  {
    StructureLaw law("neg-bot", "base,revised", true, M);
    law.r.instances = M;
    for (std::size_t m = 0; m < M; ++m)
      if (!s.holds(m, bot)) ++law.r.nontrivial;
    if (law.r.nontrivial == 0) law.r.record_violation("no element fails to verify bot");
    report.results.push_back(law.r);
  }
  {
    StructureLaw law("top", "base,revised", true, M);
    for (std::size_t m = 0; m < M; ++m) law.check(true, s.holds(m, top), "[" + el(m) + " : top] fails");
    report.results.push_back(law.r);
  }
  {
    StructureLaw law("leq", "base,revised", true, M);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        if (!ops.leq_[p][q]) continue;
        for (std::size_t m = 0; m < M; ++m)
          law.check(s.holds(m, p), s.holds(m, q), el(m) + ": " + sym(p) + " <= " + sym(q));
      }
    report.results.push_back(law.r);
  }
  auto meet_law = [&](const std::string& name, const std::string& group, bool asserted, bool only_compatible) {
    StructureLaw law(name, group, asserted, M);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        if (only_compatible && !ops.compat[p][q]) continue;
        const Index pq = ops.meet_[p][q];
        if (!pq) {
          law.skip();
          continue;
        }
        for (std::size_t m = 0; m < M; ++m)
          law.check(s.holds(m, p) && s.holds(m, q), s.holds(m, *pq),
                    el(m) + ": meet of " + sym(p) + " and " + sym(q));
      }
    report.results.push_back(law.r);
  };
  meet_law("meet-compatible", "base", true, true);
  meet_law("meet", "revised", strong, false);

  {
    StructureLaw law("proj-intro", "base,revised", true, M);
    for (std::size_t q = 0; q < n; ++q) {
      if (!s.projectors[q]) continue;
      const auto& tq = *s.projectors[q];
      for (std::size_t p = 0; p < n; ++p) {
        const Index pq = ops.and_[p][q];
        if (!pq) {
          law.skip();
          continue;
        }
        for (std::size_t m = 0; m < M; ++m)
          law.check(s.holds(m, p), s.holds(tq[m], *pq), el(m) + ": " + sym(p) + " under proj[" + sym(q) + "]");
      }
    }
    report.results.push_back(law.r);
  }
  {
    StructureLaw law("proj-compose", "base", true, M);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        if (!ops.leq_[p][q] || !s.projectors[p] || !s.projectors[q]) continue;
        const auto& tp = *s.projectors[p];
        const auto& tq = *s.projectors[q];
        for (std::size_t m = 0; m < M; ++m)
          law.check(s.holds(tp[tq[m]], bot), s.holds(tp[m], bot),
                    el(m) + ": proj[" + sym(p) + "] after proj[" + sym(q) + "]");
      }
    report.results.push_back(law.r);
  }
  {
    StructureLaw law("proj-bot", "base", true, M);
    for (std::size_t q = 0; q < n; ++q) {
      if (!s.projectors[q]) continue;
      if (!ops.ortho_[q]) {
        law.skip();
        continue;
      }
      const auto& tq = *s.projectors[q];
      for (std::size_t m = 0; m < M; ++m)
        law.check(s.holds(tq[m], bot), s.holds(m, *ops.ortho_[q]), el(m) + ": proj[" + sym(q) + "] to bot");
    }
    report.results.push_back(law.r);
  }
  {
    StructureLaw law("proj-elim", "revised", strong, M);
    for (std::size_t q = 0; q < n; ++q) {
      if (!s.projectors[q]) continue;
      const auto& tq = *s.projectors[q];
      for (std::size_t p = 0; p < n; ++p) {
        const Index h = ops.hook_[p][q];
        if (!h) {
          law.skip();
          continue;
        }
        for (std::size_t m = 0; m < M; ++m)
          law.check(s.holds(tq[m], p), s.holds(m, *h), el(m) + ": " + sym(p) + " hook " + sym(q));
      }
    }
    report.results.push_back(law.r);
  }
  {
    StructureLaw intro("unitary-intro", "base,revised", true, M);
    StructureLaw elim("unitary-elim", "base,revised", true, M);
    for (std::size_t k = 0; k < s.unitaries.size(); ++k) {
      const auto& u = s.unitaries[k];
      for (std::size_t p = 0; p < n; ++p) {
        if (const Index up = ops.uimg[k][p]) {
          for (std::size_t m = 0; m < M; ++m)
            intro.check(s.holds(m, p), s.holds(u.table[m], *up), el(m) + ": " + u.name + " image of " + sym(p));
        } else {
          intro.skip();
        }
        if (const Index pre = ops.uinv[k][p]) {
          for (std::size_t m = 0; m < M; ++m)
            elim.check(s.holds(u.table[m], p), s.holds(m, *pre), el(m) + ": " + u.name + " preimage of " + sym(p));
        } else {
          elim.skip();
        }
      }
    }
    report.results.push_back(intro.r);
    report.results.push_back(elim.r);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Filters and kappa

namespace {

void require_element(const FiniteStructure& s, std::size_t m, const char* where) {
  if (m >= s.size())
    throw PreconditionError(std::string(where) + ": unknown element index " + std::to_string(m));
}

std::vector<std::size_t> members_of(const FiniteStructure& s, std::size_t m) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < s.fragment_size(); ++p)
    if (s.holds(m, p)) out.push_back(p);
  return out;
}

std::vector<std::size_t> minimal_members(const FiniteStructure& s, const std::vector<std::size_t>& members,
                                         const Tolerance& tol) {
  std::vector<std::size_t> out;
  for (std::size_t p : members) {
    bool minimal = true;
    for (std::size_t r : members) {
      if (r == p) continue;
      if (leq(s.values[r], s.values[p], tol) && !leq(s.values[p], s.values[r], tol)) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(p);
  }
  return out;
}

}  // namespace

FilterReport filter_of(const FiniteStructure& s, std::size_t m, const Tolerance& tol) {
  require_element(s, m, "filter_of");
  FilterReport r;
  r.element = m;
  r.members = members_of(s, m);
  r.contains_top = s.holds(m, s.top());
  const auto& v = s.values;
  for (std::size_t p : r.members) {
    for (std::size_t q = 0; q < s.fragment_size(); ++q) {
      if (!s.holds(m, q) && leq(v[p], v[q], tol)) r.upward_violations.emplace_back(p, q);
      if (s.projectors[q]) {
        if (auto pq = s.find_value(sasaki_and(v[p], v[q], tol), tol)) {
          if (!s.holds((*s.projectors[q])[m], *pq)) r.sasaki_violations.emplace_back(p, q);
        }
      }
    }
  }
  std::vector<std::size_t> rays;
  for (std::size_t p : r.members)
    if (v[p].is_ray()) rays.push_back(p);
  bool distinct_rays = false;
  for (std::size_t i = 0; i < rays.size() && !distinct_rays; ++i)
    for (std::size_t j = i + 1; j < rays.size(); ++j)
      if (!eq(v[rays[i]], v[rays[j]], tol)) {
        distinct_rays = true;
        break;
      }
  r.two_rays_without_bottom = distinct_rays && !s.holds(m, s.bot());
  if (s.dim >= 3) {
    const auto minimal = minimal_members(s, r.members, tol);
    for (std::size_t i = 0; i < minimal.size(); ++i)
      for (std::size_t j = i + 1; j < minimal.size(); ++j)
        if (!compatible(v[minimal[i]], v[minimal[j]], tol)) r.incompatible_minimal_pairs.emplace_back(minimal[i], minimal[j]);
  }
  return r;
}

KappaResult kappa_of(const FiniteStructure& s, std::size_t m, const Tolerance& tol) {
  require_element(s, m, "kappa_of");
  KappaResult r;
  const auto members = members_of(s, m);
  std::vector<Subspace> vals;
  for (std::size_t p : members) vals.push_back(s.values[p]);
  r.meet = meet_all(vals, s.dim, tol);
  for (std::size_t p : members) {
    if (eq(s.values[p], r.meet, tol)) {
      r.least = p;
      return r;
    }
  }
  const auto minimal = minimal_members(s, members, tol);
  for (std::size_t i = 0; i < minimal.size() && !r.minimal_pair; ++i)
    for (std::size_t j = i + 1; j < minimal.size(); ++j) {
      const auto pq = s.find_value(meet(s.values[minimal[i]], s.values[minimal[j]], tol), tol);
      if (!pq || !s.holds(m, *pq)) {
        r.minimal_pair = std::make_pair(minimal[i], minimal[j]);
        break;
      }
    }
  if (!r.minimal_pair && minimal.size() >= 2) r.minimal_pair = std::make_pair(minimal[0], minimal[1]);
  return r;
}

SuiteReport check_strong_morphism(const FiniteStructure& s, const Tolerance& tol) {
  SuiteReport report;
  report.suite = "strong-morphism";
  report.dim = s.dim;
  report.samples = s.size();
  report.exhaustive = true;
  const std::size_t M = s.size();

  std::vector<std::optional<Subspace>> kappa(M);
  CheckResult k;
  k.name = "kappa";
  k.group = "morphism";
  k.model = "structure";
  for (std::size_t m = 0; m < M; ++m) {
    ++k.instances;
    ++k.nontrivial;
    KappaResult kr = kappa_of(s, m, tol);
    if (kr.least) {
      kappa[m] = s.values[*kr.least];
    } else {
      std::string what = s.domain[m] + ": filter has no least member";
      if (kr.minimal_pair)
        what += " (minimal " + s.symbols[kr.minimal_pair->first] + ", " + s.symbols[kr.minimal_pair->second] + ")";
      k.record_violation(what);
    }
  }
  report.results.push_back(k);

  auto law = [&](const std::string& name) {
    CheckResult r;
    r.name = name;
    r.group = "morphism";
    r.model = "structure";
    return r;
  };
  auto check = [](CheckResult& r, bool ok, const std::string& what) {
    ++r.instances;
    ++r.nontrivial;
    if (!ok) r.record_violation(what);
  };
  auto skip = [](CheckResult& r) {
    ++r.instances;
    ++r.skipped;
  };

  CheckResult rel = law("relation");
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t p = 0; p < s.fragment_size(); ++p) {
      if (!kappa[m]) {
        skip(rel);
        continue;
      }
      check(rel, s.holds(m, p) == leq(*kappa[m], s.values[p], tol), s.domain[m] + ", " + s.symbols[p]);
    }
  report.results.push_back(rel);

  CheckResult proj = law("projector");
  for (std::size_t q = 0; q < s.fragment_size(); ++q) {
    if (!s.projectors[q]) continue;
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t t = (*s.projectors[q])[m];
      if (!kappa[m] || !kappa[t]) {
        skip(proj);
        continue;
      }
      check(proj, eq(*kappa[t], sasaki_and(*kappa[m], s.values[q], tol), tol),
            s.domain[m] + " under proj[" + s.symbols[q] + "]");
    }
  }
  report.results.push_back(proj);

  CheckResult uni = law("unitary");
  for (const auto& u : s.unitaries) {
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t t = u.table[m];
      if (!kappa[m] || !kappa[t]) {
        skip(uni);
        continue;
      }
      check(uni, eq(*kappa[t], apply_unitary(u.op, *kappa[m], tol), tol), s.domain[m] + " under " + u.name);
    }
  }
  report.results.push_back(uni);

  CheckResult side = law("nontrivial-image");
  ++side.instances;
  ++side.nontrivial;
  bool some_nonbottom = false;
  for (const auto& km : kappa)
    if (km && !km->is_bottom()) some_nonbottom = true;
  if (!some_nonbottom) side.record_violation("every kappa(m) is bottom");
  report.results.push_back(side);

  CheckResult cover = law("ray-coverage");
  cover.asserted = false;
  for (std::size_t p = 0; p < s.fragment_size(); ++p) {
    if (!s.values[p].is_ray() || !s.projectors[p]) continue;
    bool hit = false;
    for (const auto& km : kappa)
      if (km && eq(*km, s.values[p], tol)) hit = true;
    check(cover, hit, "no element with kappa = " + s.symbols[p]);
  }
  report.results.push_back(cover);
  return report;
}

std::string Characterization::status() const {
  if (agree()) return "agree";
  return skipped_instances > 0 ? "fragment-skip" : "bug";
}

Characterization check_characterization(const FiniteStructure& s, const Tolerance& tol) {
  Characterization c;
  c.axioms = check_structure_axioms(s, tol);
  c.morphism = check_strong_morphism(s, tol);
  c.axioms_pass = c.axioms.passed();
  c.morphism_pass = c.morphism.passed();
  for (const auto& r : c.axioms.results) c.skipped_instances += r.skipped;
  return c;
}

// ---------------------------------------------------------------------------
// Saturation and generated structures

namespace {

bool insert_new(std::vector<Subspace>& set, const Subspace& x, const Tolerance& tol) {
  for (const auto& y : set)
    if (y.rank() == x.rank() && eq(x, y, tol)) return false;
  set.push_back(x);
  return true;
}

}  // namespace

SaturationResult saturate(const std::vector<Subspace>& seeds, const std::vector<UnitaryOp>& unitaries, int dim,
                          std::size_t max_size, const Tolerance& tol) {
  SaturationResult r;
  insert_new(r.elements, Subspace::top(dim), tol);
  insert_new(r.elements, Subspace::bottom(dim), tol);
  for (const auto& x : seeds) {
    if (x.dim() != dim) throw DimensionMismatch(dim, x.dim(), "saturate");
    insert_new(r.elements, x, tol);
  }
  r.growth.push_back(r.elements.size());
  std::vector<UnitaryOp> ops = unitaries;
  for (const auto& u : unitaries) ops.push_back(u.inverse());

  while (true) {
    std::vector<Subspace> next = r.elements;
    const std::size_t n = r.elements.size();
    auto add = [&](const Subspace& x) { return insert_new(next, x, tol) && next.size() > max_size; };
    bool capped = false;
    for (std::size_t i = 0; i < n && !capped; ++i) {
      const Subspace& p = r.elements[i];
      capped = add(ortho(p));
      for (const auto& u : ops) capped = capped || add(apply_unitary(u, p, tol));
      for (std::size_t j = 0; j < n && !capped; ++j) {
        const Subspace& q = r.elements[j];
        capped = add(meet(p, q, tol)) || add(sasaki_and(p, q, tol)) || add(sasaki_hook(p, q, tol));
      }
    }
    r.elements = std::move(next);
    r.growth.push_back(r.elements.size());
    if (capped) return r;
    if (r.elements.size() == n) {
      r.closed = true;
      return r;
    }
  }
}

ImageStructure make_image_structure(int dim, const std::vector<std::string>& names,
                                    const std::vector<Subspace>& fragment,
                                    const std::vector<std::pair<std::string, UnitaryOp>>& unitaries,
                                    const std::vector<Subspace>& elements, const Tolerance& tol) {
  if (names.size() != fragment.size()) throw PreconditionError("make_image_structure: one name per fragment member");
  ImageStructure out;
  FiniteStructure& s = out.structure;
  s.dim = dim;
  out.element_values = elements;
  for (std::size_t m = 0; m < elements.size(); ++m) s.domain.push_back("m" + std::to_string(m));
  s.symbols.push_back("top");
  s.values.push_back(Subspace::top(dim));
  s.symbols.push_back("bot");
  s.values.push_back(Subspace::bottom(dim));
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == "top" || names[i] == "bot") continue;
    s.symbols.push_back(names[i]);
    s.values.push_back(fragment[i]);
  }

  auto element_of = [&](const Subspace& x, const std::string& what) {
    for (std::size_t m = 0; m < elements.size(); ++m)
      if (elements[m].rank() == x.rank() && eq(elements[m], x, tol)) return m;
    throw PreconditionError("make_image_structure: " + what + " is not an element");
  };

  s.relation.assign(elements.size(), std::vector<char>(s.symbols.size(), 0));
  for (std::size_t m = 0; m < elements.size(); ++m)
    for (std::size_t p = 0; p < s.symbols.size(); ++p) s.relation[m][p] = leq(elements[m], s.values[p], tol);

  s.projectors.assign(s.symbols.size(), std::nullopt);
  for (std::size_t q = 0; q < s.symbols.size(); ++q) {
    std::vector<std::size_t> table;
    for (std::size_t m = 0; m < elements.size(); ++m)
      table.push_back(element_of(sasaki_and(elements[m], s.values[q], tol),
                                 "projection of m" + std::to_string(m) + " onto " + s.symbols[q]));
    s.projectors[q] = std::move(table);
  }
  for (const auto& [name, op] : unitaries) {
    std::vector<std::size_t> table;
    for (std::size_t m = 0; m < elements.size(); ++m)
      table.push_back(element_of(apply_unitary(op, elements[m], tol), name + " image of m" + std::to_string(m)));
    s.unitaries.push_back({name, op, std::move(table)});
  }
  return out;
}

ImageStructure generate_image_structure(const ImageStructureOptions& opts, Rng& rng, const Tolerance& tol) {
  const int d = opts.dim;
  if (d < 3) throw PreconditionError("generate_image_structure: dimension must be at least 3");
  if (opts.bases < 1) throw PreconditionError("generate_image_structure: at least one basis is required");

  const Matrix frame = random_unitary(d, rng).matrix();
  const Vector w1 = frame.col(0);
  const Vector w2 = frame.col(1);
  const Subspace W = Subspace::from_orthonormal(frame.rightCols(d - 2));
  const Subspace plane = Subspace::from_orthonormal(frame.leftCols(2));

  std::vector<std::string> names{"W", "plane"};
  std::vector<Subspace> fragment{W, plane};
  std::uniform_real_distribution<double> angle(0.15, 1.42);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  for (int k = 0; k < opts.bases; ++k) {
    const double t = angle(rng);
    const Complex e = std::polar(1.0, phase(rng));
    const Vector b1 = std::cos(t) * w1 + e * std::sin(t) * w2;
    const Vector b2 = -std::conj(e) * std::sin(t) * w1 + std::cos(t) * w2;
    const Subspace r1 = Subspace::from_orthonormal(b1);
    const Subspace r2 = Subspace::from_orthonormal(b2);
    const std::string idx = std::to_string(k);
    names.insert(names.end(), {"a" + idx, "b" + idx, "aW" + idx, "bW" + idx});
    fragment.insert(fragment.end(), {r1, r2, join(r1, W, tol), join(r2, W, tol)});
  }

  std::vector<std::pair<std::string, UnitaryOp>> unitaries;
  std::vector<UnitaryOp> ops;
  for (int k = 0; k < opts.unitaries; ++k) {
    Vector diag(d);
    const Complex alpha = std::polar(1.0, phase(rng));
    const Complex beta = std::polar(1.0, phase(rng));
    diag(0) = diag(1) = alpha;
    for (int i = 2; i < d; ++i) diag(i) = beta;
    UnitaryOp u(frame * diag.asDiagonal() * frame.adjoint());
    unitaries.emplace_back("U" + std::to_string(k), u);
    ops.push_back(u);
  }

  const SaturationResult sat = saturate(fragment, ops, d, 4 * fragment.size() + 8, tol);
  if (!sat.closed || sat.growth.back() != fragment.size() + 2)
    throw InternalError("generate_image_structure: generated fragment is not closed");

  std::vector<Subspace> elements{Subspace::bottom(d)};
  if (!opts.rays_only) elements.push_back(Subspace::top(d));
  for (const auto& f : fragment)
    if (!opts.rays_only || f.is_ray()) elements.push_back(f);
  const std::size_t distinct = elements.size();
  for (int k = 0; k < opts.duplicates; ++k)
    elements.push_back(elements[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(distinct) - 1))]);

  return make_image_structure(d, names, fragment, unitaries, elements, tol);
}

std::string to_string(FaultKind k) {
  switch (k) {
    case FaultKind::RemoveRelation:
      return "remove-relation";
    case FaultKind::AddRelation:
      return "add-relation";
    case FaultKind::RedirectProjector:
      return "redirect-projector";
  }
  return "unknown";
}

Mutant inject_fault(const ImageStructure& base, FaultKind kind, Rng& rng, const Tolerance& tol) {
  Mutant out{base.structure, kind, {}};
  FiniteStructure& s = out.structure;
  const auto& vals = base.element_values;
  const std::size_t M = s.size();
  const std::size_t n = s.fragment_size();

  auto pick = [&](const std::vector<std::pair<std::size_t, std::size_t>>& options) {
    if (options.empty()) throw PreconditionError("inject_fault: no position for a " + to_string(kind) + " fault");
    return options[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(options.size()) - 1))];
  };

  switch (kind) {
    case FaultKind::RemoveRelation: {
      // The element keeps its own value, so (<=) breaks on the way up.
      std::vector<std::pair<std::size_t, std::size_t>> options;
      for (std::size_t m = 0; m < M; ++m) {
        if (!s.find_value(vals[m], tol)) continue;
        for (std::size_t p = 0; p < n; ++p)
          if (s.holds(m, p) && !eq(vals[m], s.values[p], tol)) options.emplace_back(m, p);
      }
      auto [m, p] = pick(options);
      s.relation[m][p] = 0;
      out.description = "removed [" + s.domain[m] + " : " + s.symbols[p] + "]";
      break;
    }
    case FaultKind::AddRelation: {
      // A ray gains a property it is not inside: its meet with the ray is
      // bottom, which it does not verify.
      std::vector<std::pair<std::size_t, std::size_t>> options;
      for (std::size_t m = 0; m < M; ++m) {
        if (!vals[m].is_ray() || !s.find_value(vals[m], tol)) continue;
        for (std::size_t p = 0; p < n; ++p)
          if (!s.holds(m, p) && !s.values[p].is_bottom()) options.emplace_back(m, p);
      }
      auto [m, p] = pick(options);
      s.relation[m][p] = 1;
      out.description = "added [" + s.domain[m] + " : " + s.symbols[p] + "]";
      break;
    }
    case FaultKind::RedirectProjector: {
      std::vector<std::pair<std::size_t, std::size_t>> options;
      for (std::size_t q = 0; q < n; ++q) {
        if (!s.projectors[q]) continue;
        for (std::size_t m = 0; m < M; ++m) {
          if (!s.find_value(vals[m], tol)) continue;
          const Subspace target = sasaki_and(vals[m], s.values[q], tol);
          if (!s.find_value(target, tol)) continue;
          for (std::size_t w = 0; w < M; ++w)
            if (!leq(vals[w], target, tol)) {
              options.emplace_back(m, q);
              break;
            }
        }
      }
      auto [m, q] = pick(options);
      const Subspace target = sasaki_and(vals[m], s.values[q], tol);
      std::vector<std::size_t> wrong;
      for (std::size_t w = 0; w < M; ++w)
        if (!leq(vals[w], target, tol)) wrong.push_back(w);
      const std::size_t w = wrong[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(wrong.size()) - 1))];
      (*s.projectors[q])[m] = w;
      out.description = "proj[" + s.symbols[q] + "](" + s.domain[m] + ") redirected to " + s.domain[w];
      break;
    }
  }
  return out;
}

}  // namespace pqm
