// pqm: command-line front end. Results go to standard output, diagnostics to
// standard error. Exit codes: 0 true/pass, 1 false/fail, 2 usage or input
// error, 3 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pqm/circuit.hpp"
#include "pqm/decider.hpp"
#include "pqm/language.hpp"
#include "pqm/normalizer.hpp"
#include "pqm/oracles.hpp"
#include "pqm/serialize.hpp"
#include "pqm/structure.hpp"

namespace {

using namespace pqm;

enum Exit { kTrue = 0, kFalse = 1, kUsage = 2, kInternal = 3 };

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t samples = 500;
  std::string emit = "text";
  bool trace = false;
  bool emit_normal_form = false;
  int dim = 0;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool json_output(const RunConfig& cfg) { return cfg.emit == "json"; }

void print_json(const Json& body) { std::cout << document(body).dump(2) << "\n"; }

void collect_atoms(const Formula& f, std::vector<const Formula*>& out) {
  if (f.kind == Formula::Kind::Atom) {
    out.push_back(&f);
    return;
  }
  if (f.lhs) collect_atoms(*f.lhs, out);
  if (f.rhs) collect_atoms(*f.rhs, out);
}

// ---------------------------------------------------------------------------

int cmd_decide(const std::string& path, const RunConfig& cfg) {
  Problem problem = parse_problem(read_file(path));
  if (cfg.dim && cfg.dim != problem.defs.dim)
    throw UsageError("--dim " + std::to_string(cfg.dim) + " does not match the file dimension " +
                     std::to_string(problem.defs.dim));
  for (const auto& d : validate(problem)) {
    std::cerr << path << ": " << to_string(d.severity) << ": " << d.message << "\n";
    if (d.severity == Diagnostic::Severity::Error) return kUsage;
  }
  const int dim = problem.defs.dim;
  BoolComboPtr combo = normalize(*problem.sentence, problem.defs);
  Verdict v = evaluate(*combo, dim, cfg.seed);

  std::vector<const Formula*> atoms;
  collect_atoms(*problem.sentence, atoms);
  const Subspace top = Subspace::top(dim);

  if (json_output(cfg)) {
    Json body{{"command", "decide"}, {"dim", dim}, {"verdict", to_json(v, cfg.trace)}};
    if (cfg.trace) {
      Json js = Json::array();
      for (const Formula* a : atoms) {
        const Circuit c = circuit_of_term(*a->term, problem.defs);
        js.push_back({{"atom", pretty_print(*a)},
                      {"reduced", to_json(reduce_atom(*a->term, problem.defs.subspace(a->symbol), problem.defs).property)},
                      {"term_on_top", to_json(run_circuit(c, {top}).value)},
                      {"steps", trace_json(c, run_circuit_traced(c, {top}))}});
      }
      body["atoms"] = js;
    }
    if (cfg.emit_normal_form) body["normal_form"] = to_json(*combo);
    print_json(body);
  } else {
    std::cout << (v.truth ? "true" : "false") << "\n";
    if (v.witness) std::cout << "witness: " << to_text(*v.witness) << "\n";
    if (cfg.trace) {
      for (const auto& t : v.leaves) {
        std::cout << "leaf " << t.index << ": " << (t.truth ? "true" : "false") << "  positives=" << t.positives
                  << " negatives=" << t.negatives << "  p_inf = " << to_text(t.p_inf);
        if (!t.failing_negatives.empty()) {
          std::cout << "  contained in negative";
          for (auto j : t.failing_negatives) std::cout << " " << j;
        }
        std::cout << "\n";
      }
      for (const Formula* a : atoms) {
        const Circuit c = circuit_of_term(*a->term, problem.defs);
        std::cout << "atom " << pretty_print(*a) << ": term on top = " << to_text(run_circuit(c, {top}).value)
                  << ", reduced property = "
                  << to_text(reduce_atom(*a->term, problem.defs.subspace(a->symbol), problem.defs).property) << "\n";
      }
    }
    if (cfg.emit_normal_form) {
      Problem nf = to_problem(*combo, dim);
      std::cout << "normal form: " << pretty_print(*nf.sentence) << "\n";
      for (const auto& [name, value] : nf.defs.subspaces)
        if (name != "top" && name != "bot") std::cout << "  " << name << " = " << to_text(value) << "\n";
    }
  }
  return v.truth ? kTrue : kFalse;
}

int cmd_circuit(const std::string& path, const RunConfig& cfg) {
  CircuitDocument doc = parse_circuit_document(read_file(path));
  const Circuit c = circuit_from_document(doc);
  const auto trace = run_circuit_traced(c, input_from_document(doc));
  const Subspace& final_value = trace.back().value;
  const bool imp = final_value.is_bottom();
  if (json_output(cfg)) {
    print_json({{"command", "circuit"},
                {"dim", doc.defs.dim},
                {"final", to_json(final_value)},
                {"impossible", imp},
                {"trace", trace_json(c, trace)}});
  } else {
    std::cout << "final: " << to_text(final_value) << "\n";
    std::cout << "impossible: " << (imp ? "true" : "false") << "\n";
    const Json steps = trace_json(c, trace);
    for (std::size_t i = 0; i < trace.size(); ++i)
      std::cout << "  " << steps[i]["step"].get<std::string>() << " -> " << to_text(trace[i].value) << "\n";
  }
  return imp ? kTrue : kFalse;
}

int emit_reports(const std::vector<SuiteReport>& reports, const std::string& command, const RunConfig& cfg) {
  bool passed = true;
  for (const auto& r : reports) passed = passed && r.passed();
  if (json_output(cfg)) {
    Json rs = Json::array();
    for (const auto& r : reports) rs.push_back(to_json(r));
    print_json({{"command", command}, {"passed", passed}, {"reports", rs}});
  } else {
    for (const auto& r : reports) std::cout << to_text(r);
  }
  return passed ? kTrue : kFalse;
}

int cmd_check_axioms(const RunConfig& cfg) {
  const int dim = cfg.dim ? cfg.dim : 3;
  if (dim < 2) throw UsageError("--dim must be at least 2");
  return emit_reports({check_axiom_suite(dim, cfg.samples, cfg.seed)}, "check-axioms", cfg);
}

int cmd_check_rules(const RunConfig& cfg, std::size_t rays) {
  const int dim = cfg.dim ? cfg.dim : 3;
  if (dim < 2) throw UsageError("--dim must be at least 2");
  return emit_reports({check_rule_suite(dim, cfg.samples, cfg.seed),
                       check_axioms_from_rules(dim, cfg.samples, cfg.seed, rays)},
                      "check-rules", cfg);
}

FiniteStructure read_structure(const std::string& path) { return load_structure(read_file(path)); }

int cmd_model_check(const std::string& path, const RunConfig& cfg) {
  const FiniteStructure s = read_structure(path);
  const Characterization c = check_characterization(s);
  const std::string status = c.status();
  if (json_output(cfg)) {
    Json body{{"command", "model-check"}, {"result", to_json(c)}};
    if (cfg.trace) {
      Json filters = Json::array();
      for (std::size_t m = 0; m < s.size(); ++m) filters.push_back(to_json(filter_of(s, m), s));
      body["filters"] = filters;
    }
    print_json(body);
  } else {
    std::cout << to_text(c.axioms) << to_text(c.morphism);
    if (cfg.trace) {
      for (std::size_t m = 0; m < s.size(); ++m) {
        const FilterReport f = filter_of(s, m);
        std::cout << "filter " << s.domain[m] << ":";
        for (auto p : f.members) std::cout << " " << s.symbols[p];
        std::cout << (f.ok() ? "" : "  (closure violations)") << "\n";
      }
    }
    std::cout << "model: " << (c.axioms_pass ? "yes" : "no") << "\n";
    std::cout << "strong morphism: " << (c.morphism_pass ? "yes" : "no") << "\n";
    std::cout << "characterization: " << status << "\n";
  }
  if (status == "bug") {
    std::cerr << path << ": axiom check and morphism check disagree without skipped instances\n";
    return kInternal;
  }
  return c.axioms_pass && c.agree() ? kTrue : kFalse;
}

int cmd_kappa(const std::string& path, const std::string& element, const RunConfig& cfg) {
  const FiniteStructure s = read_structure(path);
  std::vector<std::size_t> which;
  if (!element.empty()) {
    auto m = s.element_index(element);
    if (!m) throw UsageError("unknown element '" + element + "'");
    which.push_back(*m);
  } else {
    for (std::size_t m = 0; m < s.size(); ++m) which.push_back(m);
  }
  const SuiteReport morphism = check_strong_morphism(s);
  if (json_output(cfg)) {
    Json ks = Json::object();
    for (auto m : which) ks[s.domain[m]] = to_json(kappa_of(s, m), s);
    print_json({{"command", "kappa"}, {"kappa", ks}, {"morphism", to_json(morphism)}});
  } else {
    for (auto m : which) {
      const KappaResult k = kappa_of(s, m);
      std::cout << s.domain[m] << ": ";
      if (k.least) {
        std::cout << s.symbols[*k.least] << " = " << to_text(k.meet) << "\n";
      } else {
        std::cout << "no least element";
        if (k.minimal_pair)
          std::cout << " (minimal " << s.symbols[k.minimal_pair->first] << ", " << s.symbols[k.minimal_pair->second]
                    << ")";
        std::cout << "\n";
      }
    }
    std::cout << to_text(morphism);
  }
  return morphism.passed() ? kTrue : kFalse;
}

int cmd_oracle_f_steps(double a, const RunConfig& cfg) {
  const auto chain = step_chain(a);
  const int steps = static_cast<int>(chain.size()) - 1;
  const EllipseChain construction = ellipse_chain(a, cfg.dim ? cfg.dim : 3);
  if (json_output(cfg)) {
    print_json({{"command", "oracle f-steps"},
                {"a", a},
                {"steps", steps},
                {"chain", chain},
                {"construction", to_json(construction)}});
  } else {
    std::cout << "steps: " << steps << "\n";
    std::cout << "chain:";
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (chain.size() > 12 && i == 5) {
        std::cout << " ...";
        i = chain.size() - 3;
      }
      std::cout << " " << std::setprecision(15) << chain[i];
    }
    std::cout << "\n";
    std::cout << "construction rounds: " << construction.rounds.size()
              << (construction.ok() ? " (all compatible, reaches bot)" : " (check failed)") << "\n";
  }
  if (!construction.ok() || static_cast<int>(construction.rounds.size()) != steps) {
    std::cerr << "ellipse construction disagrees with the step count\n";
    return kInternal;
  }
  return kTrue;
}

int cmd_oracle_ellipse(double a, double x, double y, const RunConfig& cfg) {
  const EllipseWitness w = ellipse_witness(a, x, y, cfg.dim ? cfg.dim : 3);
  if (json_output(cfg)) {
    print_json({{"command", "oracle ellipse"}, {"witness", to_json(w)}});
  } else {
    std::cout << "residual: " << std::setprecision(12) << w.ellipse_residual << "\n";
    std::cout << "<v+|v->: " << std::abs(w.v_plus_dot_v_minus) << "\n";
    std::cout << "on ellipse: " << (w.on_ellipse ? "true" : "false") << "\n";
    std::cout << "orthogonal: " << (w.orthogonal ? "true" : "false") << "\n";
  }
  if (!w.consistent()) {
    std::cerr << "orthogonality and ellipse residual disagree\n";
    return kInternal;
  }
  return w.orthogonal ? kTrue : kFalse;
}

int cmd_oracle_incompat(const std::string& path, const std::string& p, const std::string& q, const RunConfig& cfg) {
  const std::string text = read_file(path);
  Subspace P = Subspace::bottom(1), Q = Subspace::bottom(1);
  auto lookup = [](auto&& find, const std::string& name) {
    auto v = find(name);
    if (!v) throw UsageError("unknown subspace symbol '" + name + "'");
    return *v;
  };
  if (std::filesystem::path(path).extension() == ".json") {
    const FiniteStructure s = load_structure(text);
    auto find = [&](const std::string& n) -> std::optional<Subspace> {
      auto i = s.symbol_index(n);
      if (!i) return std::nullopt;
      return s.values[*i];
    };
    P = lookup(find, p);
    Q = lookup(find, q);
  } else {
    const Definitions defs = parse_definitions(text);
    auto find = [&](const std::string& n) -> std::optional<Subspace> {
      auto it = defs.subspaces.find(n);
      if (it == defs.subspaces.end()) return std::nullopt;
      return it->second;
    };
    P = lookup(find, p);
    Q = lookup(find, q);
  }
  const IncompatDecomposition d = incompat_decompose(P, Q);
  if (json_output(cfg)) {
    print_json({{"command", "oracle incompat"}, {"decomposition", to_json(d)}});
  } else {
    std::cout << "lambda: " << std::setprecision(12) << d.lambda << "\n";
    std::cout << "C: " << to_text(d.C) << "\n";
    std::cout << "postconditions: " << (d.ok() ? "pass" : "FAIL") << "\n";
  }
  return d.ok() ? kTrue : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision procedure and model toolkit for possibilistic quantum mechanics"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Random seed (default 0)");
    sub->add_option("--samples", cfg.samples, "Random instances per check (default 500)")->check(CLI::PositiveNumber);
    sub->add_option("--emit", cfg.emit, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_flag("--trace", cfg.trace, "Include per-step or per-leaf traces");
  };

  std::string file, element, p_symbol, q_symbol;
  double a = 0, x = 0, y = 0;
  std::size_t rays = 16;
  std::function<int()> run;

  auto* decide = app.add_subcommand("decide", "Decide the sentence asserted in a problem file");
  decide->add_option("file", file, "Problem file")->required();
  decide->add_flag("--emit-normal-form", cfg.emit_normal_form, "Print the boolean combination of basic sentences");
  decide->add_option("--dim", cfg.dim, "Expected dimension");
  add_common(decide);
  decide->callback([&] { run = [&] { return cmd_decide(file, cfg); }; });

  auto* circuit = app.add_subcommand("circuit", "Run a circuit file on its input");
  circuit->add_option("file", file, "Circuit file")->required();
  add_common(circuit);
  circuit->callback([&] { run = [&] { return cmd_circuit(file, cfg); }; });

  auto* axioms = app.add_subcommand("check-axioms", "Check both axiom sets in the subspace and ray models");
  axioms->add_option("--dim", cfg.dim, "Dimension (default 3)");
  add_common(axioms);
  axioms->callback([&] { run = [&] { return cmd_check_axioms(cfg); }; });

  auto* rules = app.add_subcommand("check-rules", "Check the circuit rules and the axioms through them");
  rules->add_option("--dim", cfg.dim, "Dimension (default 3)");
  rules->add_option("--rays", rays, "Sampled rays per verification statement (default 16)");
  add_common(rules);
  rules->callback([&] { run = [&] { return cmd_check_rules(cfg, rays); }; });

  auto* model = app.add_subcommand("model-check", "Check a finite structure against the axioms and kappa");
  model->add_option("file", file, "Structure JSON file")->required();
  add_common(model);
  model->callback([&] { run = [&] { return cmd_model_check(file, cfg); }; });

  auto* kappa = app.add_subcommand("kappa", "Least filter members and the strong-morphism conditions");
  kappa->add_option("file", file, "Structure JSON file")->required();
  kappa->add_option("--element", element, "Only this element");
  add_common(kappa);
  kappa->callback([&] { run = [&] { return cmd_kappa(file, element, cfg); }; });

  auto* oracle = app.add_subcommand("oracle", "Geometric constructions behind the completeness proof");
  oracle->require_subcommand(1);
  auto* fsteps = oracle->add_subcommand("f-steps", "Iterates of x / sqrt(1 - x^2) from a up to 1");
  fsteps->add_option("a", a, "Start value in (0, 1]")->required();
  fsteps->add_option("--dim", cfg.dim, "Ambient dimension of the construction (default 3)");
  add_common(fsteps);
  fsteps->callback([&] { run = [&] { return cmd_oracle_f_steps(a, cfg); }; });
  auto* ellipse = oracle->add_subcommand("ellipse", "Orthogonality test against the ellipse equation");
  ellipse->add_option("a", a, "Parameter in (0, 1)")->required();
  ellipse->add_option("x", x, "x coordinate of w")->required();
  ellipse->add_option("y", y, "y coordinate of w")->required();
  ellipse->add_option("--dim", cfg.dim, "Ambient dimension (default 3)");
  add_common(ellipse);
  ellipse->callback([&] { run = [&] { return cmd_oracle_ellipse(a, x, y, cfg); }; });
  auto* incompat = oracle->add_subcommand("incompat", "Decompose an incompatible pair through a common plane");
  incompat->add_option("file", file, "Problem file (.pqm) or structure file (.json)")->required();
  incompat->add_option("--p", p_symbol, "First subspace symbol")->required();
  incompat->add_option("--q", q_symbol, "Second subspace symbol")->required();
  add_common(incompat);
  incompat->callback([&] { run = [&] { return cmd_oracle_incompat(file, p_symbol, q_symbol, cfg); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kTrue : kUsage;
  }

  try {
    return run();
  } catch (const ParseError& e) {
    std::cerr << file << ":" << e.what() << "\n";
    return kUsage;
  } catch (const StructureError& e) {
    std::cerr << file << ": " << e.what() << "\n";
    return kUsage;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
