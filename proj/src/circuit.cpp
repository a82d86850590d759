#include "pqm/circuit.hpp"

#include <functional>
#include <utility>

#include "pqm/sampling.hpp"

namespace pqm {

namespace {

int step_dim(const Step& s) {
  return std::visit(
      [](const auto& st) {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, ProjectOnto>)
          return st.target.dim();
        else
          return st.op.dim();
      },
      s);
}

}  // namespace

Circuit::Circuit(int dim, std::vector<Step> steps) : dim_(dim) {
  for (auto& s : steps) append(std::move(s));
}

Circuit& Circuit::append(Step s) {
  const int d = step_dim(s);
  if (d != dim_) throw DimensionMismatch(dim_, d, "Circuit");
  steps_.push_back(std::move(s));
  return *this;
}

Circuit& Circuit::project(Subspace q, std::string label) {
  return append(ProjectOnto{std::move(q), std::move(label)});
}

Circuit& Circuit::apply(UnitaryOp u, std::string label) {
  return append(ApplyUnitary{std::move(u), std::move(label)});
}

Circuit Circuit::then(const Circuit& next) const {
  if (next.dim_ != dim_) throw DimensionMismatch(dim_, next.dim_, "Circuit::then");
  Circuit out = *this;
  for (const auto& s : next.steps_) out.steps_.push_back(s);
  return out;
}

namespace {

Subspace step_apply(const Step& s, const Subspace& m, const Tolerance& tol) {
  if (const auto* p = std::get_if<ProjectOnto>(&s)) return sasaki_and(m, p->target, tol);
  return apply_unitary(std::get<ApplyUnitary>(s).op, m, tol);
}

void check_input(const Circuit& c, const SystemState& input) {
  if (input.value.dim() != c.dim()) throw DimensionMismatch(c.dim(), input.value.dim(), "run_circuit");
}

}  // namespace

SystemState run_circuit(const Circuit& c, const SystemState& input, const Tolerance& tol) {
  check_input(c, input);
  Subspace m = input.value;
  for (const auto& s : c.steps()) {
    if (m.is_bottom()) break;
    m = step_apply(s, m, tol);
  }
  return {m};
}

std::vector<SystemState> run_circuit_traced(const Circuit& c, const SystemState& input, const Tolerance& tol) {
  check_input(c, input);
  std::vector<SystemState> trace{input};
  for (const auto& s : c.steps()) trace.push_back({step_apply(s, trace.back().value, tol)});
  return trace;
}

bool is_impossible(const Circuit& c, const SystemState& input, const Tolerance& tol) {
  return run_circuit(c, input, tol).value.is_bottom();
}

namespace {

// Rays phi <= p^perp used by the definitional form of verification: the
// basis vectors of p^perp, then `count` random rays inside it.
std::vector<Subspace> test_rays(const Subspace& p, std::size_t count, Rng& rng) {
  const Subspace perp = ortho(p);
  std::vector<Subspace> rays;
  if (perp.is_bottom()) return rays;
  for (int k = 0; k < perp.rank(); ++k) rays.push_back(Subspace::from_orthonormal(perp.basis().col(k)));
  for (std::size_t i = 0; i < count; ++i) rays.push_back(random_ray_within(perp, rng));
  return rays;
}

// [t(x) : p] where t is the circuit `prefix`, judged only through
// impossibility of prefix followed by a projection onto each test ray.
bool verifies_by_rules(const Circuit& prefix, const SystemState& x, const Subspace& p, std::size_t count, Rng& rng,
                       const Tolerance& tol) {
  for (const auto& phi : test_rays(p, count, rng)) {
    Circuit probe = prefix;
    probe.project(phi);
    if (!is_impossible(probe, x, tol)) return false;
  }
  return true;
}

}  // namespace

bool verifies(const SystemState& s, const Subspace& p, VerifyMode mode, const Tolerance& tol) {
  require_same_dim(s.value, p, "verifies");
  if (mode.kind == VerifyMode::Kind::Exact) return leq(s.value, p, tol);
  Rng rng(mode.seed);
  return verifies_by_rules(Circuit(p.dim()), s, p, mode.count, rng, tol);
}

Circuit circuit_from_document(const CircuitDocument& doc) {
  Circuit c(doc.defs.dim);
  for (const auto& ref : doc.steps) {
    if (ref.kind == CircuitStepRef::Kind::Project)
      c.project(doc.defs.subspace(ref.symbol), "proj[" + ref.symbol + "]");
    else
      c.apply(doc.defs.unitary(ref.symbol), ref.symbol);
  }
  return c;
}

SystemState input_from_document(const CircuitDocument& doc) { return {doc.defs.subspace(doc.input)}; }

Circuit circuit_of_term(const Term& t, const Definitions& defs) {
  std::vector<const Term*> chain;
  for (const Term* cur = &t; cur->kind != Term::Kind::Var; cur = cur->arg.get()) chain.push_back(cur);
  Circuit c(defs.dim);
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const Term& step = **it;
    if (step.kind == Term::Kind::Proj)
      c.project(defs.subspace(step.name), "proj[" + step.name + "]");
    else
      c.apply(defs.unitary(step.name), step.name);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Rule suite

namespace {

// Random input: mostly random subspaces, sometimes bottom, sometimes inside
// `bias` so that impossibility hypotheses hold.
Subspace random_input(int dim, const Subspace& bias, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u < 0.05) return Subspace::bottom(dim);
  if (u < 0.5) return random_subspace_within(bias, rng);
  return random_subspace(dim, rng);
}

struct RuleRunner {
  int dim;
  std::size_t samples;
  Rng rng;
  SuiteReport& report;

  // `inst` returns {hypothesis, conclusion} for a given input s; it is run on
  // the random input and on top.
  using Instance = std::function<std::pair<bool, bool>(const Subspace& s)>;

  void run(const std::string& name, const std::function<std::pair<Subspace, Instance>(Rng&)>& make) {
    CheckResult r;
    r.name = name;
    r.group = "rules";
    r.model = "circuit";
    for (std::size_t i = 0; i < samples; ++i) {
      auto [bias, inst] = make(rng);
      const Subspace inputs[] = {random_input(dim, bias, rng), Subspace::top(dim)};
      for (const auto& s : inputs) {
        auto [hyp, concl] = inst(s);
        ++r.instances;
        if (!hyp) continue;
        ++r.nontrivial;
        if (!concl) r.record_violation("instance " + std::to_string(i) + " input rank " + std::to_string(s.rank()));
      }
    }
    report.results.push_back(std::move(r));
  }
};

}  // namespace

SuiteReport check_rule_suite(int dim, std::size_t samples, std::uint64_t seed, const Tolerance& tol) {
  if (dim < 2) throw PreconditionError("check_rule_suite: dimension must be at least 2");
  SuiteReport report;
  report.suite = "rules";
  report.dim = dim;
  report.seed = seed;
  report.samples = samples;
  RuleRunner run{dim, samples, Rng(seed), report};
  auto imp = [&](const Circuit& c, const Subspace& s) { return is_impossible(c, {s}, tol); };
  using Instance = RuleRunner::Instance;

  run.run("R1", [&](Rng& g) {
    Subspace p = random_subspace(dim, g);
    Subspace q = random_subspace_within(ortho(p), g);
    Circuit c(dim);
    c.project(p).project(q);
    return std::make_pair(Subspace::top(dim), Instance([=](const Subspace& s) {
                            return std::make_pair(true, imp(c, s));
                          }));
  });

  run.run("R2", [&](Rng& g) {
    Subspace p = random_subspace(dim, g);
    Subspace q = random_subspace_within(p, g);
    Circuit lhs(dim), rhs(dim);
    lhs.project(p).project(q);
    rhs.project(q);
    return std::make_pair(ortho(q), Instance([=](const Subspace& s) {
                            return std::make_pair(true, imp(lhs, s) == imp(rhs, s));
                          }));
  });

  run.run("R3", [&](Rng& g) {
    Subspace p = random_subspace(dim, g);
    Subspace q = random_subspace_within(p, g);
    Subspace r = random_subspace(dim, g);
    Circuit lhs(dim), rhs(dim);
    lhs.project(p).project(q).project(r);
    rhs.project(q).project(r);
    return std::make_pair(sasaki_hook(ortho(r), q, tol), Instance([=](const Subspace& s) {
                            return std::make_pair(true, imp(lhs, s) == imp(rhs, s));
                          }));
  });

  run.run("R4", [&](Rng& g) {
    Subspace p = random_subspace(dim, g);
    UnitaryOp u = coin(g, 0.1) ? UnitaryOp::identity(dim) : random_unitary(dim, g);
    Circuit lhs(dim), rhs(dim);
    lhs.project(p);
    rhs.apply(u).project(apply_unitary(u, p, tol));
    return std::make_pair(ortho(p), Instance([=](const Subspace& s) {
                            return std::make_pair(true, imp(lhs, s) == imp(rhs, s));
                          }));
  });

  run.run("R5", [&](Rng& g) {
    UnitaryOp u = coin(g, 0.1) ? UnitaryOp::identity(dim) : random_unitary(dim, g);
    Circuit lhs(dim), rhs(dim);
    rhs.apply(u);
    return std::make_pair(Subspace::bottom(dim), Instance([=](const Subspace& s) {
                            return std::make_pair(true, imp(lhs, s) == imp(rhs, s));
                          }));
  });

  run.run("R6", [&](Rng& g) {
    Subspace psi1 = random_ray(dim, g);
    Subspace psi2 = random_ray_within(ortho(psi1), g);
    Circuit c1(dim), c2(dim), c12(dim);
    c1.project(psi1);
    c2.project(psi2);
    c12.project(join(psi1, psi2, tol));
    return std::make_pair(ortho(join(psi1, psi2, tol)), Instance([=](const Subspace& s) {
                            return std::make_pair(imp(c1, s) && imp(c2, s), imp(c12, s));
                          }));
  });

  return report;
}

// ---------------------------------------------------------------------------
// Axioms through the definitional semantics

SuiteReport check_axioms_from_rules(int dim, std::size_t samples, std::uint64_t seed, std::size_t rays,
                                    const Tolerance& tol) {
  if (dim < 2) throw PreconditionError("check_axioms_from_rules: dimension must be at least 2");
  SuiteReport report;
  report.suite = "axioms-from-rules";
  report.dim = dim;
  report.seed = seed;
  report.samples = samples;
  Rng rng(seed);
  const Circuit id(dim);

  auto ver = [&](const Circuit& t, const Subspace& x, const Subspace& p) {
    return verifies_by_rules(t, {x}, p, rays, rng, tol);
  };
  auto proj = [&](const Subspace& q) {
    Circuit c(dim);
    c.project(q);
    return c;
  };
  auto biased = [&](const Subspace& target) {
    return coin(rng) ? random_subspace_within(target, rng) : random_subspace(dim, rng);
  };
  auto law = [&](const std::string& name, const std::function<std::pair<bool, bool>()>& inst) {
    CheckResult r;
    r.name = name;
    r.group = "base";
    r.model = "circuit";
    for (std::size_t i = 0; i < samples; ++i) {
      auto [hyp, concl] = inst();
      ++r.instances;
      if (!hyp) continue;
      ++r.nontrivial;
      if (!concl) r.record_violation("instance " + std::to_string(i));
    }
    report.results.push_back(std::move(r));
  };

  {
    CheckResult r;
    r.name = "neg-bot";
    r.group = "base";
    r.model = "circuit";
    for (std::size_t i = 0; i < samples; ++i) {
      ++r.instances;
      if (!ver(id, random_subspace(dim, rng), Subspace::bottom(dim))) ++r.nontrivial;
    }
    if (r.nontrivial == 0) r.record_violation("no sampled system fails to verify bottom");
    report.results.push_back(std::move(r));
  }

  law("top", [&] { return std::make_pair(true, ver(id, random_subspace(dim, rng), Subspace::top(dim))); });

  law("leq", [&] {
    Subspace p = random_subspace(dim, rng);
    Subspace q = join(p, random_subspace(dim, rng), tol);
    Subspace x = biased(p);
    return std::make_pair(ver(id, x, p), ver(id, x, q));
  });

  law("meet-compatible", [&] {
    auto [p, q] = random_compatible_pair(dim, rng);
    Subspace pq = meet(p, q, tol);
    Subspace x = biased(pq);
    return std::make_pair(ver(id, x, p) && ver(id, x, q), ver(id, x, pq));
  });

  law("proj-intro", [&] {
    Subspace p = random_subspace(dim, rng);
    Subspace q = random_subspace(dim, rng);
    Subspace x = biased(p);
    return std::make_pair(ver(id, x, p), ver(proj(q), x, sasaki_and(p, q, tol)));
  });

  law("proj-compose", [&] {
    Subspace q = random_subspace(dim, rng);
    Subspace p = random_subspace_within(q, rng);
    Subspace x = biased(sasaki_hook(ortho(p), q, tol));
    Circuit qp(dim);
    qp.project(q).project(p);
    const Subspace bot = Subspace::bottom(dim);
    return std::make_pair(ver(qp, x, bot), ver(proj(p), x, bot));
  });

  law("proj-bot", [&] {
    Subspace q = random_subspace(dim, rng);
    Subspace x = biased(ortho(q));
    return std::make_pair(ver(proj(q), x, Subspace::bottom(dim)), ver(id, x, ortho(q)));
  });

  law("unitary-intro", [&] {
    UnitaryOp u = coin(rng, 0.1) ? UnitaryOp::identity(dim) : random_unitary(dim, rng);
    Subspace p = random_subspace(dim, rng);
    Subspace x = biased(p);
    Circuit cu(dim);
    cu.apply(u);
    return std::make_pair(ver(id, x, p), ver(cu, x, apply_unitary(u, p, tol)));
  });

  law("unitary-elim", [&] {
    UnitaryOp u = coin(rng, 0.1) ? UnitaryOp::identity(dim) : random_unitary(dim, rng);
    Subspace p = random_subspace(dim, rng);
    Subspace pre = apply_unitary(u.inverse(), p, tol);
    Subspace x = biased(pre);
    Circuit cu(dim);
    cu.apply(u);
    return std::make_pair(ver(cu, x, p), ver(id, x, pre));
  });

  return report;
}

}  // namespace pqm
