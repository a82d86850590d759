// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all
// criteria pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracle_util.hpp"
#include "pqm/circuit.hpp"
#include "pqm/decider.hpp"
#include "pqm/oracles.hpp"
#include "pqm/sampling.hpp"
#include "pqm/structure.hpp"

using namespace pqm;
using namespace pqm::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void note(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    o.pass = false;
    if (o.detail.size() < 400) o.detail += (o.detail.empty() ? "" : "; ") + what;
  }
}

std::string count_violations(const SuiteReport& r) {
  std::string out;
  for (const auto& c : r.results)
    if (!c.ok()) out += c.name + "/" + c.model + "=" + std::to_string(c.violations) + " ";
  return out;
}

// ---------------------------------------------------------------------------

Outcome bell_example() {
  Outcome o;
  const auto t0 = Clock::now();
  const double s = 1.0 / std::sqrt(2.0);
  Matrix h = Matrix::Zero(4, 4);
  h(0, 0) = h(0, 2) = h(1, 1) = h(1, 3) = h(2, 0) = h(3, 1) = s;
  h(2, 2) = h(3, 3) = -s;
  Matrix cx = Matrix::Zero(4, 4);
  cx(0, 0) = cx(1, 1) = cx(2, 3) = cx(3, 2) = 1.0;
  Circuit prep(4);
  prep.project(span1(unit(4, 0))).apply(UnitaryOp(h)).apply(UnitaryOp(cx));
  const Subspace out = run_circuit(prep, {Subspace::top(4)}).value;
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = s;
  const double dist = principal_distance(out, span1(phi));
  note(o, out.rank() == 1 && dist < 1e-9, "preparation distance " + std::to_string(dist));

  Circuit full = prep;
  full.project(span1(unit(4, 2)));
  const Subspace last = run_circuit(full, {Subspace::top(4)}, Tolerance{1e-10, 1e-8}).value;
  note(o, last.is_bottom(), "extension has rank " + std::to_string(last.rank()));
  const double secs = seconds_since(t0);
  note(o, secs < 1.0, "runtime " + std::to_string(secs));
  o.detail = o.pass ? "distance " + std::to_string(dist) + ", final rank 0, " + std::to_string(secs) + " s" : o.detail;
  return o;
}

Outcome lattice_suite() {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t checks = 0, nontrivial_om = 0, adjunction_true = 0;
  for (int d = 2; d <= 5; ++d) {
    Rng rng(1000 + static_cast<std::uint64_t>(d));
    for (int i = 0; i < 1000; ++i) {
      const Subspace p = random_subspace(d, rng);
      const Subspace q = random_subspace(d, rng);
      const Subspace r = random_subspace(d, rng);
      const Subspace lo = random_subspace_within(q, rng);
      const bool om = eq(q, join(lo, meet(q, ortho(lo))));
      nontrivial_om += lo.rank() > 0 && lo.rank() < q.rank();
      note(o, om, "orthomodular d=" + std::to_string(d));
      note(o, eq(ortho(meet(p, q)), join(ortho(p), ortho(q))), "de morgan d=" + std::to_string(d));
      note(o, eq(sasaki_and(p, q), sasaki_and_lattice(p, q)), "sasaki image d=" + std::to_string(d));
      note(o, ref_eq(sasaki_and(p, q), span_of(Matrix(q.projector() * p.basis()))),
           "sasaki image oracle d=" + std::to_string(d));
      const Subspace x = (i % 2) ? random_subspace_within(sasaki_hook(p, r), rng) : random_subspace(d, rng);
      const bool lhs = leq(sasaki_and(x, r), p);
      note(o, lhs == leq(x, sasaki_hook(p, r)), "adjunction d=" + std::to_string(d));
      adjunction_true += lhs;
      auto [cp, cq] = (i % 2) ? random_compatible_pair(d, rng) : std::pair{p, q};
      note(o, compatible(cp, cq) == projectors_commute(cp, cq), "compatibility d=" + std::to_string(d));
      checks += 6;
    }
  }
  const double secs = seconds_since(t0);
  note(o, secs < 30.0, "runtime " + std::to_string(secs));
  note(o, nontrivial_om > 800 && adjunction_true > 1000,
       "too few nontrivial instances: " + std::to_string(nontrivial_om) + " orthomodular, " +
           std::to_string(adjunction_true) + " adjunction");
  if (o.pass)
    o.detail = std::to_string(checks) + " law checks, 0 violations, " + std::to_string(nontrivial_om) +
               " proper orthomodular splits, " + std::to_string(secs) + " s";
  return o;
}

Outcome axiom_suites() {
  Outcome o;
  std::size_t laws = 0;
  for (int d = 2; d <= 4; ++d) {
    const SuiteReport r = check_axiom_suite(d, 500, 7);
    note(o, r.passed(), "d=" + std::to_string(d) + " " + count_violations(r));
    for (const auto& c : r.results) {
      note(o, c.instances == 500, c.name + " instances");
      if (c.asserted) ++laws;
    }
  }
  // The unconditioned meet on deliberately incompatible pairs.
  std::size_t incompatible = 0, nontrivial = 0;
  for (int d = 3; d <= 4; ++d) {
    Rng rng(77 + static_cast<std::uint64_t>(d));
    for (int i = 0; i < 500; ++i) {
      Subspace p = random_subspace(d, uniform_int(rng, 1, d - 1), rng);
      Subspace q = random_subspace(d, uniform_int(rng, 1, d - 1), rng);
      if (compatible(p, q)) continue;
      ++incompatible;
      const Subspace pq = meet(p, q);
      for (bool ray_model : {false, true}) {
        Subspace x = (i % 2) ? random_subspace_within(pq, rng) : random_subspace(d, rng);
        if (ray_model) x = random_ray_within(x, rng);
        if (leq(x, p) && leq(x, q)) {
          ++nontrivial;
          note(o, leq(x, pq), "unconditioned meet d=" + std::to_string(d));
        }
      }
    }
  }
  note(o, incompatible >= 900 && nontrivial > 200, "too few incompatible instances");
  if (o.pass)
    o.detail = std::to_string(laws) + " law/model suites x 500, " + std::to_string(incompatible) +
               " incompatible meet instances, 0 violations";
  return o;
}

Outcome rule_suites() {
  Outcome o;
  for (int d = 2; d <= 4; ++d) {
    const SuiteReport r = check_rule_suite(d, 500, 11);
    note(o, r.passed(), "rules d=" + std::to_string(d) + " " + count_violations(r));
    for (const auto& c : r.results) note(o, c.nontrivial > 0, c.name + " vacuous");
  }
  const SuiteReport a = check_axioms_from_rules(3, 200, 13, 16);
  note(o, a.passed(), "axioms-from-rules " + count_violations(a));
  for (const auto& c : a.results) note(o, c.nontrivial > 0 && c.instances == 200, c.name + " vacuous");
  if (o.pass) o.detail = "R1-R6 x 500 at d=2,3,4 and 9 axioms x 200 via sampled semantics, 0 violations";
  return o;
}

Outcome decider_oracle() {
  Outcome o;
  Rng rng(2024);
  std::size_t trues = 0, found = 0;
  for (int i = 0; i < 200; ++i) {
    BasicSentence b;
    const int np = uniform_int(rng, 1, 3);
    const int nn = uniform_int(rng, 0, 3);
    for (int k = 0; k < np; ++k) b.positives.push_back(random_subspace(3, uniform_int(rng, 1, 3), rng));
    const Subspace m = meet_all(b.positives, 3);
    for (int k = 0; k < nn; ++k) {
      if (coin(rng, 0.3) && !m.is_bottom())
        b.negatives.push_back(join(random_subspace_within(m, rng), random_subspace(3, uniform_int(rng, 0, 1), rng)));
      else
        b.negatives.push_back(random_subspace(3, uniform_int(rng, 0, 2), rng));
    }
    const VdCrossCheck c = cross_check_vd(b, 3, 10000, static_cast<std::uint64_t>(i));
    note(o, c.consistent, "instance " + std::to_string(i));
    note(o, c.witness_replayed, "witness replay " + std::to_string(i));
    trues += c.decider_truth;
    found += c.satisfying_samples > 0;
  }
  if (o.pass)
    o.detail = "200 sentences, decider true on " + std::to_string(trues) + ", oracle found witnesses on " +
               std::to_string(found) + ", 0 disagreements";
  return o;
}

Outcome kappa_corpus() {
  Outcome o;
  Rng rng(31337);
  std::size_t min_frag = 1000, max_frag = 0, min_dom = 1000, max_dom = 0;
  const FaultKind kinds[] = {FaultKind::RemoveRelation, FaultKind::AddRelation, FaultKind::RedirectProjector};
  for (int i = 0; i < 10; ++i) {
    ImageStructureOptions opts;
    opts.dim = 3;
    opts.bases = 1 + i % 4;
    opts.duplicates = i % 3 == 0 ? 0 : 2 * i;
    opts.rays_only = i == 9;
    opts.unitaries = i % 2 + 1;
    const auto image = generate_image_structure(opts, rng);
    const auto& s = image.structure;
    min_frag = std::min(min_frag, s.fragment_size());
    max_frag = std::max(max_frag, s.fragment_size());
    min_dom = std::min(min_dom, s.size());
    max_dom = std::max(max_dom, s.size());
    const SuiteReport ax = check_structure_axioms(s);
    note(o, ax.passed() && ax.total_violations() == 0, "image " + std::to_string(i) + " axioms " + count_violations(ax));
    const SuiteReport mo = check_strong_morphism(s);
    note(o, mo.passed(), "image " + std::to_string(i) + " morphism " + count_violations(mo));
    for (const char* cond : {"relation", "projector", "unitary", "nontrivial-image"}) {
      const auto* c = mo.find(cond);
      note(o, c && c->violations == 0, std::string("image ") + std::to_string(i) + " " + cond);
    }
    for (std::size_t m = 0; m < s.size(); ++m) {
      const KappaResult k = kappa_of(s, m);
      note(o, k.has_least() && eq(k.meet, image.element_values[m]), "kappa not identity");
    }

    const Mutant mutant = inject_fault(image, kinds[i % 3], rng);
    const Characterization c = check_characterization(mutant.structure);
    note(o, !c.axioms_pass && !c.morphism_pass,
         "mutant " + std::to_string(i) + " (" + mutant.description + ") axioms_pass=" +
             std::to_string(c.axioms_pass) + " morphism_pass=" + std::to_string(c.morphism_pass));
  }
  note(o, min_frag >= 6 && max_frag <= 20, "fragment sizes " + std::to_string(min_frag) + ".." + std::to_string(max_frag));
  note(o, min_dom >= 6 && max_dom <= 40, "domain sizes " + std::to_string(min_dom) + ".." + std::to_string(max_dom));
  if (o.pass)
    o.detail = "10 models (fragments " + std::to_string(min_frag) + "-" + std::to_string(max_frag) + ", domains " +
               std::to_string(min_dom) + "-" + std::to_string(max_dom) + ") and 10 mutants classified";
  return o;
}

Outcome appendix_oracles() {
  Outcome o;
  const auto t0 = Clock::now();
  note(o, steps_to_one(0.5) == 3, "steps_to_one(0.5)");
  const auto chain = step_chain(0.5);
  const double expected[] = {0.5, 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(2.0), 1.0};
  note(o, chain.size() == 4, "chain length");
  for (std::size_t k = 0; k < std::min<std::size_t>(4, chain.size()); ++k)
    note(o, std::abs(chain[k] - expected[k]) < 1e-12, "chain entry " + std::to_string(k));

  std::size_t grid = 0, on = 0;
  for (double a : {0.3, 0.6, 0.9}) {
    for (int i = 1; i <= 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double s = i / 25.0;
        const double t = 2 * M_PI * j / 50.0;
        const auto w = ellipse_witness(a, s * a * std::cos(t), s * f_step(a) * std::sin(t), 3, 1e-9);
        note(o, w.consistent(), "ellipse a=" + std::to_string(a) + " i=" + std::to_string(i));
        ++grid;
        on += w.on_ellipse;
      }
    }
  }
  note(o, on == 150, "on-ellipse grid points " + std::to_string(on));
  // The plain Cartesian grid, which mostly misses the ellipse.
  for (double a : {0.3, 0.6, 0.9}) {
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double x = -1.5 + 3.0 * i / 49.0;
        const double y = -1.5 + 3.0 * j / 49.0;
        const auto w = ellipse_witness(a, x, y, 3, 1e-9);
        note(o, w.consistent(), "cartesian ellipse a=" + std::to_string(a));
        ++grid;
      }
    }
  }

  std::size_t pairs = 0;
  for (int d = 3; d <= 4; ++d) {
    Rng rng(555 + static_cast<std::uint64_t>(d));
    int done = 0;
    while (done < 100) {
      const Subspace p = random_subspace(d, uniform_int(rng, 1, d - 1), rng);
      const Subspace q = random_subspace(d, uniform_int(rng, 1, d - 1), rng);
      if (compatible(p, q)) continue;
      ++done;
      ++pairs;
      note(o, incompat_decompose(p, q).ok(), "incompat d=" + std::to_string(d));
    }
  }
  const double secs = seconds_since(t0);
  note(o, secs < 10.0, "runtime " + std::to_string(secs));
  if (o.pass)
    o.detail = "chain exact, " + std::to_string(grid) + " ellipse points, " + std::to_string(pairs) +
               " incompatible pairs, " + std::to_string(secs) + " s";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"bell-example", bell_example},     {"lattice-sasaki-suite", lattice_suite},
      {"axiom-suites", axiom_suites},     {"rule-suites", rule_suites},
      {"decider-oracle", decider_oracle}, {"kappa-characterization", kappa_corpus},
      {"appendix-oracles", appendix_oracles},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("%s %-24s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
