#include "pqm/decider.hpp"

#include <functional>
#include <string>

#include "pqm/sampling.hpp"

namespace pqm {

bool satisfies(const Subspace& x, const BasicSentence& b, const Tolerance& tol) {
  for (const auto& p : b.positives)
    if (!leq(x, p, tol)) return false;
  for (const auto& q : b.negatives)
    if (leq(x, q, tol)) return false;
  return true;
}

namespace {

void check_dims(const BasicSentence& b, int dim) {
  for (const auto& p : b.positives)
    if (p.dim() != dim) throw DimensionMismatch(dim, p.dim(), "decide_basic");
  for (const auto& q : b.negatives)
    if (q.dim() != dim) throw DimensionMismatch(dim, q.dim(), "decide_basic");
}

LeafTrace decide_leaf(const BasicSentence& b, int dim, std::uint64_t seed, const Tolerance& tol) {
  check_dims(b, dim);
  LeafTrace t;
  t.positives = b.positives.size();
  t.negatives = b.negatives.size();
  t.p_inf = meet_all(b.positives, dim, tol);
  for (std::size_t j = 0; j < b.negatives.size(); ++j) {
    if (leq(t.p_inf, b.negatives[j], tol)) t.failing_negatives.push_back(j);
  }
  t.truth = t.failing_negatives.empty();
  if (t.truth) {
    if (b.negatives.empty()) {
      t.witness = Subspace::bottom(dim);
    } else {
      auto ray = ray_in_avoiding(t.p_inf, b.negatives, seed, tol);
      if (!ray) throw InternalError("decide_basic: no witness although every negative is avoided");
      t.witness = std::move(*ray);
    }
    if (!satisfies(*t.witness, b, tol)) throw InternalError("decide_basic: witness failed replay");
  }
  return t;
}

}  // namespace

Verdict decide_basic(const BasicSentence& b, int dim, std::uint64_t seed, const Tolerance& tol) {
  Verdict v;
  LeafTrace t = decide_leaf(b, dim, seed, tol);
  v.truth = t.truth;
  v.witness = t.witness;
  v.leaves.push_back(std::move(t));
  return v;
}

namespace {

struct Evaluator {
  int dim;
  std::uint64_t seed;
  const Tolerance& tol;
  std::vector<LeafTrace> leaves;

  // Returns truth and, where the shape admits one, a witness.
  std::pair<bool, std::optional<Subspace>> eval(const BoolCombo& c) {
    switch (c.kind) {
      case BoolCombo::Kind::Leaf: {
        LeafTrace t = decide_leaf(c.leaf, dim, seed + leaves.size(), tol);
        t.index = leaves.size();
        auto out = std::make_pair(t.truth, t.witness);
        leaves.push_back(std::move(t));
        return out;
      }
      case BoolCombo::Kind::Not:
        return {!eval(*c.children.front()).first, std::nullopt};
      case BoolCombo::Kind::And: {
        bool all = true;
        for (const auto& ch : c.children) all = eval(*ch).first && all;
        return {all, std::nullopt};
      }
      case BoolCombo::Kind::Or: {
        bool any = false;
        std::optional<Subspace> witness;
        for (const auto& ch : c.children) {
          auto [truth, w] = eval(*ch);
          if (truth && !any) witness = std::move(w);
          any = any || truth;
        }
        return {any, witness};
      }
    }
    throw InternalError("evaluate: unknown combo kind");
  }
};

}  // namespace

Verdict evaluate(const BoolCombo& c, int dim, std::uint64_t seed, const Tolerance& tol) {
  Evaluator e{dim, seed, tol, {}};
  auto [truth, witness] = e.eval(c);
  Verdict v;
  v.truth = truth;
  v.witness = std::move(witness);
  v.leaves = std::move(e.leaves);
  return v;
}

// ---------------------------------------------------------------------------
// Ray-sampling cross-check

namespace {

// Intersection of the positives as the null space of the stacked
// complementary projectors (I - P_i).
Matrix intersection_nullspace(const std::vector<Subspace>& ps, int dim, const Tolerance& tol) {
  if (ps.empty()) return Matrix::Identity(dim, dim);
  Matrix stacked(static_cast<Eigen::Index>(ps.size()) * dim, dim);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    stacked.middleRows(static_cast<Eigen::Index>(i) * dim, dim) = Matrix::Identity(dim, dim) - ps[i].projector();
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > tol.eq_tol) ++rank;
  return svd.matrixV().rightCols(dim - rank);
}

bool ray_satisfies(const Vector& v, const BasicSentence& b, const Tolerance& tol) {
  for (const auto& p : b.positives)
    if ((v - p.projector() * v).norm() >= tol.eq_tol) return false;
  for (const auto& q : b.negatives)
    if ((v - q.projector() * v).norm() < tol.eq_tol) return false;
  return true;
}

Vector random_unit_in(const Matrix& basis, Rng& rng) {
  Vector v = basis * random_vector(static_cast<int>(basis.cols()), rng);
  return v / v.norm();
}

}  // namespace

VdCrossCheck cross_check_vd(const BasicSentence& b, int dim, std::size_t samples, std::uint64_t seed,
                            const Tolerance& tol) {
  VdCrossCheck r;
  r.samples = samples;
  Rng rng(seed);

  // Bottom satisfies the conjunction exactly when there are no negatives.
  if (b.negatives.empty()) ++r.satisfying_samples;

  const Matrix inter = intersection_nullspace(b.positives, dim, tol);
  for (std::size_t s = 0; s < samples; ++s) {
    const int source = uniform_int(rng, 0, 2);
    Vector v;
    if (source == 0 || (source == 1 && b.positives.empty())) {
      v = random_vector(dim, rng);
      v /= v.norm();
    } else if (source == 1) {
      const auto& p = b.positives[static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<int>(b.positives.size()) - 1))];
      if (p.is_bottom()) continue;
      v = random_unit_in(p.basis(), rng);
    } else {
      if (inter.cols() == 0) continue;
      v = random_unit_in(inter, rng);
    }
    if (ray_satisfies(v, b, tol)) ++r.satisfying_samples;
  }

  const Verdict verdict = decide_basic(b, dim, seed, tol);
  r.decider_truth = verdict.truth;
  if (verdict.witness) {
    const Subspace& w = *verdict.witness;
    r.witness_replayed = w.is_bottom() ? b.negatives.empty() && satisfies(w, b, tol)
                                       : ray_satisfies(w.basis().col(0), b, tol);
  }
  r.consistent = r.witness_replayed && (r.satisfying_samples == 0 || r.decider_truth);
  return r;
}

// ---------------------------------------------------------------------------
// Axiom suites

namespace {

struct Model {
  bool rays;  // ray semantics: elements are rays or bottom
  int dim;

  Subspace element(Rng& rng) const {
    if (!rays) return random_subspace(dim, rng);
    if (coin(rng, 0.05)) return Subspace::bottom(dim);
    return random_ray(dim, rng);
  }

  Subspace element_within(const Subspace& s, Rng& rng) const {
    if (!rays) return random_subspace_within(s, rng);
    if (s.is_bottom() || coin(rng, 0.05)) return Subspace::bottom(dim);
    return random_ray_within(s, rng);
  }

  // Half the draws land inside `target`, so that the hypothesis of an
  // implication holds often enough to test the conclusion.
  Subspace biased(const Subspace& target, Rng& rng) const {
    return coin(rng) ? element_within(target, rng) : element(rng);
  }

  const char* name() const { return rays ? "V" : "H"; }
};

// Property with rank drawn uniformly; generic when 0 < rank < d.
Subspace property(int dim, Rng& rng) { return random_subspace(dim, rng); }

Subspace proper_property(int dim, Rng& rng) { return random_subspace(dim, uniform_int(rng, 1, dim - 1), rng); }

using Instance = std::function<std::pair<bool, bool>(Rng&)>;  // {hypothesis, conclusion}

CheckResult run_law(const std::string& name, const std::string& group, const Model& m, std::size_t samples,
                    Rng& rng, bool asserted, const Instance& inst) {
  CheckResult r;
  r.name = name;
  r.group = group;
  r.model = m.name();
  r.asserted = asserted;
  for (std::size_t i = 0; i < samples; ++i) {
    auto [hyp, concl] = inst(rng);
    ++r.instances;
    if (hyp) {
      ++r.nontrivial;
      if (!concl) r.record_violation("instance " + std::to_string(i));
    }
  }
  return r;
}

}  // namespace

SuiteReport check_axiom_suite(int dim, std::size_t samples, std::uint64_t seed, const Tolerance& tol) {
  if (dim < 2) throw PreconditionError("check_axiom_suite: dimension must be at least 2");
  SuiteReport report;
  report.suite = "axioms";
  report.dim = dim;
  report.seed = seed;
  report.samples = samples;
  const bool strong = dim >= 3;

  for (const bool rays : {false, true}) {
    const Model m{rays, dim};
    Rng rng(seed + (rays ? 1 : 0));
    auto add = [&](const std::string& name, const std::string& group, bool asserted, const Instance& inst) {
      report.results.push_back(run_law(name, group, m, samples, rng, asserted, inst));
    };

    // exists x . ~[x : bot]
    {
      CheckResult r;
      r.name = "neg-bot";
      r.group = "base,revised";
      r.model = m.name();
      bool found = false;
      for (std::size_t i = 0; i < samples; ++i) {
        ++r.instances;
        if (!leq(m.element(rng), Subspace::bottom(dim), tol)) {
          found = true;
          ++r.nontrivial;
        }
      }
      if (!found) r.record_violation("no element outside bottom among samples");
      report.results.push_back(std::move(r));
    }

    add("top", "base,revised", true, [&](Rng& g) {
      return std::make_pair(true, leq(m.element(g), Subspace::top(dim), tol));
    });

    add("leq", "base,revised", true, [&](Rng& g) {
      Subspace p = property(dim, g);
      Subspace q = join(p, property(dim, g), tol);
      Subspace x = m.biased(p, g);
      return std::make_pair(leq(x, p, tol), leq(x, q, tol));
    });

    add("meet-compatible", "base", true, [&](Rng& g) {
      auto [p, q] = random_compatible_pair(dim, g);
      Subspace pq = meet(p, q, tol);
      Subspace x = m.biased(pq, g);
      return std::make_pair(leq(x, p, tol) && leq(x, q, tol), leq(x, pq, tol));
    });

    add("meet", "revised", strong, [&](Rng& g) {
      // Every other pair is generic, hence incompatible.
      Subspace p = coin(g) ? proper_property(dim, g) : property(dim, g);
      Subspace q = coin(g) ? proper_property(dim, g) : property(dim, g);
      Subspace pq = meet(p, q, tol);
      Subspace x = m.biased(pq, g);
      return std::make_pair(leq(x, p, tol) && leq(x, q, tol), leq(x, pq, tol));
    });

    add("proj-intro", "base,revised", true, [&](Rng& g) {
      Subspace p = property(dim, g);
      Subspace q = property(dim, g);
      Subspace x = m.biased(p, g);
      return std::make_pair(leq(x, p, tol), leq(sasaki_and(x, q, tol), sasaki_and(p, q, tol), tol));
    });

    add("proj-compose", "base", true, [&](Rng& g) {
      Subspace q = property(dim, g);
      Subspace p = random_subspace_within(q, g);
      Subspace bot = Subspace::bottom(dim);
      Subspace x = m.biased(sasaki_hook(ortho(p), q, tol), g);
      const bool hyp = leq(sasaki_and(sasaki_and(x, q, tol), p, tol), bot, tol);
      return std::make_pair(hyp, leq(sasaki_and(x, p, tol), bot, tol));
    });

    add("proj-bot", "base", true, [&](Rng& g) {
      Subspace q = property(dim, g);
      Subspace x = m.biased(ortho(q), g);
      return std::make_pair(leq(sasaki_and(x, q, tol), Subspace::bottom(dim), tol), leq(x, ortho(q), tol));
    });

    add("proj-elim", "revised", strong, [&](Rng& g) {
      Subspace p = property(dim, g);
      Subspace q = property(dim, g);
      Subspace hook = sasaki_hook(p, q, tol);
      Subspace x = m.biased(hook, g);
      return std::make_pair(leq(sasaki_and(x, q, tol), p, tol), leq(x, hook, tol));
    });

    add("unitary-intro", "base,revised", true, [&](Rng& g) {
      UnitaryOp u = coin(g, 0.1) ? UnitaryOp::identity(dim) : random_unitary(dim, g);
      Subspace p = property(dim, g);
      Subspace x = m.biased(p, g);
      return std::make_pair(leq(x, p, tol), leq(apply_unitary(u, x, tol), apply_unitary(u, p, tol), tol));
    });

    add("unitary-elim", "base,revised", true, [&](Rng& g) {
      UnitaryOp u = coin(g, 0.1) ? UnitaryOp::identity(dim) : random_unitary(dim, g);
      Subspace p = property(dim, g);
      Subspace pre = apply_unitary(u.inverse(), p, tol);
      Subspace x = m.biased(pre, g);
      return std::make_pair(leq(apply_unitary(u, x, tol), p, tol), leq(x, pre, tol));
    });
  }
  return report;
}

}  // namespace pqm
