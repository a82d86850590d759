#include "pqm/normalizer.hpp"

#include <optional>
#include <utility>

namespace pqm {

BoolComboPtr BoolCombo::make_leaf(BasicSentence b) {
  auto c = std::make_shared<BoolCombo>();
  c->kind = Kind::Leaf;
  c->leaf = std::move(b);
  return c;
}

BoolComboPtr BoolCombo::make_not(BoolComboPtr child) {
  auto c = std::make_shared<BoolCombo>();
  c->kind = Kind::Not;
  c->children.push_back(std::move(child));
  return c;
}

namespace {

BoolComboPtr make_nary(BoolCombo::Kind kind, std::vector<BoolComboPtr> cs) {
  if (cs.empty()) throw InternalError("normalize: empty connective");
  if (cs.size() == 1) return cs.front();
  auto c = std::make_shared<BoolCombo>();
  c->kind = kind;
  c->children = std::move(cs);
  return c;
}

}  // namespace

BoolComboPtr BoolCombo::make_and(std::vector<BoolComboPtr> cs) { return make_nary(Kind::And, std::move(cs)); }
BoolComboPtr BoolCombo::make_or(std::vector<BoolComboPtr> cs) { return make_nary(Kind::Or, std::move(cs)); }

std::size_t node_count(const BoolCombo& c) {
  std::size_t n = 1;
  for (const auto& ch : c.children) n += node_count(*ch);
  return n;
}

std::size_t leaf_count(const BoolCombo& c) {
  if (c.kind == BoolCombo::Kind::Leaf) return 1;
  std::size_t n = 0;
  for (const auto& ch : c.children) n += leaf_count(*ch);
  return n;
}

ReducedAtom reduce_atom(const Term& term, const Subspace& property, const Definitions& defs,
                        const Tolerance& tol) {
  const Term* t = &term;
  Subspace p = property;
  while (t->kind != Term::Kind::Var) {
    if (t->kind == Term::Kind::Proj) {
      p = sasaki_hook(p, defs.subspace(t->name), tol);
    } else {
      p = apply_unitary(defs.unitary(t->name).inverse(), p, tol);
    }
    t = t->arg.get();
  }
  return ReducedAtom{t->name, std::move(p)};
}

namespace {

// Literal of the intermediate negation normal form: either a reduced atom on
// a variable, or an already-eliminated closed basic sentence.
struct Lit {
  bool positive = true;
  std::string var;                  // atom
  std::optional<Subspace> property;  // atom
  BoolComboPtr leaf;                // closed leaf (kind Leaf)

  bool is_leaf() const { return leaf != nullptr; }
  Lit negated() const {
    Lit l = *this;
    l.positive = !l.positive;
    return l;
  }
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Lit, And, Or, Exists, Forall };
  Kind kind = Kind::Lit;
  Lit lit;
  std::vector<NodePtr> kids;  // And / Or: two or more; quantifiers: the body
  std::string var;
};

NodePtr lit_node(Lit l) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::Lit;
  n->lit = std::move(l);
  return n;
}

NodePtr nary(Node::Kind kind, std::vector<NodePtr> kids) {
  if (kids.size() == 1) return kids.front();
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->kids = std::move(kids);
  return n;
}

NodePtr quant(Node::Kind kind, std::string var, NodePtr body) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->var = std::move(var);
  n->kids.push_back(std::move(body));
  return n;
}

class Normalizer {
 public:
  Normalizer(const Definitions& defs, const Tolerance& tol, std::size_t limit)
      : defs_(defs), tol_(tol), limit_(limit) {}

  BoolComboPtr run(const Formula& f) {
    NodePtr nnf = to_nnf(f, true);
    NodePtr qfree = eliminate(nnf);
    return to_combo(*qfree);
  }

 private:
  // Steps 1-3: implication elimination, negation normal form, atom reduction.
  NodePtr to_nnf(const Formula& f, bool positive) {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::Atom: {
        ReducedAtom r = reduce_atom(*f.term, defs_.subspace(f.symbol), defs_, tol_);
        Lit l;
        l.positive = positive;
        l.var = std::move(r.var);
        l.property = std::move(r.property);
        return lit_node(std::move(l));
      }
      case K::Not:
        return to_nnf(*f.lhs, !positive);
      case K::And:
      case K::Or: {
        const bool conj = (f.kind == K::And) == positive;
        return nary(conj ? Node::Kind::And : Node::Kind::Or, {to_nnf(*f.lhs, positive), to_nnf(*f.rhs, positive)});
      }
      case K::Implies: {
        // a -> b  ==  ~a | b
        if (positive) return nary(Node::Kind::Or, {to_nnf(*f.lhs, false), to_nnf(*f.rhs, true)});
        return nary(Node::Kind::And, {to_nnf(*f.lhs, true), to_nnf(*f.rhs, false)});
      }
      case K::Iff: {
        // a <-> b  ==  (a & b) | (~a & ~b);  ~(a <-> b)  ==  (a & ~b) | (~a & b)
        NodePtr a = to_nnf(*f.lhs, true);
        NodePtr na = to_nnf(*f.lhs, false);
        NodePtr b = to_nnf(*f.rhs, true);
        NodePtr nb = to_nnf(*f.rhs, false);
        if (positive) {
          return nary(Node::Kind::Or, {nary(Node::Kind::And, {a, b}), nary(Node::Kind::And, {na, nb})});
        }
        return nary(Node::Kind::Or, {nary(Node::Kind::And, {a, nb}), nary(Node::Kind::And, {na, b})});
      }
      case K::Exists:
      case K::Forall: {
        const bool ex = (f.kind == K::Exists) == positive;
        return quant(ex ? Node::Kind::Exists : Node::Kind::Forall, f.var, to_nnf(*f.lhs, positive));
      }
    }
    throw InternalError("normalize: unknown formula kind");
  }

  // Negation of a quantifier-free NNF node.
  static NodePtr negate(const NodePtr& n) {
    switch (n->kind) {
      case Node::Kind::Lit:
        return lit_node(n->lit.negated());
      case Node::Kind::And:
      case Node::Kind::Or: {
        std::vector<NodePtr> kids;
        kids.reserve(n->kids.size());
        for (const auto& k : n->kids) kids.push_back(negate(k));
        return nary(n->kind == Node::Kind::And ? Node::Kind::Or : Node::Kind::And, std::move(kids));
      }
      default:
        throw InternalError("normalize: negate on quantified node");
    }
  }

  // Step 4: innermost-first quantifier elimination.
  NodePtr eliminate(const NodePtr& n) {
    switch (n->kind) {
      case Node::Kind::Lit:
        return n;
      case Node::Kind::And:
      case Node::Kind::Or: {
        std::vector<NodePtr> kids;
        kids.reserve(n->kids.size());
        for (const auto& k : n->kids) kids.push_back(eliminate(k));
        return nary(n->kind, std::move(kids));
      }
      case Node::Kind::Exists:
        return eliminate_exists(n->var, eliminate(n->kids.front()));
      case Node::Kind::Forall:
        // forall y . B  ==  ~ exists y . ~B
        return negate(eliminate_exists(n->var, negate(eliminate(n->kids.front()))));
    }
    throw InternalError("normalize: unknown node kind");
  }

  using Conjunction = std::vector<Lit>;

  std::vector<Conjunction> dnf(const Node& n) {
    switch (n.kind) {
      case Node::Kind::Lit:
        charge(1);
        return {Conjunction{n.lit}};
      case Node::Kind::Or: {
        std::vector<Conjunction> out;
        for (const auto& k : n.kids) {
          auto part = dnf(*k);
          out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        }
        return out;
      }
      case Node::Kind::And: {
        std::vector<Conjunction> acc{Conjunction{}};
        for (const auto& k : n.kids) {
          auto part = dnf(*k);
          std::vector<Conjunction> next;
          next.reserve(acc.size() * part.size());
          for (const auto& a : acc) {
            for (const auto& b : part) {
              charge(a.size() + b.size());
              Conjunction c = a;
              c.insert(c.end(), b.begin(), b.end());
              next.push_back(std::move(c));
            }
          }
          acc = std::move(next);
        }
        return acc;
      }
      default:
        throw InternalError("normalize: dnf on quantified node");
    }
  }

  void charge(std::size_t n) {
    budget_used_ += n;
    if (budget_used_ > limit_) throw NormalFormTooLarge(limit_);
  }

  NodePtr eliminate_exists(const std::string& y, const NodePtr& body) {
    std::vector<NodePtr> disjuncts;
    for (auto& conj : dnf(*body)) {
      BasicSentence leaf;
      bool has_y = false;
      std::vector<NodePtr> rest;
      for (auto& l : conj) {
        if (!l.is_leaf() && l.var == y) {
          has_y = true;
          (l.positive ? leaf.positives : leaf.negatives).push_back(*l.property);
        } else {
          rest.push_back(lit_node(l));
        }
      }
      if (has_y) {
        Lit ll;
        ll.leaf = BoolCombo::make_leaf(std::move(leaf));
        rest.push_back(lit_node(std::move(ll)));
      }
      // A conjunction without y-literals is its own existential closure
      // (non-empty domain).
      disjuncts.push_back(nary(Node::Kind::And, std::move(rest)));
    }
    return nary(Node::Kind::Or, std::move(disjuncts));
  }

  static BoolComboPtr to_combo(const Node& n) {
    switch (n.kind) {
      case Node::Kind::Lit:
        if (!n.lit.is_leaf()) throw InternalError("normalize: free variable survived elimination");
        return n.lit.positive ? n.lit.leaf : BoolCombo::make_not(n.lit.leaf);
      case Node::Kind::And:
      case Node::Kind::Or: {
        std::vector<BoolComboPtr> kids;
        for (const auto& k : n.kids) kids.push_back(to_combo(*k));
        return n.kind == Node::Kind::And ? BoolCombo::make_and(std::move(kids)) : BoolCombo::make_or(std::move(kids));
      }
      default:
        throw InternalError("normalize: quantifier survived elimination");
    }
  }

  const Definitions& defs_;
  Tolerance tol_;
  std::size_t limit_;
  std::size_t budget_used_ = 0;
};

}  // namespace

BoolComboPtr normalize(const Formula& sentence, const Definitions& defs, const Tolerance& tol,
                       std::size_t node_limit) {
  if (!free_variables(sentence).empty()) throw PreconditionError("normalize: sentence is not closed");
  Normalizer n(defs, tol, node_limit);
  return n.run(sentence);
}

namespace {

class Renderer {
 public:
  explicit Renderer(int dim) : defs_(dim) {}

  FormulaPtr render(const BoolCombo& c) {
    switch (c.kind) {
      case BoolCombo::Kind::Leaf:
        return render_leaf(c.leaf);
      case BoolCombo::Kind::Not:
        return Formula::negation(render(*c.children.front()));
      case BoolCombo::Kind::And:
      case BoolCombo::Kind::Or: {
        FormulaPtr acc = render(*c.children.front());
        for (std::size_t i = 1; i < c.children.size(); ++i) {
          FormulaPtr next = render(*c.children[i]);
          acc = c.kind == BoolCombo::Kind::And ? Formula::conj(acc, next) : Formula::disj(acc, next);
        }
        return acc;
      }
    }
    throw InternalError("to_problem: unknown combo kind");
  }

  Definitions& defs() { return defs_; }

 private:
  std::string name_for(const Subspace& s) {
    std::string name = "s" + std::to_string(counter_++);
    defs_.subspaces.emplace(name, s);
    return name;
  }

  FormulaPtr render_leaf(const BasicSentence& b) {
    const auto x = Term::var("x");
    FormulaPtr body;
    auto add = [&](FormulaPtr a) { body = body ? Formula::conj(body, a) : a; };
    for (const auto& p : b.positives) add(Formula::atom(x, name_for(p)));
    for (const auto& q : b.negatives) add(Formula::negation(Formula::atom(x, name_for(q))));
    if (!body) body = Formula::atom(x, "top");
    return Formula::exists("x", body);
  }

  Definitions defs_;
  int counter_ = 0;
};

}  // namespace

Problem to_problem(const BoolCombo& c, int dim) {
  Renderer r(dim);
  FormulaPtr f = r.render(c);
  return Problem{std::move(r.defs()), f};
}

}  // namespace pqm
