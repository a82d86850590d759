"""Python bindings for the pqm library.

Lattice operations work on ``Subspace`` and ``Unitary`` objects directly.
Whole-document commands return plain dictionaries decoded from the same JSON
the command-line tool emits.
"""

import json

try:
    from . import _pqm
except ImportError:  # in-tree build: the extension sits on PYTHONPATH
    import _pqm

Error = _pqm.Error
ParseError = _pqm.ParseError
DimensionMismatch = _pqm.DimensionMismatch
NotUnitary = _pqm.NotUnitary
DomainError = _pqm.DomainError
PreconditionError = _pqm.PreconditionError

Subspace = _pqm.Subspace
Unitary = _pqm.Unitary
Tolerance = _pqm.Tolerance

ortho = _pqm.ortho
join = _pqm.join
meet = _pqm.meet
leq = _pqm.leq
sasaki_and = _pqm.sasaki_and
sasaki_hook = _pqm.sasaki_hook
compatible = _pqm.compatible
apply_unitary = _pqm.apply_unitary

f_step = _pqm.f_step
steps_to_one = _pqm.steps_to_one
step_chain = _pqm.step_chain


def decide(text, seed=0, trace=False):
    """Decide the sentence asserted in a problem file given as text."""
    return json.loads(_pqm.decide_json(text, seed, trace))


def run_circuit(text):
    """Run a circuit document given as text."""
    return json.loads(_pqm.circuit_json(text))


def model_check(structure):
    """Axiom, strong-morphism and characterization checks of a structure.

    Accepts the structure as JSON text or as an already decoded dictionary.
    """
    if not isinstance(structure, str):
        structure = json.dumps(structure)
    return json.loads(_pqm.model_check_json(structure))


def check_axioms(dim, samples=500, seed=0):
    return json.loads(_pqm.axiom_suite_json(dim, samples, seed))


def check_rules(dim, samples=500, seed=0):
    return json.loads(_pqm.rule_suite_json(dim, samples, seed))
