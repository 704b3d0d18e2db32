"""Brute-force reference implementations used as test oracles.

Everything here trades efficiency for obviousness, and shares no code with
the real implementations beyond the formula types themselves:

* satisfiability checks candidate assignments one at a time with a recursive
  evaluator (the satcore kernels compile to RPN and sweep all assignments as
  bit-vectors);
* the closure re-derives the documented conflict regime from scratch over
  ground rules (applicable defaults fire unless blocked by inconsistency or
  defeated by a conflicting default that is not strictly less specific, in
  rule-name order, rechecking as the store grows).

Agreement between these and the real implementations is what the randomized
suites assert.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from dicekit.formulas import (
    And,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    conjuncts,
    print_formula,
    sat_atomic,
)

# ------------------------------------------------------------------- naive SAT


def formula_atoms(f: Formula, out: dict) -> None:
    """Collect opaque-atom keys (canonical prints), first-seen order."""
    if sat_atomic(f):
        out.setdefault(print_formula(f))
        return
    if isinstance(f, Not):
        formula_atoms(f.body, out)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            formula_atoms(p, out)
    else:  # Implies | Iff
        formula_atoms(f.left, out)
        formula_atoms(f.right, out)


def eval_formula(f: Formula, assignment: dict) -> bool:
    if sat_atomic(f):
        return assignment[print_formula(f)]
    if isinstance(f, Not):
        return not eval_formula(f.body, assignment)
    if isinstance(f, And):
        return all(eval_formula(p, assignment) for p in f.parts)
    if isinstance(f, Or):
        return any(eval_formula(p, assignment) for p in f.parts)
    if isinstance(f, Implies):
        return (not eval_formula(f.left, assignment)) or eval_formula(f.right, assignment)
    if isinstance(f, Iff):
        return eval_formula(f.left, assignment) == eval_formula(f.right, assignment)
    raise TypeError(f"not a formula: {f!r}")


def assignments(formulas):
    """Every truth assignment over the formulas' atoms, one dict at a time."""
    atoms: dict = {}
    for f in formulas:
        formula_atoms(f, atoms)
    names = list(atoms)
    for values in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, values))


def satisfiable(formulas) -> bool:
    fs = tuple(formulas)
    return any(all(eval_formula(f, a) for f in fs) for a in assignments(fs))


def entails(premises, conclusion: Formula) -> bool:
    return not satisfiable(tuple(premises) + (Not(conclusion),))


def satisfiable_pinned(formulas) -> bool:
    """`satisfiable`, but literal formulas pin their atom before the sweep.

    A literal admits exactly one value for its atom, so every model extends
    the pinned partial assignment and the enumeration only needs to range
    over the remaining atoms.  Same answer as `satisfiable`, smaller product;
    knowledge-base stores are mostly literals, which keeps full-store checks
    tractable."""
    pins: dict = {}
    rest = []
    for f in formulas:
        if sat_atomic(f):
            key, val = print_formula(f), True
        elif isinstance(f, Not) and sat_atomic(f.body):
            key, val = print_formula(f.body), False
        else:
            rest.append(f)
            continue
        if pins.setdefault(key, val) != val:
            return False
    atoms: dict = {}
    for f in rest:
        formula_atoms(f, atoms)
    free = [a for a in atoms if a not in pins]
    for values in itertools.product((False, True), repeat=len(free)):
        assignment = dict(pins)
        assignment.update(zip(free, values))
        if all(eval_formula(f, assignment) for f in rest):
            return True
    return False


def entails_pinned(premises, conclusion: Formula) -> bool:
    return not satisfiable_pinned(tuple(premises) + (Not(conclusion),))


# ------------------------------------------------------------ reference closure


@dataclass(frozen=True)
class RefRule:
    """A ground rule for the reference closure."""

    name: str
    antecedent: tuple[Formula, ...]
    consequent: Formula
    hard: bool = False


def _conj(parts) -> Formula:
    parts = tuple(parts)
    return parts[0] if len(parts) == 1 else And(parts)


def ref_closure(facts, hard_rules, rules, *, max_rounds: int = 200) -> tuple[Formula, ...]:
    """Fixpoint over ground rules under the documented regime.

    Per round: a rule is a candidate when its antecedents are all entailed
    and its consequent is not yet entailed.  Hard candidates always fire.  A
    default is blocked when its consequent contradicts the store; of two
    consistent candidates with jointly contradictory consequents, only one
    whose antecedent strictly entails the other's (given the hard rules) may
    fire -- otherwise both stay silent.  Winners fire in rule-name order,
    rechecking consistency against facts added earlier in the round.
    """
    facts = list(dict.fromkeys(facts))
    hard_rules = tuple(hard_rules)
    ordered = sorted(rules, key=lambda r: r.name)

    def store() -> tuple[Formula, ...]:
        return tuple(facts) + hard_rules

    def add(f: Formula) -> None:
        for c in conjuncts(f):
            if c not in facts:
                facts.append(c)

    for _ in range(max_rounds):
        cands = [
            r
            for r in ordered
            if not entails(store(), r.consequent)
            and all(entails(store(), a) for a in r.antecedent)
        ]
        if not cands:
            break
        ok = {r.name: r.hard or satisfiable(store() + (r.consequent,)) for r in cands}
        winners = []
        for r in cands:
            if r.hard:
                winners.append(r)
                continue
            if not ok[r.name]:
                continue
            defeated = False
            for s in cands:
                if s is r or s.hard or not ok[s.name]:
                    continue
                if satisfiable(store() + (r.consequent, s.consequent)):
                    continue
                stronger = entails(r.antecedent + hard_rules, _conj(s.antecedent))
                weaker = entails(s.antecedent + hard_rules, _conj(r.antecedent))
                if not (stronger and not weaker):
                    defeated = True
            if not defeated:
                winners.append(r)
        progressed = False
        for r in winners:
            if entails(store(), r.consequent):
                continue
            if not r.hard and not satisfiable(store() + (r.consequent,)):
                continue
            add(r.consequent)
            progressed = True
        if not progressed:
            break
    return tuple(facts)


def ref_nonmon_yields(facts, hard_rules, rules, phi: Formula, psi: Formula) -> bool:
    """phi defeasibly yields psi: psi follows from the closure with phi added
    but not from the closure of the store alone."""
    hard_rules = tuple(hard_rules)
    base = ref_closure(facts, hard_rules, rules)
    augmented = ref_closure(tuple(facts) + (phi,), hard_rules, rules)
    return entails(augmented + hard_rules, psi) and not entails(base + hard_rules, psi)


# ------------------------------------------------------------ random instances


def random_formula(rng, atom_names, depth: int) -> Formula:
    """A random ground boolean formula over named 0-ary atoms."""
    from dicekit.formulas import Atom

    if depth <= 0 or rng.random() < 0.35:
        return Atom(rng.choice(atom_names))
    shape = rng.choice(("not", "and", "or", "->", "<->"))
    if shape == "not":
        return Not(random_formula(rng, atom_names, depth - 1))
    if shape in ("and", "or"):
        parts = tuple(
            random_formula(rng, atom_names, depth - 1) for _ in range(rng.randint(2, 3))
        )
        return And(parts) if shape == "and" else Or(parts)
    left = random_formula(rng, atom_names, depth - 1)
    right = random_formula(rng, atom_names, depth - 1)
    return Implies(left, right) if shape == "->" else Iff(left, right)


def random_literal(rng, atom_names) -> Formula:
    from dicekit.formulas import Atom

    atom = Atom(rng.choice(atom_names))
    return Not(atom) if rng.random() < 0.5 else atom

