"""Knowledge bases indexed by nested belief contexts.

A context path names whose viewpoint a store models: () is the interpreter's
own knowledge, ("A",) is the interpreter's model of A's knowledge, ("A", "I")
is the model of A's model of the interpreter, and so on up to a nesting bound.

Asserted Believes-facts are kept in sync with the nested stores in both
directions: (B a f) at path p also places f at p + (a,), and a fact landing at
a nested path surfaces one level up wrapped in (B a ...).  Mirrors that would
exceed the nesting bound are dropped silently; direct asserts beyond it raise.

Joint consistency can be configured to range over selected nested stores as
well as the root (the author's store, in discourse use): a hypothesis the
interpreter entertains must square both with what I believes and with what I
takes A to believe.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from . import satcore
from .errors import DepthExceeded, ValidationError
from .formulas import (
    And,
    Att,
    Formula,
    Iff,
    Implies,
    Not,
    collect_constants,
    conjuncts,
    is_ground,
    print_formula,
    sat_atomic,
)

ContextPath = tuple[str, ...]


def _is_literal(f: Formula) -> bool:
    if isinstance(f, Not):
        return sat_atomic(f.body)
    return sat_atomic(f)


def _literal_conjunction(f: Formula) -> bool:
    return all(_is_literal(c) for c in conjuncts(f))


@dataclass(frozen=True)
class Store:
    """One context's contents.  Tuples, not sets: iteration order is load order,
    which keeps closure traces and SAT variable numbering reproducible."""

    facts: tuple[Formula, ...] = ()
    hard_rules: tuple[Formula, ...] = ()
    defaults: tuple = ()  # DefaultRule objects; opaque at this layer

    def formulas(self) -> tuple[Formula, ...]:
        return self.facts + self.hard_rules


@dataclass(frozen=True)
class KnowledgeBase:
    stores: dict[ContextPath, Store] = field(default_factory=dict)
    constants: frozenset[str] = frozenset()
    max_depth: int = 3
    #: nested paths whose stores must also be satisfiable for root consistency
    root_consistency_paths: tuple[ContextPath, ...] = ()

    # -- access ------------------------------------------------------------

    def store_at(self, path: ContextPath) -> Store:
        return self.stores.get(tuple(path), Store())

    def paths(self) -> tuple[ContextPath, ...]:
        return tuple(sorted(self.stores))

    def facts_at(self, path: ContextPath) -> tuple[Formula, ...]:
        return self.store_at(path).facts

    def has_fact(self, path: ContextPath, f: Formula) -> bool:
        return f in self.store_at(path).facts

    # -- construction ------------------------------------------------------

    def _with_store(self, path: ContextPath, store: Store) -> "KnowledgeBase":
        stores = dict(self.stores)
        stores[tuple(path)] = store
        return replace(self, stores=stores)

    def with_constants(self, names: Iterable[str]) -> "KnowledgeBase":
        return replace(self, constants=self.constants | frozenset(names))

    def assert_fact(self, path: ContextPath, f: Formula, *, mirror: bool = True) -> "KnowledgeBase":
        """Add a ground literal (or conjunction of literals) at a path.

        With mirror=True (the default) Believes-facts propagate into the
        nested store and nested facts surface as wrapped beliefs above.
        """
        path = tuple(path)
        if not is_ground(f):
            raise ValidationError(f"facts must be ground: {print_formula(f)}")
        kb = self
        for lit in conjuncts(f):
            kb = kb._assert_literal(path, lit, mirror)
        return kb

    def _assert_literal(self, path: ContextPath, f: Formula, mirror: bool) -> "KnowledgeBase":
        if not _is_literal(f):
            raise ValidationError(f"not a literal: {print_formula(f)}")
        if len(path) > self.max_depth:
            raise DepthExceeded(f"path {path} exceeds nesting bound {self.max_depth}")
        store = self.store_at(path)
        if f in store.facts:
            return self  # idempotent; also terminates mirror ping-pong
        kb = self._with_store(path, replace(store, facts=store.facts + (f,)))
        kb = kb.with_constants(collect_constants(f))
        if not mirror:
            return kb
        # downward: (B a body) at p puts body at p + (a,)
        if isinstance(f, Att) and f.kind == "B" and _literal_conjunction(f.body):
            inner = path + (f.agent,)
            if len(inner) <= self.max_depth:
                kb = kb.assert_fact(inner, f.body, mirror=True)
        # upward: a fact of agent a's store is a belief of a's one level up
        if path:
            kb = kb._assert_literal(path[:-1], Att("B", path[-1], f), mirror=True)
        return kb

    def retract_fact(self, path: ContextPath, f: Formula) -> "KnowledgeBase":
        """Remove a literal from one store (no mirror propagation: retraction
        is a deliberate, local act)."""
        path = tuple(path)
        store = self.store_at(path)
        if f not in store.facts:
            return self
        return self._with_store(path, replace(store, facts=tuple(x for x in store.facts if x != f)))

    def add_hard_rule(self, path: ContextPath, f: Formula) -> "KnowledgeBase":
        path = tuple(path)
        if not is_ground(f):
            raise ValidationError(f"hard rules must be ground: {print_formula(f)}")
        if not isinstance(f, (Implies, Iff)):
            raise ValidationError(f"hard rules are -> or <-> formulas: {print_formula(f)}")
        if len(path) > self.max_depth:
            raise DepthExceeded(f"path {path} exceeds nesting bound {self.max_depth}")
        store = self.store_at(path)
        if f in store.hard_rules:
            return self
        kb = self._with_store(path, replace(store, hard_rules=store.hard_rules + (f,)))
        return kb.with_constants(collect_constants(f))

    def with_default(self, path: ContextPath, rule) -> "KnowledgeBase":
        path = tuple(path)
        if len(path) > self.max_depth:
            raise DepthExceeded(f"path {path} exceeds nesting bound {self.max_depth}")
        store = self.store_at(path)
        return self._with_store(path, replace(store, defaults=store.defaults + (rule,)))

    # -- queries -----------------------------------------------------------

    def entails(self, path: ContextPath, f: Formula) -> bool:
        return satcore.entailed_by(self.store_at(path).formulas(), f)

    def consistent_with(self, path: ContextPath, extra: Iterable[Formula] = ()) -> bool:
        """Satisfiability of one store together with extra formulas."""
        return satcore.satisfiable(self.store_at(path).formulas() + tuple(extra))

    def jointly_consistent_with(self, extra: Iterable[Formula] = ()) -> bool:
        """Satisfiability of the extras against the root store and each
        configured viewpoint store.  Hypotheses the interpreter entertains
        must square both with what I believes and with what I takes the
        author to believe; ordinary conclusions at the root need only local
        consistency (the author's picture may lag the interpreter's uptake).
        """
        extra = tuple(extra)
        for p in ((),) + tuple(self.root_consistency_paths):
            if not satcore.satisfiable(self.store_at(p).formulas() + extra):
                return False
        return True

    def nested_view(self, path: ContextPath) -> "KnowledgeBase":
        """Re-root the knowledge base at a nested path."""
        path = tuple(path)
        if len(path) > self.max_depth:
            raise DepthExceeded(f"path {path} exceeds nesting bound {self.max_depth}")
        n = len(path)
        stores = {p[n:]: s for p, s in self.stores.items() if p[:n] == path}
        return KnowledgeBase(
            stores=stores,
            constants=self.constants,
            max_depth=max(0, self.max_depth - n),
            root_consistency_paths=(),
        )

    def walk(self) -> Iterator[tuple[ContextPath, Store]]:
        for p in sorted(self.stores):
            yield p, self.stores[p]
