"""Defeasible inference: closure, specificity, nonmonotonic consequence, abduction.

The closure operator repeatedly fires rules whose instantiated antecedents are
entailed at a context path.  Hard rules fire unconditionally; a default fires
only when its consequent is consistent with the store and the instance is not
defeated.  Two applicable defaults conflict when their consequents are jointly
unsatisfiable with the store; the one whose antecedent strictly entails the
other's (under the path's hard rules) wins and fires in Penguin mode, and when
neither antecedent is strictly stronger both stay silent -- sceptical
resolution.  The result is order-independent: candidate instances are
collected per round and fired in a canonical order.

`yields` atoms are evaluated lazily: when a driver or abduction needs
(yields f g) at a path, the engine closes the store there with and without f
and compares -- g must follow from the augmented store but not from the store
alone.  Inside closure itself, yields-atoms in rule antecedents only match
stored (previously verified) facts, which keeps hypothetical reasoning from
recursing without bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import satcore
from .errors import StepBoundExceeded, ValidationError
from .formulas import (
    And,
    Att,
    Binding,
    Const,
    Done,
    Doing,
    Eventually,
    Formula,
    FVar,
    Not,
    Plan,
    Yields,
    conj,
    conjuncts,
    free_variables,
    instantiate,
    is_ground,
    match,
    metavariables,
    parse_formula,
    print_formula,
    subformulas,
)
from .kb import ContextPath, KnowledgeBase

_POOL_CAP = 10000  # fallback-enumeration guard


# ----------------------------------------------------------------------- rules


@dataclass(frozen=True)
class DefaultRule:
    """A named rule `antecedent > consequent` (hard=True makes it monotonic).

    abducible lists antecedent positions that abduction may hypothesize.
    absent lists negation-as-absence premises: the rule fires only when none
    of them holds (flagged in the trace when used).  scope="root" keeps a rule
    out of closures at nested paths.  driver=True marks rules applied by a
    dedicated procedure rather than the closure loop; builtin names a special
    matcher.
    """

    name: str
    antecedent: tuple[Formula, ...]
    consequent: Formula
    hard: bool = False
    abducible: frozenset[int] = frozenset()
    absent: tuple[Formula, ...] = ()
    scope: str = "root"
    driver: bool = False
    builtin: str | None = None
    note: str = ""

    def __post_init__(self):
        if self.scope not in ("root", "everywhere"):
            raise ValidationError(f"bad rule scope {self.scope!r}")
        for i in self.abducible:
            if not 0 <= i < len(self.antecedent):
                raise ValidationError(f"abducible index {i} out of range in rule {self.name}")


def _as_formula(x) -> Formula:
    return x if isinstance(x, Formula) else parse_formula(x)


def make_rule(name: str, antecedent, consequent, **kw) -> DefaultRule:
    if "absent" in kw:
        kw["absent"] = tuple(_as_formula(a) for a in kw["absent"])
    return DefaultRule(
        name=name,
        antecedent=tuple(_as_formula(a) for a in antecedent),
        consequent=_as_formula(consequent),
        **kw,
    )


# ----------------------------------------------------------------------- trace


def render_value(v) -> str:
    if isinstance(v, Formula):
        return print_formula(v)
    if isinstance(v, Const):
        return v.name
    return str(v)


def render_binding(b: Binding) -> str:
    if not b:
        return "{}"
    return "{" + ", ".join(f"{k}={render_value(b[k])}" for k in sorted(b)) + "}"


@dataclass(frozen=True)
class InferenceStep:
    index: int
    mode: str  # DMP | Penguin | Hard | Abduction
    rule: str
    binding: str
    added: tuple[Formula, ...]

    def line(self) -> str:
        added = "; ".join(print_formula(f) for f in self.added)
        return f"step {self.index} {self.mode} {self.rule} {self.binding} => {added}"


class Trace:
    def __init__(self):
        self.entries: list = []
        self._n = 0

    def step(self, mode: str, rule: str, binding, added) -> InferenceStep:
        self._n += 1
        rendered = binding if isinstance(binding, str) else render_binding(binding)
        st = InferenceStep(self._n, mode, rule, rendered, tuple(added))
        self.entries.append(st)
        return st

    def note(self, text: str) -> None:
        self.entries.append(text)

    def steps(self) -> tuple[InferenceStep, ...]:
        return tuple(e for e in self.entries if isinstance(e, InferenceStep))

    def lines(self) -> list[str]:
        return [e.line() if isinstance(e, InferenceStep) else e for e in self.entries]

    def __str__(self) -> str:
        return "\n".join(self.lines())


# ----------------------------------------------------------- lazy entailment


_IN_PROGRESS = object()


@dataclass
class EvalContext:
    """Carries the rule set and a memo table for one evaluation episode.

    The yields-cache assumes the knowledge base does not change during the
    episode; create a fresh context after asserting new facts.
    """

    rules: tuple[DefaultRule, ...] = ()
    max_steps: int = 1000
    yields_cache: dict = field(default_factory=dict)


def holds(kb: KnowledgeBase, path: ContextPath, f: Formula, ctx: EvalContext | None = None) -> bool:
    """Entailment at a path, with eventuality discharge and (when a context is
    supplied) lazy evaluation of yields-atoms by nested closure."""
    if kb.entails(path, f):
        return True
    match f:
        case Eventually(body):
            return holds(kb, path, body, ctx)
        case And(parts):
            return all(holds(kb, path, p, ctx) for p in parts)
        case Yields(left, right) if ctx is not None:
            return yields_holds(kb, path, left, right, ctx)
        case Att("B", agent, Yields(left, right)) if ctx is not None:
            inner = tuple(path) + (agent,)
            if len(inner) <= kb.max_depth:
                return yields_holds(kb, inner, left, right, ctx)
            return False
        case _:
            return False


def yields_holds(kb: KnowledgeBase, path: ContextPath, left: Formula, right: Formula, ctx: EvalContext) -> bool:
    key = (tuple(path), print_formula(left), print_formula(right))
    cached = ctx.yields_cache.get(key)
    if cached is _IN_PROGRESS:
        return False  # occurs-check: a yields-atom cannot support itself
    if cached is not None:
        return cached
    ctx.yields_cache[key] = _IN_PROGRESS
    verdict = nonmon_yields(kb, ctx.rules, path, left, right, ctx=ctx)
    ctx.yields_cache[key] = verdict
    return verdict


def nonmon_yields(
    kb: KnowledgeBase,
    rules,
    path: ContextPath,
    phi: Formula,
    psi: Formula,
    *,
    ctx: EvalContext | None = None,
) -> bool:
    """phi defeasibly yields psi against the store at path: the closure of the
    store plus phi entails psi, while the closure of the store alone does not."""
    rules = tuple(rules)
    ctx = ctx or EvalContext(rules=rules)
    base = defeasible_closure(kb, rules, path, max_steps=ctx.max_steps).kb
    augmented = defeasible_closure(kb.assert_fact(path, phi), rules, path, max_steps=ctx.max_steps).kb
    return holds(augmented, path, psi, ctx) and not holds(base, path, psi, ctx)


# ------------------------------------------------------------------ specificity


def specificity(first, second, kb: KnowledgeBase, path: ContextPath = ()) -> str:
    """Compare two ground antecedents under the path's hard rules alone.

    Returns "first" when the first antecedent strictly entails the second,
    "second" for the converse, else "incomparable" (including mutual
    entailment -- neither is more specific).
    """
    a = first.antecedent if isinstance(first, DefaultRule) else tuple(first)
    b = second.antecedent if isinstance(second, DefaultRule) else tuple(second)
    hard = kb.store_at(path).hard_rules

    def entails(src, dst) -> bool:
        return satcore.entailed_by(tuple(src) + hard, conj(dst))

    fwd = entails(a, b)
    back = entails(b, a)
    if fwd and not back:
        return "first"
    if back and not fwd:
        return "second"
    return "incomparable"


# ---------------------------------------------------------------------- closure


@dataclass(frozen=True)
class _Inst:
    rule: DefaultRule
    binding: Binding
    ants: tuple[Formula, ...]
    cons: Formula
    key: str


@dataclass(frozen=True)
class ClosureResult:
    kb: KnowledgeBase
    steps: tuple[InferenceStep, ...]


def _fvar_names(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, FVar))


def _bind_key(b: Binding) -> str:
    return render_binding(b)


def _pool_confines(b: Binding, pool) -> bool:
    """A candidate pool both supplies unbound metavariables and confines bound
    ones: a binding whose pooled variable landed outside the pool is rejected."""
    for name, allowed in pool.items():
        if name not in b:
            continue
        want = render_value(b[name])
        if not any(render_value(a) == want for a in allowed):
            return False
    return True


def _extend_bindings(pat: Formula, bindings, facts_sorted, pool_consts, fvar_pool=None):
    """One conjunct's worth of binding extension: match stored facts, fill
    remaining term/slot variables from the constant pool and remaining formula
    metavariables from the candidate pool (when given)."""
    vars_needed = metavariables(pat) | free_variables(pat)
    fvars = _fvar_names(pat)
    out: dict[str, Binding] = {}

    def push(b: Binding) -> None:
        out.setdefault(_bind_key(b), b)

    for b in bindings:
        unbound = vars_needed - b.keys()
        if not unbound:
            push(b)
            continue
        matched = False
        for f in facts_sorted:
            m = match(pat, f, b)
            if m is not None:
                matched = True
                push(m)
        if matched:
            continue
        # no stored fact fits; enumerate candidates anyway -- the instantiated
        # conjunct may still hold through hard rules, or be supplied later by
        # an abduction pool
        term_unbound = sorted(unbound - fvars)
        fvar_unbound = sorted(unbound & fvars)
        candidates: list[Binding] = [b]
        if fvar_unbound:
            if not fvar_pool or any(n not in fvar_pool for n in fvar_unbound):
                candidates = []
            else:
                new: list[Binding] = []
                for combo in itertools.product(*(tuple(fvar_pool[n]) for n in fvar_unbound)):
                    nb = dict(b)
                    nb.update(zip(fvar_unbound, combo))
                    new.append(nb)
                candidates = new
        if candidates and term_unbound:
            if len(pool_consts) ** len(term_unbound) > _POOL_CAP:
                candidates = []
            else:
                new = []
                for base in candidates:
                    for combo in itertools.product(pool_consts, repeat=len(term_unbound)):
                        nb = dict(base)
                        nb.update(zip(term_unbound, (Const(c) for c in combo)))
                        new.append(nb)
                candidates = new
        for nb in candidates:
            if not (vars_needed - nb.keys()):
                push(nb)
    return list(out.values())


def rule_instances(rule: DefaultRule, kb: KnowledgeBase, path: ContextPath, fvar_pool=None) -> list[_Inst]:
    """Ground instances of a rule against the facts at a path, canonical order."""
    store = kb.store_at(path)
    facts_sorted = sorted(store.facts, key=print_formula)
    pool_consts = tuple(sorted(kb.constants))
    bindings: list[Binding] = [{}]
    for pat in rule.antecedent:
        bindings = _extend_bindings(pat, bindings, facts_sorted, pool_consts, fvar_pool)
        if not bindings:
            return []
    insts = []
    seen = set()
    for b in bindings:
        try:
            ants = tuple(instantiate(p, b) for p in rule.antecedent)
            cons = instantiate(rule.consequent, b)
        except ValidationError:
            continue
        if not all(is_ground(a) for a in ants) or not is_ground(cons):
            continue
        key = _bind_key(b)
        if (rule.name, key) in seen:
            continue
        seen.add((rule.name, key))
        insts.append(_Inst(rule, b, ants, cons, key))
    insts.sort(key=lambda i: i.key)
    return insts


def _intention_update_instances(rule: DefaultRule, kb: KnowledgeBase, path: ContextPath) -> list[_Inst]:
    """Progress-update schema: from an intended plan and a done prefix, intend
    the remaining suffix and drop the intention for the consumed prefix."""
    agent = None
    for pat in rule.antecedent:
        if isinstance(pat, Att) and pat.kind == "I":
            agent = pat.agent
    if agent is None:
        return []
    facts = sorted(kb.store_at(path).facts, key=print_formula)
    intended = [f.body.plan for f in facts if isinstance(f, Att) and f.kind == "I" and f.agent == agent and isinstance(f.body, Doing)]
    done = [f.plan for f in facts if isinstance(f, Done)]
    insts = []
    for p in intended:
        for q in done:
            k = len(q.steps)
            if k >= len(p.steps) or p.steps[:k] != q.steps:
                continue
            suffix = Plan(p.steps[k:])
            cons = And((Att("I", agent, Doing(suffix)), Not(Att("I", agent, Doing(q)))))
            b: Binding = {"done": Done(q), "plan": Att("I", agent, Doing(p))}
            insts.append(_Inst(rule, b, (Att("I", agent, Doing(p)), Done(q)), cons, _bind_key(b)))
    insts.sort(key=lambda i: i.key)
    return insts


_BUILTINS = {"intention-update": _intention_update_instances}


def _active_rules(rules, store_defaults, path: ContextPath):
    out = []
    for r in rules:
        if r.driver:
            continue
        if r.scope == "root" and tuple(path) != ():
            continue
        out.append(r)
    # a store's own declared defaults always run there, whatever their scope
    out.extend(r for r in store_defaults if not r.driver)
    out.sort(key=lambda r: r.name)
    return out


def defeasible_closure(
    kb: KnowledgeBase,
    rules,
    path: ContextPath = (),
    *,
    trace: Trace | None = None,
    max_steps: int = 1000,
) -> ClosureResult:
    """Fire rules to a fixpoint at one path.  See the module docstring for the
    conflict regime.  Rules scoped "root" are skipped at nested paths; the
    store's own declared defaults always participate."""
    path = tuple(path)
    trace = trace if trace is not None else Trace()
    active = _active_rules(rules, kb.store_at(path).defaults, path)
    fired: list[InferenceStep] = []
    out = kb
    for _ in range(max_steps):
        insts: list[_Inst] = []
        for rule in active:
            if rule.builtin:
                insts.extend(_BUILTINS[rule.builtin](rule, out, path))
            else:
                insts.extend(rule_instances(rule, out, path))
        # applicability against the current store
        applicable = []
        for i in insts:
            if holds(out, path, i.cons):
                continue
            if not all(holds(out, path, a) for a in i.ants):
                continue
            absent = tuple(instantiate(p, i.binding) for p in i.rule.absent)
            if any(holds(out, path, a) for a in absent):
                continue
            applicable.append(i)
        if not applicable:
            break
        ok_alone = {
            i.key + i.rule.name: (i.rule.hard or out.consistent_with(path, (i.cons,)))
            for i in applicable
        }
        winners: list[tuple[_Inst, str]] = []
        noted_standoffs = set()
        for i in applicable:
            if i.rule.hard:
                winners.append((i, "Hard"))
                continue
            if not ok_alone[i.key + i.rule.name]:
                trace.note(
                    f"closure@{'/'.join(path) or 'root'}: {i.rule.name} {i.key} blocked,"
                    " consequent conflicts with the store"
                )
                continue
            contested = False
            defeated = False
            for j in applicable:
                if j is i or j.rule.hard or not ok_alone[j.key + j.rule.name]:
                    continue
                if out.consistent_with(path, (i.cons, j.cons)):
                    continue
                cmp = specificity(i.ants, j.ants, out, path)
                if cmp == "first":
                    contested = True
                elif cmp == "second":
                    defeated = True
                    trace.note(
                        f"closure@{'/'.join(path) or 'root'}: {i.rule.name} {i.key}"
                        f" defeated by more specific {j.rule.name} {j.key}"
                    )
                else:
                    defeated = True
                    pair = tuple(sorted((i.rule.name + i.key, j.rule.name + j.key)))
                    if pair not in noted_standoffs:
                        noted_standoffs.add(pair)
                        trace.note(
                            f"closure@{'/'.join(path) or 'root'}: sceptical stand-off between"
                            f" {i.rule.name} {i.key} and {j.rule.name} {j.key}; neither fires"
                        )
            if not defeated:
                winners.append((i, "Penguin" if contested else "DMP"))
        progressed = False
        for i, mode in sorted(winners, key=lambda t: (t[0].rule.name, t[0].key)):
            if holds(out, path, i.cons):
                continue
            if not i.rule.hard and not out.consistent_with(path, (i.cons,)):
                trace.note(
                    f"closure@{'/'.join(path) or 'root'}: {i.rule.name} {i.key} deferred,"
                    " conflicts with facts added earlier this round"
                )
                continue
            before = out.store_at(path).facts
            out = out.assert_fact(path, i.cons)
            added = tuple(f for f in out.store_at(path).facts if f not in before)
            step = trace.step(mode, i.rule.name, i.binding, added or conjuncts(i.cons))
            fired.append(step)
            if i.rule.absent:
                trace.note(
                    f"closure@{'/'.join(path) or 'root'}: {i.rule.name} fired with its negative"
                    " premise absent from the store (negation as absence)"
                )
            progressed = True
        if not progressed:
            break
    else:
        raise StepBoundExceeded(f"no fixpoint within {max_steps} rounds at path {path}")
    return ClosureResult(out, tuple(fired))


# -------------------------------------------------------------------- abduction


@dataclass(frozen=True)
class AbductionResult:
    rule: str
    binding: str
    hypothesis: tuple[Formula, ...]


def abduce(
    kb: KnowledgeBase,
    rule: DefaultRule,
    path: ContextPath = (),
    observed=(),
    *,
    pool=None,
    ctx: EvalContext | None = None,
    trace: Trace | None = None,
) -> tuple[AbductionResult, ...]:
    """Hypothesize missing abducible antecedent conjuncts of rule instances
    whose consequent already holds (or is among the observed formulas).

    An instance qualifies when at least one antecedent conjunct already holds
    (abduction needs some supporting evidence), every missing conjunct is
    abducible, and the hypothesis set is consistent with every store it would
    touch (hypotheses are mirrored into nested contexts for the check, so
    attributing not-B to an agent whose store contains B is rejected).
    """
    path = tuple(path)
    ctx = ctx or EvalContext()
    observed = tuple(observed)
    trace = trace if trace is not None else Trace()
    store = kb.store_at(path)
    facts_sorted = sorted(store.facts + observed, key=print_formula)
    pool_consts = tuple(sorted(kb.constants))

    bindings: list[Binding] = []
    seen = set()
    for f in facts_sorted:
        m = match(rule.consequent, f, {})
        if m is not None and _bind_key(m) not in seen:
            seen.add(_bind_key(m))
            bindings.append(m)
    for pat in rule.antecedent:
        bindings = _extend_bindings(pat, bindings, facts_sorted, pool_consts, pool)
        if not bindings:
            return ()

    results: list[AbductionResult] = []
    seen_hyp = set()
    for b in bindings:
        if pool and not _pool_confines(b, pool):
            continue
        try:
            ants = tuple(instantiate(p, b) for p in rule.antecedent)
            cons = instantiate(rule.consequent, b)
        except ValidationError:
            continue
        if not all(is_ground(a) for a in ants) or not is_ground(cons):
            continue
        if not (holds(kb, path, cons, ctx) or cons in observed):
            continue
        missing = [i for i, a in enumerate(ants) if not holds(kb, path, a, ctx)]
        if not missing or len(missing) == len(ants):
            continue
        if not set(missing) <= rule.abducible:
            continue
        hyp = tuple(ants[i] for i in missing)
        hyp_key = tuple(print_formula(h) for h in hyp)
        if hyp_key in seen_hyp:
            continue
        try:
            scratch = kb
            for h in hyp:
                scratch = scratch.assert_fact(path, h)
        except ValidationError:
            continue
        if not all(satcore.satisfiable(s.formulas()) for s in scratch.stores.values()):
            continue
        seen_hyp.add(hyp_key)
        results.append(AbductionResult(rule.name, _bind_key(b), hyp))
        trace.step("Abduction", rule.name, b, hyp)
    return tuple(results)
