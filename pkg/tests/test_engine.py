"""Defeasible closure, specificity arbitration, lazy yields, abduction."""

from __future__ import annotations

import random

import pytest

import reference
from dicekit.engine import (
    DefaultRule,
    EvalContext,
    Trace,
    abduce,
    defeasible_closure,
    holds,
    make_rule,
    nonmon_yields,
    render_binding,
    rule_instances,
    specificity,
    yields_holds,
)
from dicekit.errors import StepBoundExceeded, ValidationError
from dicekit.formulas import (
    And,
    Att,
    Atom,
    Const,
    Eventually,
    Not,
    Yields,
    parse_formula,
    print_formula,
)
from dicekit.kb import KnowledgeBase


def kb_with(facts=(), hard=()):
    kb = KnowledgeBase()
    for f in facts:
        kb = kb.assert_fact((), parse_formula(f))
    for f in hard:
        kb = kb.add_hard_rule((), parse_formula(f))
    return kb


BIRD = make_rule("Bird", ["bird"], "fly")
PENGUIN = make_rule("Penguin", ["penguin"], "(not fly)")


# ----------------------------------------------------------------------- closure


def test_defeasible_modus_ponens():
    res = defeasible_closure(kb_with(["bird"]), (BIRD,))
    assert res.kb.entails((), Atom("fly"))
    assert [s.mode for s in res.steps] == ["DMP"]


def test_penguin_principle_prefers_the_specific_rule():
    kb = kb_with(["penguin"], hard=["(-> penguin bird)"])
    trace = Trace()
    res = defeasible_closure(kb, (BIRD, PENGUIN), trace=trace)
    assert res.kb.entails((), Not(Atom("fly")))
    assert not res.kb.entails((), Atom("fly"))
    assert [s.mode for s in res.steps] == ["Penguin"]
    assert any("defeated by more specific" in line for line in trace.lines())


def test_nixon_diamond_is_sceptical():
    kb = kb_with(["quaker", "republican"])
    rules = (
        make_rule("QuakersArePacifists", ["quaker"], "pacifist"),
        make_rule("RepublicansAreNot", ["republican"], "(not pacifist)"),
    )
    trace = Trace()
    res = defeasible_closure(kb, rules, trace=trace)
    assert not res.kb.entails((), Atom("pacifist"))
    assert not res.kb.entails((), Not(Atom("pacifist")))
    assert res.steps == ()
    assert any("sceptical stand-off" in line for line in trace.lines())


def test_hard_rules_fire_unconditionally():
    res = defeasible_closure(kb_with(["p"]), (make_rule("H", ["p"], "q", hard=True),))
    assert res.kb.has_fact((), Atom("q"))
    assert [s.mode for s in res.steps] == ["Hard"]


def test_blocked_default_leaves_the_store_alone():
    kb = kb_with(["p", "(not q)"])
    trace = Trace()
    res = defeasible_closure(kb, (make_rule("R", ["p"], "q"),), trace=trace)
    assert not res.kb.has_fact((), Atom("q"))
    assert any("blocked" in line for line in trace.lines())


def test_intra_round_deferral_then_block():
    # pairwise-consistent consequents that jointly trip a hard rule: the last
    # winner defers within the round and is blocked outright the next round
    kb = kb_with(["p"], hard=["(-> (and q r) (not s))"])
    rules = (
        make_rule("r1", ["p"], "q"),
        make_rule("r2", ["p"], "r"),
        make_rule("r3", ["p"], "s"),
    )
    trace = Trace()
    res = defeasible_closure(kb, rules, trace=trace)
    assert res.kb.entails((), Not(Atom("s")))
    assert not res.kb.has_fact((), Atom("s"))
    assert any("deferred" in line for line in trace.lines())
    assert any("blocked" in line for line in trace.lines())


def test_absent_premises_are_negation_as_absence():
    rule = make_rule("R", ["p"], "q", absent=("blocker",))
    trace = Trace()
    res = defeasible_closure(kb_with(["p"]), (rule,), trace=trace)
    assert res.kb.has_fact((), Atom("q"))
    assert any("negation as absence" in line for line in trace.lines())
    held_back = defeasible_closure(kb_with(["p", "blocker"]), (rule,))
    assert not held_back.kb.has_fact((), Atom("q"))


def test_root_scoped_rules_skip_nested_paths():
    kb = KnowledgeBase().assert_fact(("A",), Atom("bird"))
    res = defeasible_closure(kb, (BIRD,), ("A",))
    assert not res.kb.has_fact(("A",), Atom("fly"))
    # a store's own declared defaults always run there
    res2 = defeasible_closure(kb.with_default(("A",), BIRD), (), ("A",))
    assert res2.kb.has_fact(("A",), Atom("fly"))


def test_everywhere_scoped_rules_run_at_nested_paths():
    kb = KnowledgeBase().assert_fact(("A",), Atom("bird"))
    rule = make_rule("Bird", ["bird"], "fly", scope="everywhere")
    res = defeasible_closure(kb, (rule,), ("A",))
    assert res.kb.has_fact(("A",), Atom("fly"))


def test_chain_needs_a_quiet_round_to_certify_fixpoint():
    kb = kb_with(["p"])
    rules = (make_rule("r1", ["p"], "q"), make_rule("r2", ["q"], "r"))
    res = defeasible_closure(kb, rules, max_steps=3)
    assert res.kb.has_fact((), Atom("r"))
    with pytest.raises(StepBoundExceeded):
        defeasible_closure(kb, rules, max_steps=2)


def test_closure_is_order_invariant():
    kb = kb_with(["penguin", "quaker", "republican"], hard=["(-> penguin bird)"])
    rules = [
        BIRD,
        PENGUIN,
        make_rule("QuakersArePacifists", ["quaker"], "pacifist"),
        make_rule("RepublicansAreNot", ["republican"], "(not pacifist)"),
        make_rule("FlightlessSwim", ["(not fly)"], "swim"),
    ]
    want = {print_formula(f) for f in defeasible_closure(kb, rules).kb.facts_at(())}
    rng = random.Random(7)
    for _ in range(10):
        rng.shuffle(rules)
        got = {print_formula(f) for f in defeasible_closure(kb, rules).kb.facts_at(())}
        assert got == want


def test_closure_matches_reference_on_penguin_kb():
    kb = kb_with(["penguin"], hard=["(-> penguin bird)"])
    res = defeasible_closure(kb, (BIRD, PENGUIN))
    ref = reference.ref_closure(
        [Atom("penguin")],
        [parse_formula("(-> penguin bird)")],
        [
            reference.RefRule("Bird", (Atom("bird"),), Atom("fly")),
            reference.RefRule("Penguin", (Atom("penguin"),), Not(Atom("fly"))),
        ],
    )
    assert {print_formula(f) for f in res.kb.facts_at(())} == {print_formula(f) for f in ref}


# ------------------------------------------------------------------ instantiation


def test_rule_instances_enumerate_stored_facts():
    rule = make_rule("R", ["(p ?x)"], "(q ?x)")
    kb = kb_with(["(p a)", "(p b)"])
    insts = rule_instances(rule, kb, ())
    assert [i.key for i in insts] == ["{x=a}", "{x=b}"]
    assert [print_formula(i.cons) for i in insts] == ["(q a)", "(q b)"]


def test_rule_instances_fall_back_to_the_constant_pool_only_when_unmatched():
    rule = make_rule("R", ["(p ?x)"], "(q ?x)")
    kb = kb_with(["(p a)"]).with_constants(("a", "b", "c"))
    assert [i.key for i in rule_instances(rule, kb, ())] == ["{x=a}"]
    bare = kb_with(["seed"]).with_constants(("a", "b"))
    assert [i.key for i in rule_instances(rule, bare, ())] == ["{x=a}", "{x=b}"]


def test_intention_update_builtin_advances_plans():
    from dicekit.axioms import standard_axioms

    iu = standard_axioms()["IntentionUpdate"]
    kb = kb_with(["(I A (R (plan a b c)))", "(D (plan a))"])
    res = defeasible_closure(kb, (iu,))
    assert res.kb.has_fact((), parse_formula("(I A (R (plan b c)))"))
    assert res.kb.has_fact((), parse_formula("(not (I A (R (plan a))))"))
    # a non-prefix execution record licenses nothing
    off = defeasible_closure(kb_with(["(I A (R (plan a b)))", "(D (plan x))"]), (iu,))
    assert off.steps == ()
    # a fully executed plan leaves no suffix to intend
    done = defeasible_closure(kb_with(["(I A (R (plan a)))", "(D (plan a))"]), (iu,))
    assert done.steps == ()


# ------------------------------------------------------------------- specificity


def test_specificity_compares_antecedents_under_hard_rules():
    kb = kb_with([], hard=["(-> penguin bird)"])
    assert specificity((Atom("penguin"),), (Atom("bird"),), kb) == "first"
    assert specificity((Atom("bird"),), (Atom("penguin"),), kb) == "second"
    assert specificity((Atom("p"),), (Atom("p"),), kb) == "incomparable"
    assert specificity((Atom("p"),), (Atom("q"),), kb) == "incomparable"


# ------------------------------------------------------------------- lazy yields


def test_nonmon_yields_requires_novelty():
    kb = kb_with([], hard=["(-> penguin bird)"])
    rules = (BIRD, PENGUIN)
    assert nonmon_yields(kb, rules, (), Atom("bird"), Atom("fly"))
    assert nonmon_yields(kb, rules, (), Atom("penguin"), Not(Atom("fly")))
    assert not nonmon_yields(kb, rules, (), Atom("penguin"), Atom("fly"))
    primed = kb.assert_fact((), Atom("bird"))
    # fly already follows from the base store: no longer news
    assert not nonmon_yields(primed, rules, (), Atom("bird"), Atom("fly"))


def test_nonmon_yields_matches_reference():
    kb = kb_with([], hard=["(-> penguin bird)"])
    ref_rules = [
        reference.RefRule("Bird", (Atom("bird"),), Atom("fly")),
        reference.RefRule("Penguin", (Atom("penguin"),), Not(Atom("fly"))),
    ]
    hard = [parse_formula("(-> penguin bird)")]
    for phi, psi in [
        (Atom("bird"), Atom("fly")),
        (Atom("penguin"), Atom("fly")),
        (Atom("penguin"), Not(Atom("fly"))),
        (Atom("fly"), Atom("bird")),
    ]:
        assert nonmon_yields(kb, (BIRD, PENGUIN), (), phi, psi) == reference.ref_nonmon_yields(
            [], hard, ref_rules, phi, psi
        )


def test_holds_discharges_eventualities_and_conjunctions():
    kb = kb_with(["p", "q"])
    assert holds(kb, (), Eventually(Atom("p")))
    assert holds(kb, (), And((Eventually(Atom("p")), Atom("q"))))
    assert not holds(kb, (), Eventually(Atom("r")))


def test_attributed_yields_evaluates_in_the_nested_store():
    rule = make_rule("Bird", ["bird"], "fly", scope="everywhere")
    kb = KnowledgeBase().assert_fact((), Atom("seed"))
    ctx = EvalContext(rules=(rule,))
    clause = Att("B", "A", Yields(Atom("bird"), Atom("fly")))
    assert holds(kb, (), clause, ctx)
    assert not holds(kb, (), clause)  # no context, no hypothetical reasoning


def test_yields_results_are_memoized_per_context():
    rule = make_rule("Bird", ["bird"], "fly", scope="everywhere")
    kb = KnowledgeBase().assert_fact((), Atom("seed"))
    ctx = EvalContext(rules=(rule,))
    assert yields_holds(kb, (), Atom("bird"), Atom("fly"), ctx)
    # the memo assumes an unchanged store: the stale answer survives asserts
    primed = kb.assert_fact((), Atom("bird"))
    assert yields_holds(primed, (), Atom("bird"), Atom("fly"), ctx)
    assert not yields_holds(primed, (), Atom("bird"), Atom("fly"), EvalContext(rules=(rule,)))


def test_closure_matches_stored_yields_atoms_only():
    rule = make_rule("ry", ["(yields p q)"], "r")
    assert not defeasible_closure(kb_with(["p"]), (rule,)).kb.has_fact((), Atom("r"))
    primed = kb_with(["p", "(yields p q)"])
    assert defeasible_closure(primed, (rule,)).kb.has_fact((), Atom("r"))


# --------------------------------------------------------------------- abduction


def test_abduce_hypothesizes_missing_abducible_antecedents():
    rule = make_rule(
        "PS",
        ["(W A ?phi)", "(B A (not ?phi))", "(done ?x)"],
        "(goal ?x)",
        abducible=frozenset({0, 1}),
    )
    kb = kb_with(["(done d1)", "(goal d1)", "(W A happy)"])
    results = abduce(kb, rule, ())
    assert len(results) == 1
    assert [print_formula(h) for h in results[0].hypothesis] == ["(B A (not happy))"]


def test_abduce_needs_some_evidence_and_something_to_add():
    rule = make_rule("R", ["w", "b"], "c", abducible=frozenset({0, 1}))
    nothing_held = kb_with(["c"])
    assert abduce(nothing_held, rule, ()) == ()
    all_held = kb_with(["c", "w", "b"])
    assert abduce(all_held, rule, ()) == ()


def test_abduce_respects_the_abducible_mask():
    rule = make_rule("R", ["w", "b"], "c", abducible=frozenset({0}))
    kb = kb_with(["c", "w"])  # missing conjunct b is not abducible
    assert abduce(kb, rule, ()) == ()


def test_abduce_rejects_hypotheses_inconsistent_with_any_store():
    rule = make_rule("R", ["e", "(B A (not p))"], "c", abducible=frozenset({1}))
    kb = kb_with(["e", "c"]).assert_fact(("A",), Atom("p"))
    assert abduce(kb, rule, ()) == ()
    ok = kb_with(["e", "c"])
    assert len(abduce(ok, rule, ())) == 1


def test_abduce_pool_supplies_unbound_metavariables():
    rule = make_rule(
        "R", ["(W A ?phi)", "(done ?x)"], "(goal ?x)", abducible=frozenset({0})
    )
    kb = kb_with(["(done d1)", "(goal d1)"])
    assert abduce(kb, rule, ()) == ()  # nothing supplies ?phi
    pool = {"phi": (Atom("p"), Atom("q"))}
    results = abduce(kb, rule, (), pool=pool)
    assert sorted(print_formula(r.hypothesis[0]) for r in results) == ["(W A p)", "(W A q)"]


def test_abduce_pool_confines_bound_metavariables():
    rule = make_rule(
        "R", ["(W A ?phi)", "(done ?x)"], "(goal ?x)", abducible=frozenset({0})
    )
    kb = kb_with(["(done d1)", "(goal d1)", "(W A r)"])
    # ?phi matches the stored want, which the pool does not sanction
    assert abduce(kb, rule, (), pool={"phi": (Atom("p"),)}) == ()


def test_abduce_accepts_observed_consequents():
    rule = make_rule("R", ["w", "b"], "c", abducible=frozenset({1}))
    kb = kb_with(["w"])
    results = abduce(kb, rule, (), observed=(Atom("c"),))
    assert len(results) == 1
    assert [print_formula(h) for h in results[0].hypothesis] == ["b"]


def test_abduce_traces_its_steps():
    rule = make_rule("R", ["w", "b"], "c", abducible=frozenset({1}))
    trace = Trace()
    abduce(kb_with(["w", "c"]), rule, (), trace=trace)
    assert [s.mode for s in trace.steps()] == ["Abduction"]


# ------------------------------------------------------------------ rule hygiene


def test_rule_validation():
    with pytest.raises(ValidationError):
        DefaultRule("R", (Atom("p"),), Atom("q"), scope="nowhere")
    with pytest.raises(ValidationError):
        DefaultRule("R", (Atom("p"),), Atom("q"), abducible=frozenset({3}))


def test_trace_rendering():
    t = Trace()
    t.note("hello")
    step = t.step("DMP", "Bird", {}, (Atom("fly"),))
    assert step.line() == "step 1 DMP Bird {} => fly"
    assert t.lines() == ["hello", "step 1 DMP Bird {} => fly"]
    assert render_binding({"y": Atom("q"), "x": Const("a")}) == "{x=a, y=q}"
