"""Segmented discourse structures: constituents, attachments, the right
frontier, coherence verdicts, and plan-anaphor resolution.

Attachment is always of a new constituent to an open one; relations are
recorded as directed atoms together with the formulas that justified them.
Coordinating relations close the node they attach to; subordinating relations
keep the parent on the right frontier, so later utterances may attach above.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import AmbiguousAntecedent, NoAntecedent, ValidationError
from .formulas import Formula, Plan, RelAtom, SiteToken
from .kb import KnowledgeBase

MOODS = ("assertion", "imperative")


@dataclass(frozen=True)
class Constituent:
    id: str
    content: Formula
    mood: str = "assertion"

    def __post_init__(self):
        if self.mood not in MOODS:
            raise ValidationError(f"unknown mood {self.mood!r}")


@dataclass(frozen=True)
class RelationRegistry:
    """Which relations subordinate, which transmit belief, and which may run
    against textual order."""

    subordinating: frozenset[str] = frozenset({"Evidence"})
    belief_property: frozenset[str] = frozenset({"Result", "Evidence"})
    reverse_capable: frozenset[str] = frozenset({"Evidence"})

    def is_subordinating(self, rel: str) -> bool:
        return rel in self.subordinating


def has_belief_property(rel: str, registry: RelationRegistry) -> bool:
    return rel in registry.belief_property


@dataclass(frozen=True)
class UpdateSite:
    """One update event: while tau holds, attach constituent `new` to the open
    constituent `attach_to`."""

    tau: str
    attach_to: str
    new: str

    def token(self) -> SiteToken:
        return SiteToken(self.tau, self.attach_to, self.new)


@dataclass(frozen=True)
class Attachment:
    parent: str
    child: str
    rel: RelAtom
    justification: tuple[Formula, ...] = ()


@dataclass(frozen=True)
class Sdrs:
    constituents: tuple[Constituent, ...] = ()
    attachments: tuple[Attachment, ...] = ()
    order: tuple[str, ...] = ()  # constituent ids, arrival order

    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.constituents)

    def constituent(self, cid: str) -> Constituent:
        for c in self.constituents:
            if c.id == cid:
                return c
        raise ValidationError(f"no constituent {cid!r}")

    def content(self, cid: str) -> Formula:
        return self.constituent(cid).content

    def relations(self) -> tuple[RelAtom, ...]:
        return tuple(a.rel for a in self.attachments)

    def with_constituent(self, c: Constituent) -> "Sdrs":
        if any(x.id == c.id for x in self.constituents):
            raise ValidationError(f"duplicate constituent id {c.id!r}")
        return replace(self, constituents=self.constituents + (c,), order=self.order + (c.id,))


def attach(
    s: Sdrs,
    site: UpdateSite,
    rel: RelAtom,
    justification: tuple[Formula, ...] = (),
) -> Sdrs:
    """Record a relation for a site.  The relation's arguments must be the
    site's two constituents (either direction)."""
    pair = {site.attach_to, site.new}
    if set(rel.args) != pair:
        raise ValidationError(
            f"relation {rel} does not connect site constituents {site.attach_to}, {site.new}"
        )
    for cid in pair:
        s.constituent(cid)  # must exist
    a = Attachment(site.attach_to, site.new, rel, tuple(justification))
    return replace(s, attachments=s.attachments + (a,))


def open_attachment_sites(s: Sdrs, registry: RelationRegistry) -> tuple[str, ...]:
    """The right frontier, most recent first: the last-arrived constituent,
    plus every constituent reachable from it upward through subordinating
    attachments."""
    if not s.order:
        return ()
    frontier = [s.order[-1]]
    cursor = 0
    while cursor < len(frontier):
        node = frontier[cursor]
        cursor += 1
        for a in s.attachments:
            if a.child == node and registry.is_subordinating(a.rel.rel) and a.parent not in frontier:
                frontier.append(a.parent)
    return tuple(frontier)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    diagnostics: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def coherent(s: Sdrs, kb: KnowledgeBase, registry: RelationRegistry) -> Verdict:
    """Every non-initial constituent must be attached by at least one relation,
    and all recorded relations and their justifications must be jointly
    satisfiable with the interpreter's store."""
    problems: list[str] = []
    attached = {a.child for a in s.attachments} | {a.parent for a in s.attachments}
    for cid in s.order[1:]:
        if cid not in attached:
            problems.append(f"constituent {cid} has no discourse relation")
    payload: list[Formula] = []
    for a in s.attachments:
        payload.append(a.rel)
        payload.extend(a.justification)
    if payload and not kb.jointly_consistent_with(payload):
        problems.append("recorded relations and their justifications contradict the store")
    return Verdict(not problems, tuple(problems))


def resolve_plan_anaphor(
    s: Sdrs,
    registry: RelationRegistry,
    provenance: dict[Plan, str],
) -> tuple[Plan, str]:
    """Resolve a plan-valued anaphor ("that way") to the unique intended plan
    whose provenance constituent sits on the right frontier.  Returns the plan
    and its provenance constituent."""
    frontier = open_attachment_sites(s, registry)
    candidates = [(p, cid) for p, cid in provenance.items() if cid in frontier]
    if not candidates:
        raise NoAntecedent("no intended plan is accessible from the right frontier")
    if len(candidates) > 1:
        names = ", ".join(f"{p} (from {cid})" for p, cid in candidates)
        raise AmbiguousAntecedent(f"more than one accessible plan: {names}")
    return candidates[0]
