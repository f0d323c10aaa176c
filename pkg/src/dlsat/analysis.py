"""Syntactic parameters, the impacted-concept closure and the GCI reduction."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable, Optional

from .concepts import (
    Atom, Concept, FragmentClass, Not, Or, TOP, classify_fragment, conjunction,
    count_full_existentials, count_unions, nnf, sort_concepts, subconcepts,
)
from .syntax import KnowledgeBase, check_acyclic

__all__ = [
    "ImpactedSet", "AnalysisReport", "impacted_concepts",
    "reduce_to_nearly_acyclic", "analyze", "fresh_name", "input_size",
    "NO_TBOX_REGIMES", "TBOX_REGIMES",
]

# parameter -> complexity of concept satisfiability without TBoxes
NO_TBOX_REGIMES = (
    ("none", "PSPACE-c"),
    ("unions", "para-co-NP-c"),
    ("existentials", "para-NP-c"),
    ("unions+existentials", "FPT"),
)
# parameter -> complexity w.r.t. an acyclic and a general TBox
TBOX_REGIMES = (
    ("none", "EXPTIME-c"),
    ("gcis", "para-EXPTIME-c"),
    ("impacted", "para-PSPACE-c"),
)
# classical complexity of the fragment a concept falls in (empty TBox)
FRAGMENT_COMPLEXITY = {
    FragmentClass.ALC: "PSPACE-c",
    FragmentClass.ALE: "co-NP-c",
    FragmentClass.ALU: "NP-c",
    FragmentClass.AL: "P",
}


@dataclass(frozen=True)
class ImpactedSet:
    concepts: tuple[Concept, ...]

    @property
    def size(self) -> int:
        return len(self.concepts)

    def __contains__(self, c: Concept) -> bool:
        return c in set(self.concepts)


@dataclass(frozen=True)
class AnalysisReport:
    union_count: int
    full_existential_count: int
    gci_count: int
    gci_symbol_size: int
    impacted_size: int
    fragment: FragmentClass
    regimes: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict:
        out = asdict(self)
        out["fragment"] = self.fragment.value
        out["regimes"] = [list(r) for r in self.regimes]
        return out


def impacted_concepts(kb: KnowledgeBase) -> ImpactedSet:
    """Least set containing both sides of every GCI, closed under
    subconcepts and under ``A in I, A == C in T1  =>  C in I``.
    """
    if check_acyclic(kb.definitions) is not None:
        raise ValueError("impacted concepts need an acyclic definition part")
    bodies = kb.definition_map
    found: dict[Concept, None] = {}
    queue: list[Concept] = []
    for lhs, rhs in kb.gcis:
        queue += [lhs, rhs]
    while queue:
        c = queue.pop(0)
        for d in subconcepts(c):
            if d in found:
                continue
            found[d] = None
            if isinstance(d, Atom) and d.name in bodies:
                queue.append(bodies[d.name])
    return ImpactedSet(tuple(sort_concepts(found)))


def fresh_name(taken: Iterable[str]) -> str:
    taken = set(taken)
    if "Fresh" not in taken:
        return "Fresh"
    n = 1
    while f"Fresh{n}" in taken:
        n += 1
    return f"Fresh{n}"


def reduce_to_nearly_acyclic(gcis, reserved: Iterable[str] = ()) -> tuple[KnowledgeBase, str]:
    """Fold a general TBox into one definition plus the single GCI ``top <= A``.

    ``A`` is defined as the conjunction of ``nnf(!C | D)`` over all GCIs
    ``C <= D``.  Names in ``reserved`` are avoided when choosing ``A``.
    """
    gcis = tuple(gcis.gcis if isinstance(gcis, KnowledgeBase) else gcis)
    source = KnowledgeBase((), gcis)
    fresh = fresh_name(set(source.signature.atomic_concepts) | set(reserved))
    body = conjunction(nnf(Or(Not(lhs), rhs)) for lhs, rhs in gcis)
    return KnowledgeBase(((fresh, body),), ((TOP, Atom(fresh)),)), fresh


def input_size(c: Concept, kb: Optional[KnowledgeBase] = None) -> int:
    """Total number of symbols in the concept and knowledge base."""
    return c.size + (kb.symbol_size() if kb is not None else 0)


def analyze(c: Concept, kb: Optional[KnowledgeBase] = None) -> AnalysisReport:
    kb = kb if kb is not None else KnowledgeBase()
    unions = count_unions(c)
    full = count_full_existentials(c)
    fragment = classify_fragment(c)
    impacted = impacted_concepts(kb)
    if kb.is_empty():
        regimes = (("fragment", FRAGMENT_COMPLEXITY[fragment]),) + NO_TBOX_REGIMES
    else:
        regimes = TBOX_REGIMES
    return AnalysisReport(
        union_count=unions,
        full_existential_count=full,
        gci_count=len(kb.gcis),
        gci_symbol_size=sum(l.size + r.size for l, r in kb.gcis),
        impacted_size=impacted.size,
        fragment=fragment,
        regimes=regimes,
    )
