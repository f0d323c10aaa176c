"""Tableau engines for ALC concept satisfiability.

``decide_alc`` is the trace-based two-phase procedure for the empty TBox:
phase I saturates one individual with the deterministic rules and resolves
``|`` choices as an OR, phase II applies the existential rule once per
instantiation as an AND, deleting the sibling existentials of the current
individual so that only a single trace is ever kept.

``decide_with_tboxes`` handles an acyclic definition part by lazy unfolding
and a general part by adding ``nnf(!C) | D`` to every node, with static
ancestor subset blocking.

Both are deterministic depth-first AND/OR searches: concepts are taken in
:attr:`Concept.key` order and fresh individuals are numbered from 0.
"""
from __future__ import annotations

import sys
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Union

from .concepts import (
    And, Atom, BOT, Concept, Exists, Forall, Not, Or, TOP, is_nnf, nnf,
)
from .semantics import Interpretation, eval_concept
from .syntax import KnowledgeBase, check_acyclic, definition_graph

__all__ = [
    "ConceptAssertion", "RoleAssertion", "Clash", "Assertion",
    "TreeNode", "CompletionState", "SearchStats", "SatResult",
    "decide_alc", "decide_with_tboxes", "extract_model",
]

SATISFIABLE = "satisfiable"
UNSATISFIABLE = "unsatisfiable"
_RECURSION_FLOOR = 20000


@dataclass(frozen=True)
class ConceptAssertion:
    individual: int
    concept: Concept


@dataclass(frozen=True)
class RoleAssertion:
    source: int
    target: int
    role: str


@dataclass(frozen=True)
class Clash:
    pass


Assertion = Union[ConceptAssertion, RoleAssertion, Clash]


@dataclass
class TreeNode:
    id: int
    label: frozenset[Concept]
    parent: Optional[int] = None
    role: Optional[str] = None
    depth: int = 0
    blocked_by: Optional[int] = None


@dataclass
class CompletionState:
    """A completed clash-free tree of individuals (the witness of a search).

    For the trace engine every individual's label is its saturated label,
    taken just before its existentials were expanded.
    """

    nodes: dict[int, TreeNode]
    next_fresh_individual: int
    definitions: tuple[tuple[str, Concept], ...] = ()
    clash: bool = False

    def assertions(self) -> set[Assertion]:
        out: set[Assertion] = {Clash()} if self.clash else set()
        for n in self.nodes.values():
            out.update(ConceptAssertion(n.id, c) for c in n.label)
            if n.parent is not None:
                out.add(RoleAssertion(n.parent, n.id, n.role))
        return out

    def children(self, node_id: int) -> list[TreeNode]:
        return [n for n in self.nodes.values() if n.parent == node_id]


@dataclass
class SearchStats:
    or_branch_points: int = 0
    exists_applications_max_per_trace: int = 0
    rule_counts: Counter = field(default_factory=Counter)
    max_depth: int = 0
    blocked_nodes: int = 0

    def as_dict(self) -> dict[str, int]:
        out = {
            "or_branch_points": self.or_branch_points,
            "exists_applications_max_per_trace": self.exists_applications_max_per_trace,
            "max_depth": self.max_depth,
            "blocked_nodes": self.blocked_nodes,
        }
        for rule in sorted(self.rule_counts):
            out[f"rule_{rule}"] = self.rule_counts[rule]
        return out


@dataclass
class SatResult:
    verdict: str
    witness: Optional[CompletionState]
    stats: SearchStats

    @property
    def satisfiable(self) -> bool:
        return self.verdict == SATISFIABLE


def _key(c: Concept) -> str:
    return c.key


def _clash(label: set[Concept]) -> bool:
    return any(isinstance(d, Not) and d.arg in label for d in label)


class _Search:
    """Shared AND/OR bookkeeping.

    ``or_branch_points`` counts ``|`` applications whose both alternatives
    were explored, summed along OR nodes and maximised over AND branches,
    i.e. as seen by one existential trace.
    """

    def __init__(self):
        self.stats = SearchStats()
        self.rules = self.stats.rule_counts
        self.fresh = 1

    def new_individual(self) -> int:
        y = self.fresh
        self.fresh += 1
        return y

    def saturate_and(self, label: set[Concept], fired: set[Concept]) -> None:
        todo = [d for d in label if isinstance(d, And) and d not in fired]
        while todo:
            d = todo.pop()
            if d in fired:
                continue
            fired.add(d)
            if d.left in label and d.right in label:
                continue
            self.rules["and"] += 1
            for part in (d.left, d.right):
                if part not in label:
                    label.add(part)
                    if isinstance(part, And):
                        todo.append(part)

    def pick_or(self, label: set[Concept], fired: set[Concept]) -> Optional[Or]:
        best = None
        for d in label:
            if isinstance(d, Or) and d not in fired and d.left not in label \
                    and d.right not in label:
                if best is None or d.key < best.key:
                    best = d
        return best

    def clashes(self, label: set[Concept]) -> bool:
        if BOT in label:
            return True
        if _clash(label):
            self.rules["bottom"] += 1
            return True
        return False


class _TraceSearch(_Search):
    def __init__(self, on_exists: Optional[Callable] = None):
        super().__init__()
        self.on_exists = on_exists

    def expand(self, x: int, label: set[Concept], fired: set[Concept], depth: int,
               full: int, parent: Optional[int], role: Optional[str]):
        """Saturate ``x`` (phase I) and continue with phase II.

        Returns ``(nodes or None, branch_points)``.
        """
        while True:
            self.saturate_and(label, fired)
            if self.clashes(label):
                return None, 0
            d = self.pick_or(label, fired)
            if d is None:
                break
            fired.add(d)
            self.rules["or"] += 1
            left, bp_left = self.expand(x, label | {d.left}, set(fired), depth, full,
                                        parent, role)
            if left is not None:
                return left, bp_left
            right, bp_right = self.expand(x, label | {d.right}, set(fired), depth, full,
                                          parent, role)
            return right, 1 + bp_left + bp_right

        me = TreeNode(x, frozenset(label), parent, role, depth)
        existentials = sorted((d for d in label if isinstance(d, Exists)), key=_key)
        out = [me]
        bp = 0
        for e in existentials:
            # each instantiation starts from the ABox as it was before phase II
            self.rules["exists"] += 1
            trace_full = full + (e.filler is not TOP)
            self.stats.exists_applications_max_per_trace = max(
                self.stats.exists_applications_max_per_trace, trace_full)
            y = self.new_individual()
            if self.on_exists is not None:
                kept = frozenset(d for d in label if not isinstance(d, Exists) or d is e)
                self.on_exists(x, e, kept)
            succ = {e.filler}
            for f in sorted((d for d in label if isinstance(d, Forall) and d.role == e.role),
                            key=_key):
                if f.filler not in succ:
                    self.rules["forall"] += 1
                    succ.add(f.filler)
            self.stats.max_depth = max(self.stats.max_depth, depth + 1)
            sub, sub_bp = self.expand(y, succ, set(), depth + 1, trace_full, x, e.role)
            bp = max(bp, sub_bp)
            if sub is None:
                return None, bp
            out.extend(sub)
        return out, bp


class _BlockingSearch(_Search):
    def __init__(self, kb: KnowledgeBase, on_exists: Optional[Callable] = None):
        super().__init__()
        self.on_exists = on_exists
        self.unfold = {name: nnf(body) for name, body in kb.definitions}
        self.unfold_neg = {name: nnf(Not(body)) for name, body in kb.definitions}
        self.gci_concepts = [Or(nnf(Not(lhs)), nnf(rhs)) for lhs, rhs in kb.gcis]

    def new_label(self, seed: set[Concept]) -> set[Concept]:
        label = set(seed)
        for g in self.gci_concepts:
            if g not in label:
                self.rules["gci"] += 1
                label.add(g)
        return label

    def saturate_local(self, label: set[Concept], fired: set[Concept]) -> None:
        changed = True
        while changed:
            self.saturate_and(label, fired)
            changed = False
            for d in list(label):
                if d in fired:
                    continue
                body = None
                if isinstance(d, Atom):
                    body = self.unfold.get(d.name)
                elif isinstance(d, Not) and isinstance(d.arg, Atom):
                    body = self.unfold_neg.get(d.arg.name)
                if body is None:
                    continue
                fired.add(d)
                if body not in label:
                    self.rules["unfold"] += 1
                    label.add(body)
                    changed = True

    def expand(self, x: int, label: set[Concept], fired: set[Concept], depth: int,
               full: int, ancestors: tuple, parent: Optional[int], role: Optional[str]):
        while True:
            self.saturate_local(label, fired)
            if self.clashes(label):
                return None, 0
            d = self.pick_or(label, fired)
            if d is None:
                break
            fired.add(d)
            self.rules["or"] += 1
            left, bp_left = self.expand(x, label | {d.left}, set(fired), depth, full,
                                        ancestors, parent, role)
            if left is not None:
                return left, bp_left
            right, bp_right = self.expand(x, label | {d.right}, set(fired), depth, full,
                                          ancestors, parent, role)
            return right, 1 + bp_left + bp_right

        frozen = frozenset(label)
        for anc_id, anc_label in reversed(ancestors):
            if frozen <= anc_label:
                self.stats.blocked_nodes += 1
                return [TreeNode(x, frozen, parent, role, depth, blocked_by=anc_id)], 0

        me = TreeNode(x, frozen, parent, role, depth)
        out = [me]
        bp = 0
        path = ancestors + ((x, frozen),)
        foralls = sorted((d for d in label if isinstance(d, Forall)), key=_key)
        for e in sorted((d for d in label if isinstance(d, Exists)), key=_key):
            if self.on_exists is not None:
                self.on_exists(frozen, tuple(lab for _, lab in ancestors))
            self.rules["exists"] += 1
            trace_full = full + (e.filler is not TOP)
            self.stats.exists_applications_max_per_trace = max(
                self.stats.exists_applications_max_per_trace, trace_full)
            y = self.new_individual()
            succ = {e.filler}
            for f in foralls:
                if f.role == e.role and f.filler not in succ:
                    self.rules["forall"] += 1
                    succ.add(f.filler)
            succ = self.new_label(succ)
            self.stats.max_depth = max(self.stats.max_depth, depth + 1)
            sub, sub_bp = self.expand(y, succ, set(), depth + 1, trace_full, path, x, e.role)
            bp = max(bp, sub_bp)
            if sub is None:
                return None, bp
            out.extend(sub)
        return out, bp


class _deep_recursion:
    def __enter__(self):
        self.old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(self.old, _RECURSION_FLOOR))

    def __exit__(self, *exc):
        sys.setrecursionlimit(self.old)


def _result(nodes, search: _Search, definitions=()) -> SatResult:
    if nodes is None:
        return SatResult(UNSATISFIABLE, None, search.stats)
    state = CompletionState({n.id: n for n in sorted(nodes, key=lambda n: n.id)},
                            search.fresh, tuple(definitions))
    return SatResult(SATISFIABLE, state, search.stats)


def decide_alc(c: Concept, on_exists: Optional[Callable] = None) -> SatResult:
    """Decide satisfiability of an NNF concept w.r.t. the empty TBox.

    ``on_exists(x, applied, label_of_x)`` is called after every existential
    rule application with the label the current ABox keeps for ``x``.
    """
    if not is_nnf(c):
        raise ValueError(f"decide_alc requires a concept in NNF: {c}")
    search = _TraceSearch(on_exists)
    with _deep_recursion():
        nodes, bp = search.expand(0, {c}, set(), 0, 0, None, None)
    search.stats.or_branch_points = bp
    return _result(nodes, search)


def decide_with_tboxes(c: Concept, kb: KnowledgeBase,
                       on_exists: Optional[Callable] = None) -> SatResult:
    """Decide satisfiability of an NNF concept w.r.t. ``kb``.

    ``on_exists(label, ancestor_labels)`` is called before every existential
    rule application.
    """
    if not is_nnf(c):
        raise ValueError(f"decide_with_tboxes requires a concept in NNF: {c}")
    cycle = check_acyclic(kb.definitions)
    if cycle is not None:
        raise ValueError("cyclic definitions: " + " -> ".join(cycle))
    names = [name for name, _ in kb.definitions]
    if len(set(names)) != len(names):
        raise ValueError("duplicate definitions")
    search = _BlockingSearch(kb, on_exists)
    with _deep_recursion():
        nodes, bp = search.expand(0, search.new_label({c}), set(), 0, 0, (), None, None)
    search.stats.or_branch_points = bp
    return _result(nodes, search, kb.definitions)


def _definition_order(definitions) -> Iterator[str]:
    graph = definition_graph(definitions)
    done: set[str] = set()

    def visit(name):
        if name in done or name not in graph:
            return
        done.add(name)
        for dep in graph[name]:
            yield from visit(dep)
        yield name

    for name in sorted(graph):
        yield from visit(name)


def extract_model(witness: CompletionState) -> Interpretation:
    """Turn an open completion tree into an interpretation.

    Blocked nodes are dropped and the edge into each of them is redirected
    to its blocker.  Primitive atoms hold exactly where asserted; defined
    atoms are interpreted by their definitions.
    """
    if witness.clash:
        raise ValueError("cannot extract a model from a clashing state")
    nodes = witness.nodes
    domain = tuple(n.id for n in nodes.values() if n.blocked_by is None)
    target = {n.id: (n.id if n.blocked_by is None else n.blocked_by) for n in nodes.values()}
    defined = {name for name, _ in witness.definitions}
    atom_ext: dict[str, set[int]] = {}
    for x in domain:
        for d in nodes[x].label:
            if isinstance(d, Atom) and d.name not in defined:
                atom_ext.setdefault(d.name, set()).add(x)
            elif isinstance(d, Not) and isinstance(d.arg, Atom):
                atom_ext.setdefault(d.arg.name, set())
    role_ext: dict[str, set[tuple[int, int]]] = {}
    for n in nodes.values():
        if n.parent is not None:
            role_ext.setdefault(n.role, set()).add((n.parent, target[n.id]))
    interp = Interpretation(domain, {a: frozenset(s) for a, s in atom_ext.items()},
                            {r: frozenset(s) for r, s in role_ext.items()},
                            {f"x{x}": x for x in domain})
    bodies = dict(witness.definitions)
    for name in _definition_order(witness.definitions):
        atom_ext[name] = set(eval_concept(interp, bodies[name]))
        interp = Interpretation(domain, {a: frozenset(s) for a, s in atom_ext.items()},
                                interp.role_ext, interp.individual_map)
    return interp
