"""Propositional encoding of empty-TBox ALC satisfiability, DPLL, DIMACS.

The encoding unrolls the tree of existential traces: one trace node per
sequence of existential concepts that can be expanded one after another
(modal depth strictly grows along a sequence), and one variable per trace
node and concept that can reach it.  Disjunctive choices are left to the
solver.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .concepts import (
    And, Atom, BOT, Concept, Exists, Forall, Not, Or, TOP, is_nnf, sort_concepts,
    subconcepts,
)

__all__ = [
    "TraceNode", "CnfFormula", "encode_trace_cnf", "solve_cnf",
    "export_dimacs", "parse_dimacs", "evaluate_cnf",
]


@dataclass(frozen=True)
class TraceNode:
    """Path of existential occurrence numbers from the root trace node."""

    id: tuple[int, ...] = ()

    def child(self, occurrence: int) -> "TraceNode":
        return TraceNode(self.id + (occurrence,))

    def __str__(self) -> str:
        return "/".join(["e"] + [str(o) for o in self.id])


@dataclass
class CnfFormula:
    num_vars: int
    clauses: list[tuple[int, ...]]
    var_meaning: dict[int, tuple[TraceNode, Concept]] = field(default_factory=dict)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def trace_nodes(self) -> list[TraceNode]:
        return sorted({node for node, _ in self.var_meaning.values()},
                      key=lambda n: (len(n.id), n.id))


def _local_closure(seed) -> set[Concept]:
    out: set[Concept] = set()
    stack = list(seed)
    while stack:
        d = stack.pop()
        if d in out:
            continue
        out.add(d)
        if isinstance(d, (And, Or)):
            stack += [d.left, d.right]
    return out


def encode_trace_cnf(c: Concept) -> CnfFormula:
    """CNF that is satisfiable iff the NNF concept ``c`` is.

    Limited existentials ``some R. top`` get trace nodes too: without them
    ``some r. top & only r. bot`` would look satisfiable.
    """
    if not is_nnf(c):
        raise ValueError(f"encode_trace_cnf requires a concept in NNF: {c}")
    occurrence = {e: n for n, e in enumerate(
        (d for d in sort_concepts(subconcepts(c)) if isinstance(d, Exists)), start=1)}

    relevant: dict[TraceNode, list[Concept]] = {}
    edges: dict[TraceNode, list[tuple[Exists, TraceNode]]] = {}
    frontier = [(TraceNode(), {c})]
    while frontier:
        nxt = []
        for node, seed in frontier:
            local = _local_closure(seed)
            relevant[node] = sort_concepts(local)
            edges[node] = []
            for e in relevant[node]:
                if not isinstance(e, Exists):
                    continue
                child = node.child(occurrence[e])
                succ = {e.filler} | {f.filler for f in local
                                     if isinstance(f, Forall) and f.role == e.role}
                edges[node].append((e, child))
                nxt.append((child, succ))
        frontier = nxt

    var: dict[tuple[TraceNode, Concept], int] = {}
    meaning: dict[int, tuple[TraceNode, Concept]] = {}
    for node in sorted(relevant, key=lambda n: (len(n.id), n.id)):
        for d in relevant[node]:
            if d is TOP:
                continue
            var[(node, d)] = len(var) + 1
            meaning[var[(node, d)]] = (node, d)

    clauses: list[tuple[int, ...]] = []

    def add(*lits: Optional[int]) -> None:
        # None stands for the constant true literal: the clause is satisfied
        if any(l is None for l in lits):
            return
        clause = tuple(dict.fromkeys(lits))
        clauses.append(clause)

    def x(node: TraceNode, d: Concept) -> Optional[int]:
        return None if d is TOP else var[(node, d)]

    root = TraceNode()
    if c is not TOP:
        add(x(root, c))
    for node, concepts in relevant.items():
        present = set(concepts)
        for d in concepts:
            if isinstance(d, And):
                add(-x(node, d), x(node, d.left))
                add(-x(node, d), x(node, d.right))
            elif isinstance(d, Or):
                add(-x(node, d), x(node, d.left), x(node, d.right))
            elif d is BOT:
                add(-x(node, d))
            elif isinstance(d, Not) and d.arg in present:
                add(-x(node, d.arg), -x(node, d))
        for e, child in edges[node]:
            add(-x(node, e), x(child, e.filler))
            for f in concepts:
                if isinstance(f, Forall) and f.role == e.role:
                    add(-x(node, e), -x(node, f), x(child, f.filler))
    return CnfFormula(len(var), clauses, meaning)


def evaluate_cnf(f: CnfFormula, assignment: dict[int, bool]) -> bool:
    return all(any(assignment[abs(l)] == (l > 0) for l in clause) for clause in f.clauses)


def solve_cnf(f: CnfFormula) -> Optional[dict[int, bool]]:
    """DPLL; a total satisfying assignment, or ``None`` if unsatisfiable."""
    lits = np.fromiter((l for clause in f.clauses for l in clause), dtype=np.int64)
    starts = np.zeros(len(f.clauses) + 1, dtype=np.int64)
    np.cumsum([len(clause) for clause in f.clauses], out=starts[1:])
    sat, value = _kernels.dpll(lits, starts, f.num_vars)
    if not sat:
        return None
    assignment = {v: bool(value[v] > 0) for v in range(1, f.num_vars + 1)}
    if not evaluate_cnf(f, assignment):  # pragma: no cover - solver self-check
        raise AssertionError("DPLL returned a non-satisfying assignment")
    return assignment


def export_dimacs(f: CnfFormula) -> str:
    lines = [f"c {v} {node} {concept.key}"
             for v, (node, concept) in sorted(f.var_meaning.items())]
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    lines += [" ".join(map(str, clause)) + " 0" for clause in f.clauses]
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    """Read clauses back from DIMACS text (comments are ignored)."""
    num_vars = None
    clauses: list[tuple[int, ...]] = []
    current: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            _, fmt, nv, _nc = line.split()
            if fmt != "cnf":
                raise ValueError(f"not a CNF header: {line}")
            num_vars = int(nv)
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if num_vars is None:
        raise ValueError("missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    return CnfFormula(num_vars, clauses)
