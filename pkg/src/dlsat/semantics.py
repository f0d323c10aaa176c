"""Model theory: interpretations, concept extensions and finite model search.

This module is the ground truth the reasoning engines are tested against,
so it shares no code with them beyond the concept AST.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Optional, Union

import numpy as np

from . import _kernels
from .concepts import (
    And, Atom, Bot, Concept, Exists, Forall, Not, Or, Top, names_of, nodes,
)
from .syntax import KnowledgeBase

__all__ = [
    "Interpretation", "Found", "NoModelUpTo", "eval_concept", "check_kb",
    "verify_model", "brute_force_sat", "ENUMERATION_BIT_LIMIT",
]

# enumerate exhaustively while the interpretation code fits in this many bits;
# larger domains go through the grounded SAT search
ENUMERATION_BIT_LIMIT = 20


@dataclass(frozen=True)
class Interpretation:
    domain: tuple[int, ...]
    atom_ext: Mapping[str, frozenset[int]] = field(default_factory=dict)
    role_ext: Mapping[str, frozenset[tuple[int, int]]] = field(default_factory=dict)
    individual_map: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.domain:
            raise ValueError("interpretation domain must be non-empty")
        dom = set(self.domain)
        for name, ext in self.atom_ext.items():
            if not set(ext) <= dom:
                raise ValueError(f"extension of {name} leaves the domain")
        for name, ext in self.role_ext.items():
            if any(a not in dom or b not in dom for a, b in ext):
                raise ValueError(f"extension of role {name} leaves the domain")

    def successors(self, role: str) -> dict[int, set[int]]:
        out: dict[int, set[int]] = {x: set() for x in self.domain}
        for a, b in self.role_ext.get(role, ()):
            out[a].add(b)
        return out

    def describe(self) -> str:
        lines = ["domain: " + " ".join(map(str, self.domain))]
        for name in sorted(self.atom_ext):
            lines.append(f"{name}: " + " ".join(map(str, sorted(self.atom_ext[name]))))
        for name in sorted(self.role_ext):
            pairs = sorted(self.role_ext[name])
            lines.append(f"{name}: " + " ".join(f"({a},{b})" for a, b in pairs))
        return "\n".join(lines)


def eval_concept(i: Interpretation, c: Concept) -> frozenset[int]:
    """The extension of ``c`` in ``i``.  Unknown names have empty extensions."""
    domain = frozenset(i.domain)
    succ_cache: dict[str, dict[int, set[int]]] = {}
    memo: dict[Concept, frozenset[int]] = {}

    def succ(role):
        if role not in succ_cache:
            succ_cache[role] = i.successors(role)
        return succ_cache[role]

    # children before parents
    order = list(nodes(c))
    for d in reversed(order):
        if d in memo:
            continue
        match d:
            case Atom(name):
                ext = frozenset(i.atom_ext.get(name, ())) & domain
            case Top():
                ext = domain
            case Bot():
                ext = frozenset()
            case Not(arg):
                ext = domain - memo[arg]
            case And(l, r):
                ext = memo[l] & memo[r]
            case Or(l, r):
                ext = memo[l] | memo[r]
            case Exists(role, f):
                fe = memo[f]
                s = succ(role)
                ext = frozenset(x for x in i.domain if s[x] & fe)
            case Forall(role, f):
                fe = memo[f]
                s = succ(role)
                ext = frozenset(x for x in i.domain if s[x] <= fe)
        memo[d] = ext
    return memo[c]


def check_kb(i: Interpretation, kb: KnowledgeBase) -> bool:
    for name, body in kb.definitions:
        if eval_concept(i, Atom(name)) != eval_concept(i, body):
            return False
    for lhs, rhs in kb.gcis:
        if not eval_concept(i, lhs) <= eval_concept(i, rhs):
            return False
    return True


def verify_model(i: Interpretation, c: Concept, kb: Optional[KnowledgeBase] = None) -> bool:
    """True iff ``i`` satisfies ``kb`` and gives ``c`` a non-empty extension."""
    return (kb is None or check_kb(i, kb)) and bool(eval_concept(i, c))


@dataclass(frozen=True)
class Found:
    interpretation: Interpretation

    @property
    def satisfiable(self) -> bool:
        return True


@dataclass(frozen=True)
class NoModelUpTo:
    bound: int

    @property
    def satisfiable(self) -> bool:
        return False


def _signature(c: Concept, kb: KnowledgeBase) -> tuple[list[str], list[str]]:
    atoms, roles = names_of(c)
    for d in kb.concepts():
        a, r = names_of(d)
        atoms |= a
        roles |= r
    atoms |= {name for name, _ in kb.definitions}
    return sorted(atoms), sorted(roles)


class _Program:
    """A concept and knowledge base compiled to bitmask instructions."""

    def __init__(self, c: Concept, kb: KnowledgeBase, atoms: list[str], roles: list[str]):
        atom_ix = {a: n for n, a in enumerate(atoms)}
        role_ix = {r: n for n, r in enumerate(roles)}
        reg: dict[Concept, int] = {}
        ops: list[tuple[int, int, int]] = []

        def compile_(root: Concept) -> int:
            for d in reversed(list(nodes(root))):
                if d in reg:
                    continue
                match d:
                    case Atom(name):
                        ins = (_kernels.OP_ATOM, atom_ix[name], 0)
                    case Top():
                        ins = (_kernels.OP_TOP, 0, 0)
                    case Bot():
                        ins = (_kernels.OP_BOT, 0, 0)
                    case Not(arg):
                        ins = (_kernels.OP_NOT, reg[arg], 0)
                    case And(l, r):
                        ins = (_kernels.OP_AND, reg[l], reg[r])
                    case Or(l, r):
                        ins = (_kernels.OP_OR, reg[l], reg[r])
                    case Exists(role, f):
                        ins = (_kernels.OP_EXISTS, reg[f], role_ix[role])
                    case Forall(role, f):
                        ins = (_kernels.OP_FORALL, reg[f], role_ix[role])
                reg[d] = len(ops)
                ops.append(ins)
            return reg[root]

        self.target = compile_(c)
        checks = []
        for name, body in kb.definitions:
            checks.append((_kernels.CHECK_EQUAL, compile_(Atom(name)), compile_(body)))
        for lhs, rhs in kb.gcis:
            checks.append((_kernels.CHECK_SUBSET, compile_(lhs), compile_(rhs)))
        arr = np.array(ops, dtype=np.int64).reshape(-1, 3)
        self.ops, self.arg1, self.arg2 = arr[:, 0].copy(), arr[:, 1].copy(), arr[:, 2].copy()
        ck = np.array(checks, dtype=np.int64).reshape(-1, 3)
        self.ck_kind, self.ck_a, self.ck_b = ck[:, 0].copy(), ck[:, 1].copy(), ck[:, 2].copy()

    def first(self, n_atoms: int, n_roles: int, d: int, start: int, stop: int) -> int:
        return _kernels.first_model(
            self.ops, self.arg1, self.arg2, self.target,
            self.ck_kind, self.ck_a, self.ck_b, n_atoms, n_roles, d, start, stop)


def _decode(code: int, atoms: list[str], roles: list[str], d: int) -> Interpretation:
    atom_ext = {a: frozenset(i for i in range(d) if code >> (p * d + i) & 1)
                for p, a in enumerate(atoms)}
    base = len(atoms) * d
    role_ext = {r: frozenset((i, j) for i in range(d) for j in range(d)
                             if code >> (base + (q * d + i) * d + j) & 1)
                for q, r in enumerate(roles)}
    return Interpretation(tuple(range(d)), atom_ext, role_ext)


def _enumerate(c, kb, atoms, roles, d) -> Optional[Interpretation]:
    bits = len(atoms) * d + len(roles) * d * d
    prog = _Program(c, kb, atoms, roles)
    code = prog.first(len(atoms), len(roles), d, 0, 1 << bits)
    return None if code < 0 else _decode(code, atoms, roles, d)


def _ground_search(c, kb, atoms, roles, d) -> Optional[Interpretation]:
    """Propositional grounding of the semantics over a fixed domain of size d.

    By symmetry of the domain, element 0 is required to be an instance of c.
    """
    from pysat.solvers import Solver

    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0]

    atom_var = {(a, i): fresh() for a in atoms for i in range(d)}
    role_var = {(r, i, j): fresh() for r in roles for i in range(d) for j in range(d)}
    true = fresh()
    clauses: list[list[int]] = [[true]]
    lit: dict[tuple[Concept, int], int] = {}

    def define_and(parts: list[int]) -> int:
        v = fresh()
        for p in parts:
            clauses.append([-v, p])
        clauses.append([v] + [-p for p in parts])
        return v

    def define_or(parts: list[int]) -> int:
        v = fresh()
        for p in parts:
            clauses.append([v, -p])
        clauses.append([-v] + parts)
        return v

    def ground(root: Concept) -> None:
        for e in reversed(list(nodes(root))):
            if (e, 0) in lit:
                continue
            for i in range(d):
                match e:
                    case Atom(name):
                        x = atom_var[(name, i)]
                    case Top():
                        x = true
                    case Bot():
                        x = -true
                    case Not(arg):
                        x = -lit[(arg, i)]
                    case And(l, r):
                        x = define_and([lit[(l, i)], lit[(r, i)]])
                    case Or(l, r):
                        x = define_or([lit[(l, i)], lit[(r, i)]])
                    case Exists(role, f):
                        x = define_or([define_and([role_var[(role, i, j)], lit[(f, j)]])
                                       for j in range(d)])
                    case Forall(role, f):
                        x = define_and([define_or([-role_var[(role, i, j)], lit[(f, j)]])
                                        for j in range(d)])
                lit[(e, i)] = x

    ground(c)
    clauses.append([lit[(c, 0)]])
    for name, body in kb.definitions:
        ground(body)
        for i in range(d):
            a, b = atom_var[(name, i)], lit[(body, i)]
            clauses += [[-a, b], [a, -b]]
    for lhs, rhs in kb.gcis:
        ground(lhs)
        ground(rhs)
        for i in range(d):
            clauses.append([-lit[(lhs, i)], lit[(rhs, i)]])

    with Solver(name="cadical153", bootstrap_with=clauses) as solver:
        if not solver.solve():
            return None
        model = set(v for v in solver.get_model() if v > 0)
    atom_ext = {a: frozenset(i for i in range(d) if atom_var[(a, i)] in model) for a in atoms}
    role_ext = {r: frozenset((i, j) for i, j in product(range(d), repeat=2)
                             if role_var[(r, i, j)] in model) for r in roles}
    return Interpretation(tuple(range(d)), atom_ext, role_ext)


def brute_force_sat(c: Concept, kb: Optional[KnowledgeBase] = None, max_domain: int = 3,
                    method: str = "auto") -> Union[Found, NoModelUpTo]:
    """Search for a model of ``kb`` with a non-empty extension of ``c``.

    Domain sizes are tried in ascending order.  ``method="enumerate"`` scans
    every interpretation over the names of ``c`` and ``kb`` in a fixed order
    (atoms vary fastest) and returns the first model; ``"ground"`` decides
    each domain size with a propositional grounding; ``"auto"`` enumerates
    while the search space has at most :data:`ENUMERATION_BIT_LIMIT` bits.
    Every method is exhaustive for each size, so ``NoModelUpTo(n)`` means
    no model with at most ``n`` elements exists.
    """
    if max_domain < 1:
        raise ValueError("max_domain must be at least 1")
    if method not in ("auto", "enumerate", "ground"):
        raise ValueError(f"unknown method {method!r}")
    kb = kb if kb is not None else KnowledgeBase()
    atoms, roles = _signature(c, kb)
    for d in range(1, max_domain + 1):
        bits = len(atoms) * d + len(roles) * d * d
        if method == "enumerate" or (method == "auto" and bits <= ENUMERATION_BIT_LIMIT):
            if bits > 62:
                raise ValueError(f"{bits}-bit interpretation space is too large to enumerate")
            model = _enumerate(c, kb, atoms, roles, d)
        else:
            model = _ground_search(c, kb, atoms, roles, d)
        if model is not None:
            if not verify_model(model, c, kb):  # pragma: no cover - internal consistency
                raise AssertionError("model search returned a non-model")
            return Found(model)
    return NoModelUpTo(max_domain)
