"""Seeded instance generators.

All randomness comes from ``random.Random`` seeded with strings, which is
reproducible across platforms and Python versions.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional, Sequence

from .concepts import (
    And, Atom, BOT, Concept, Exists, Forall, Not, Or, TOP,
    count_full_existentials, count_unions,
)
from .syntax import KnowledgeBase, print_concept, print_knowledge_base

__all__ = [
    "GenSpec", "GenerationError", "generate", "render_instance",
    "atom_names", "role_names", "random_concept", "random_kb", "random_gcis",
]

MAX_ATOMS, MAX_ROLES, MAX_DEPTH = 8, 4, 6
MAX_ATTEMPTS = 1000


class GenerationError(ValueError):
    pass


def atom_names(n: int) -> list[str]:
    return [chr(ord("A") + i) for i in range(n)]


def role_names(n: int) -> list[str]:
    return [chr(ord("r") + i) for i in range(n)]


def _literal(rng: random.Random, atoms: Sequence[str]) -> Concept:
    a = Atom(rng.choice(atoms))
    return Not(a) if rng.random() < 0.5 else a


def random_concept(rng: random.Random, atoms: Sequence[str], roles: Sequence[str],
                   max_size: int = 40, max_depth: int = 4, p_and: float = 0.55) -> Concept:
    """A random NNF concept with at most ``max_size`` nodes and modal depth
    at most ``max_depth``; binary nodes are conjunctions with probability
    ``p_and``."""
    budget = rng.randint(1, max_size)

    def gen(budget: int, depth: int) -> Concept:
        if budget < 2 or (budget < 4 and rng.random() < 0.3):
            r = rng.random()
            if r < 0.06:
                return TOP
            if r < 0.09:
                return BOT
            # a negated atom takes two nodes
            return _literal(rng, atoms) if budget >= 2 else Atom(rng.choice(atoms))
        quant = bool(roles) and depth > 0
        r = rng.random()
        if quant and r < 0.4:
            role = rng.choice(roles)
            body = gen(budget - 1, depth - 1)
            if rng.random() < 0.1:
                body = TOP
            return (Exists if rng.random() < 0.5 else Forall)(role, body)
        if budget < 3:
            return _literal(rng, atoms) if budget == 2 else Atom(rng.choice(atoms))
        left = rng.randint(1, budget - 2)
        l, rr = gen(left, depth), gen(budget - 1 - left, depth)
        return And(l, rr) if rng.random() < p_and else Or(l, rr)

    return gen(budget, max_depth)


def random_gcis(rng: random.Random, atoms: Sequence[str], roles: Sequence[str],
                count: int, max_size: int = 7, max_depth: int = 2) -> list[tuple[Concept, Concept]]:
    return [(random_concept(rng, atoms, roles, max_size, max_depth),
             random_concept(rng, atoms, roles, max_size, max_depth))
            for _ in range(count)]


def random_kb(rng: random.Random, atoms: Sequence[str], roles: Sequence[str],
              n_defs: int, n_gcis: int, defined: Sequence[str] = ("D", "E", "F"),
              max_def_chain: int = 3, body_size: int = 7) -> KnowledgeBase:
    """Definitions of names from ``defined`` whose bodies may mention
    primitive atoms and names defined later in the list, so the chain of
    definitions is at most ``max_def_chain`` long."""
    names = list(defined[:min(n_defs, max_def_chain)])
    definitions = []
    for i, name in enumerate(names):
        pool = list(atoms) + names[i + 1:]
        definitions.append((name, random_concept(rng, pool, roles, body_size, 2)))
    gci_pool = list(atoms) + names
    return KnowledgeBase(tuple(definitions),
                         tuple(random_gcis(rng, gci_pool, roles, n_gcis)))


@dataclass(frozen=True)
class GenSpec:
    seed: int = 0
    atoms: int = 3
    roles: int = 2
    target_unions: int = 0
    target_existentials: int = 0
    max_depth: int = 3
    gci_count: int = 0
    def_count: int = 0

    def validate(self) -> None:
        if not 0 <= self.seed < 2 ** 64:
            raise GenerationError("seed must be a 64-bit unsigned integer")
        if not 1 <= self.atoms <= MAX_ATOMS:
            raise GenerationError(f"atoms must be in 1..{MAX_ATOMS}")
        if not 0 <= self.roles <= MAX_ROLES:
            raise GenerationError(f"roles must be in 0..{MAX_ROLES}")
        if not 0 <= self.max_depth <= MAX_DEPTH:
            raise GenerationError(f"max depth must be in 0..{MAX_DEPTH}")
        if min(self.target_unions, self.target_existentials, self.gci_count,
               self.def_count) < 0:
            raise GenerationError("targets must be non-negative")
        if self.target_existentials and (self.max_depth == 0 or self.roles == 0):
            raise GenerationError("existentials need max depth and roles of at least 1")
        if self.def_count > self.atoms:
            raise GenerationError("cannot define more atoms than the signature has")


def _skeleton(rng: random.Random, atoms, roles, depth: int, budget: int) -> Concept:
    """Union-free concept whose only existentials are ``some R. top``."""
    if budget <= 1 or rng.random() < 0.25:
        return _literal(rng, atoms)
    r = rng.random()
    if roles and depth > 0 and r < 0.45:
        role = rng.choice(roles)
        if r < 0.1:
            return Exists(role, TOP)
        return Forall(role, _skeleton(rng, atoms, roles, depth - 1, budget - 1))
    half = budget // 2
    return And(_skeleton(rng, atoms, roles, depth, half),
               _skeleton(rng, atoms, roles, depth, budget - 1 - half))


def _leaves(c: Concept, depth: int = 0, path: tuple = ()):
    """Literal leaves with their modal depth and child-index path."""
    if isinstance(c, (Atom, Not)):
        yield path, depth
    elif isinstance(c, (And, Or)):
        yield from _leaves(c.left, depth, path + (0,))
        yield from _leaves(c.right, depth, path + (1,))
    elif isinstance(c, Forall) or (isinstance(c, Exists) and c.filler is not TOP):
        yield from _leaves(c.filler, depth + 1, path + (0,))


def _replace(c: Concept, path: tuple, new: Concept) -> Concept:
    if not path:
        return new
    head, rest = path[0], path[1:]
    if isinstance(c, And):
        return And(_replace(c.left, rest, new), c.right) if head == 0 \
            else And(c.left, _replace(c.right, rest, new))
    if isinstance(c, Or):
        return Or(_replace(c.left, rest, new), c.right) if head == 0 \
            else Or(c.left, _replace(c.right, rest, new))
    return type(c)(c.role, _replace(c.filler, rest, new))


def _leaf_at(c: Concept, path: tuple) -> Concept:
    for step in path:
        c = c.children()[step]
    return c


def generate(spec: GenSpec) -> tuple[Concept, Optional[KnowledgeBase]]:
    """A concept whose union and full-existential counts equal the targets,
    plus a knowledge base when definitions or GCIs are requested."""
    spec.validate()
    atoms, roles = atom_names(spec.atoms), role_names(spec.roles)
    for attempt in range(MAX_ATTEMPTS):
        rng = random.Random(f"dlsat:{spec.seed}:{attempt}")
        c = _skeleton(rng, atoms, roles, spec.max_depth, 8)
        # each rewrite keeps the chosen leaf, so eligible spots never run out;
        # with no eligible leaf the new part is conjoined at the root
        for _ in range(spec.target_existentials):
            new = Exists(rng.choice(roles), _literal(rng, atoms))
            spots = [p for p, d in _leaves(c) if d < spec.max_depth]
            if not spots:
                c = And(c, new)
                continue
            path = rng.choice(spots)
            c = _replace(c, path, And(_leaf_at(c, path), new))
        for _ in range(spec.target_unions):
            spots = [p for p, _ in _leaves(c)]
            if not spots:
                c = And(c, Or(_literal(rng, atoms), _literal(rng, atoms)))
                continue
            path = rng.choice(spots)
            c = _replace(c, path, Or(_leaf_at(c, path), _literal(rng, atoms)))
        if (count_unions(c), count_full_existentials(c)) != \
                (spec.target_unions, spec.target_existentials):
            continue
        kb = None
        if spec.gci_count or spec.def_count:
            defined = atoms[:spec.def_count]
            primitive = atoms[spec.def_count:] or atoms[-1:]
            definitions = []
            for i, name in enumerate(defined):
                pool = [a for a in primitive if a not in defined] + list(defined[i + 1:])
                body = random_concept(rng, pool, roles, 6, 2) if pool else Exists(roles[0], TOP) \
                    if roles else TOP
                definitions.append((name, body))
            kb = KnowledgeBase(tuple(definitions),
                               tuple(random_gcis(rng, atoms, roles, spec.gci_count)))
        return c, kb
    raise GenerationError(f"no instance meeting the targets after {MAX_ATTEMPTS} attempts")


def render_instance(c: Concept, kb: Optional[KnowledgeBase]) -> tuple[str, Optional[str]]:
    return print_concept(c) + "\n", (print_knowledge_base(kb) if kb is not None else None)
