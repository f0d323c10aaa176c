"""ALC concept syntax trees, normal forms and syntactic measures.

Concepts are hash-consed: two structurally equal concepts are the same
object, so ``==``, ``hash`` and set membership are identity operations.
Anything that needs a reproducible order sorts by :attr:`Concept.key`.
"""
from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

__all__ = [
    "Concept", "Atom", "Top", "Bot", "Not", "And", "Or", "Exists", "Forall",
    "TOP", "BOT", "Signature", "FragmentClass",
    "conjunction", "disjunction", "is_nnf", "nnf", "subconcepts", "nodes",
    "count_unions", "count_full_existentials", "classify_fragment",
    "signature_of", "names_of", "sort_concepts",
]

_table: "weakref.WeakValueDictionary[tuple, Concept]" = weakref.WeakValueDictionary()
_lock = threading.Lock()

# printer precedence levels
_DISJ, _CONJ, _UNARY = 0, 1, 2


class Concept:
    """Base class of the concept AST.  Instances are immutable and interned."""

    __slots__ = ("size", "depth", "_key", "__weakref__")

    size: int
    depth: int

    def __setattr__(self, name, value):
        raise AttributeError("concepts are immutable")

    @property
    def key(self) -> str:
        """Canonical text, used as the deterministic sort key."""
        k = self._key
        if k is None:
            k = _render(self, _DISJ)
            object.__setattr__(self, "_key", k)
        return k

    def __lt__(self, other: "Concept") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return self.key

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.key}>"

    def children(self) -> tuple["Concept", ...]:
        return ()


def _intern(cls, key, init):
    with _lock:
        obj = _table.get(key)
        if obj is None:
            obj = object.__new__(cls)
            object.__setattr__(obj, "_key", None)
            for name, value in init.items():
                object.__setattr__(obj, name, value)
            _table[key] = obj
        return obj


class Atom(Concept):
    __slots__ = ("name",)
    __match_args__ = ("name",)
    name: str

    def __new__(cls, name: str):
        return _intern(cls, ("A", name), {"name": name, "size": 1, "depth": 0})

    def __reduce__(self):
        return (Atom, (self.name,))


class Top(Concept):
    __slots__ = ()

    def __new__(cls):
        return _intern(cls, ("T",), {"size": 1, "depth": 0})

    def __reduce__(self):
        return (Top, ())


class Bot(Concept):
    __slots__ = ()

    def __new__(cls):
        return _intern(cls, ("F",), {"size": 1, "depth": 0})

    def __reduce__(self):
        return (Bot, ())


class Not(Concept):
    __slots__ = ("arg",)
    __match_args__ = ("arg",)
    arg: Concept

    def __new__(cls, arg: Concept):
        return _intern(cls, ("!", id(arg)),
                       {"arg": arg, "size": arg.size + 1, "depth": arg.depth})

    def children(self):
        return (self.arg,)

    def __reduce__(self):
        return (Not, (self.arg,))


class _Binary(Concept):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")
    left: Concept
    right: Concept
    _tag = ""

    def __new__(cls, left: Concept, right: Concept):
        return _intern(cls, (cls._tag, id(left), id(right)), {
            "left": left, "right": right,
            "size": left.size + right.size + 1,
            "depth": max(left.depth, right.depth),
        })

    def children(self):
        return (self.left, self.right)

    def __reduce__(self):
        return (type(self), (self.left, self.right))


class And(_Binary):
    __slots__ = ()
    _tag = "&"


class Or(_Binary):
    __slots__ = ()
    _tag = "|"


class _Quantified(Concept):
    __slots__ = ("role", "filler")
    __match_args__ = ("role", "filler")
    role: str
    filler: Concept
    _tag = ""

    def __new__(cls, role: str, filler: Concept):
        return _intern(cls, (cls._tag, role, id(filler)), {
            "role": role, "filler": filler,
            "size": filler.size + 1, "depth": filler.depth + 1,
        })

    def children(self):
        return (self.filler,)

    def __reduce__(self):
        return (type(self), (self.role, self.filler))


class Exists(_Quantified):
    __slots__ = ()
    _tag = "E"


class Forall(_Quantified):
    __slots__ = ()
    _tag = "V"


TOP = Top()
BOT = Bot()


def _render(c: Concept, level: int) -> str:
    if isinstance(c, Atom):
        return c.name
    if c is TOP:
        return "top"
    if c is BOT:
        return "bot"
    if isinstance(c, Not):
        text = "!" + _render(c.arg, _UNARY)
        own = _UNARY
    elif isinstance(c, Exists):
        text = f"some {c.role}. " + _render(c.filler, _UNARY)
        own = _UNARY
    elif isinstance(c, Forall):
        text = f"only {c.role}. " + _render(c.filler, _UNARY)
        own = _UNARY
    elif isinstance(c, And):
        # right-associated: the left operand must not itself be a conjunction
        text = _render(c.left, _UNARY) + " & " + _render(c.right, _CONJ)
        own = _CONJ
    else:
        text = _render(c.left, _CONJ) + " | " + _render(c.right, _DISJ)
        own = _DISJ
    return text if own >= level else f"({text})"


@dataclass(frozen=True)
class Signature:
    """Concept, role and individual names, each kept sorted."""

    atomic_concepts: tuple[str, ...] = ()
    roles: tuple[str, ...] = ()
    individuals: tuple[str, ...] = ()

    def __post_init__(self):
        for field in ("atomic_concepts", "roles", "individuals"):
            object.__setattr__(self, field, tuple(sorted(set(getattr(self, field)))))
        a, r, o = map(set, (self.atomic_concepts, self.roles, self.individuals))
        if a & r or a & o or r & o:
            raise ValueError("signature name sets must be pairwise disjoint")

    def union(self, other: "Signature") -> "Signature":
        return Signature(self.atomic_concepts + other.atomic_concepts,
                         self.roles + other.roles,
                         self.individuals + other.individuals)


class FragmentClass(str, Enum):
    AL = "AL"
    ALE = "ALE"
    ALU = "ALU"
    ALC = "ALC"

    def __str__(self) -> str:
        return self.value


def conjunction(parts: Iterable[Concept]) -> Concept:
    """Right-associated conjunction; the empty conjunction is ``top``."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disjunction(parts: Iterable[Concept]) -> Concept:
    parts = list(parts)
    if not parts:
        return BOT
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def nodes(c: Concept) -> Iterator[Concept]:
    """Pre-order walk over every syntax-tree node (occurrences, not distinct)."""
    stack = [c]
    while stack:
        d = stack.pop()
        yield d
        stack.extend(reversed(d.children()))


def is_nnf(c: Concept) -> bool:
    return all(not isinstance(d, Not) or isinstance(d.arg, Atom) for d in nodes(c))


def nnf(c: Concept) -> Concept:
    """Push negations down to atoms.  Linear in the size of ``c``."""
    memo: dict[tuple[int, bool], Concept] = {}

    def go(d: Concept, neg: bool) -> Concept:
        k = (id(d), neg)
        hit = memo.get(k)
        if hit is not None:
            return hit
        match d:
            case Atom():
                out = Not(d) if neg else d
            case Top():
                out = BOT if neg else TOP
            case Bot():
                out = TOP if neg else BOT
            case Not(arg):
                out = go(arg, not neg)
            case And(l, r):
                out = Or(go(l, True), go(r, True)) if neg else And(go(l, False), go(r, False))
            case Or(l, r):
                out = And(go(l, True), go(r, True)) if neg else Or(go(l, False), go(r, False))
            case Exists(role, f):
                out = Forall(role, go(f, True)) if neg else Exists(role, go(f, False))
            case Forall(role, f):
                out = Exists(role, go(f, True)) if neg else Forall(role, go(f, False))
            case _:
                raise TypeError(f"not a concept: {d!r}")
        memo[k] = out
        return out

    return go(c, False)


def subconcepts(c: Concept) -> list[Concept]:
    """``c`` and all its syntactic subconcepts, deduplicated, in pre-order."""
    seen: dict[Concept, None] = {}
    for d in nodes(c):
        if d not in seen:
            seen[d] = None
    return list(seen)


def _require_nnf(c: Concept) -> None:
    if not is_nnf(c):
        raise ValueError(f"concept is not in negation normal form: {c}")


def count_unions(c: Concept) -> int:
    _require_nnf(c)
    return sum(isinstance(d, Or) for d in nodes(c))


def count_full_existentials(c: Concept) -> int:
    """Occurrences of ``some R. D`` with ``D`` not syntactically ``top``."""
    _require_nnf(c)
    return sum(isinstance(d, Exists) and d.filler is not TOP for d in nodes(c))


def classify_fragment(c: Concept) -> FragmentClass:
    unions = count_unions(c)
    full = count_full_existentials(c)
    if not unions and not full:
        return FragmentClass.AL
    if not unions:
        return FragmentClass.ALE
    if not full:
        return FragmentClass.ALU
    return FragmentClass.ALC


def names_of(c: Concept) -> tuple[set[str], set[str]]:
    atoms: set[str] = set()
    roles: set[str] = set()
    for d in nodes(c):
        if isinstance(d, Atom):
            atoms.add(d.name)
        elif isinstance(d, (Exists, Forall)):
            roles.add(d.role)
    return atoms, roles


def signature_of(*concepts: Concept) -> Signature:
    atoms: set[str] = set()
    roles: set[str] = set()
    for c in concepts:
        a, r = names_of(c)
        atoms |= a
        roles |= r
    return Signature(tuple(atoms), tuple(roles))


def sort_concepts(cs: Iterable[Concept]) -> list[Concept]:
    return sorted(cs, key=lambda d: d.key)
