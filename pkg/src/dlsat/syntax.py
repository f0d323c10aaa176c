"""Concept grammar, knowledge-base files and acyclicity checking.

Concept grammar::

    concept := disj
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary | "some" ROLE "." unary | "only" ROLE "." unary | atom
    atom    := ATOMNAME | "top" | "bot" | "(" concept ")"

Knowledge-base files hold one statement per line::

    def ATOM = concept
    gci concept <= concept
    # comment
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .concepts import (
    And, Atom, BOT, Concept, Exists, Forall, Not, Or, Signature, TOP,
    names_of, signature_of,
)

__all__ = [
    "KnowledgeBase", "ParseDiagnostic", "ParseError",
    "parse_concept", "parse_knowledge_base", "print_concept",
    "print_knowledge_base", "check_acyclic", "definition_graph", "make_kb",
]

KEYWORDS = frozenset({"top", "bot", "some", "only", "def", "gci"})
MAX_NESTING = 150

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\f\v]+)
  | (?P<sub><=)
  | (?P<punct>[!&|().=])
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
""", re.VERBOSE)


@dataclass(frozen=True)
class ParseDiagnostic:
    kind: str  # syntax-error | duplicate-definition | cyclic-definition | unknown-token
    line: int
    column: int
    message: str
    cycle_path: Optional[tuple[str, ...]] = None

    def __str__(self) -> str:
        text = f"{self.line}:{self.column}: {self.kind}: {self.message}"
        if self.cycle_path:
            text += " (" + " -> ".join(self.cycle_path + self.cycle_path[:1]) + ")"
        return text


class ParseError(ValueError):
    """Raised with a positioned :class:`ParseDiagnostic`."""

    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


@dataclass(frozen=True)
class KnowledgeBase:
    """An acyclic definition part plus a general GCI part."""

    definitions: tuple[tuple[str, Concept], ...] = ()
    gcis: tuple[tuple[Concept, Concept], ...] = ()
    signature: Signature = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "definitions", tuple(self.definitions))
        object.__setattr__(self, "gcis", tuple(self.gcis))
        inferred = signature_of(*self.concepts()).union(
            Signature(tuple(a for a, _ in self.definitions)))
        sig = inferred if self.signature is None else self.signature.union(inferred)
        object.__setattr__(self, "signature", sig)

    def concepts(self) -> list[Concept]:
        out = [body for _, body in self.definitions]
        for c, d in self.gcis:
            out += [c, d]
        return out

    @property
    def definition_map(self) -> dict[str, Concept]:
        return dict(self.definitions)

    def is_empty(self) -> bool:
        return not self.definitions and not self.gcis

    def symbol_size(self) -> int:
        """Total AST size of all statements, counting each defined name once."""
        return (sum(1 + body.size for _, body in self.definitions)
                + sum(c.size + d.size for c, d in self.gcis))


# -- tokenizer -------------------------------------------------------------

@dataclass(frozen=True)
class _Tok:
    kind: str  # "punct", "sub", "atom", "role", "kw", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str, line: int, col0: int = 1) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(ParseDiagnostic(
                "unknown-token", line, col0 + pos, f"unexpected character {text[pos]!r}"))
        kind = m.lastgroup
        word = m.group()
        if kind == "name":
            if word in KEYWORDS:
                kind = "kw"
            elif word[0].isupper():
                kind = "atom"
            else:
                kind = "role"
        if kind != "ws":
            toks.append(_Tok(kind, word, line, col0 + pos))
        pos = m.end()
    toks.append(_Tok("eof", "", line, col0 + len(text)))
    return toks


class _Parser:
    def __init__(self, toks: list[_Tok]):
        self.toks = toks
        self.i = 0
        self.nesting = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def next(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, tok: _Tok, expected: str) -> ParseError:
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(ParseDiagnostic(
            "syntax-error", tok.line, tok.col, f"expected {expected}, found {found}"))

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text or tok.kind not in ("punct", "sub", "kw"):
            raise self.fail(tok, repr(text))
        return tok

    def concept(self) -> Concept:
        parts = [self.conj()]
        while self.peek().text == "|" and self.peek().kind == "punct":
            self.next()
            parts.append(self.conj())
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = Or(p, out)
        return out

    def conj(self) -> Concept:
        parts = [self.unary()]
        while self.peek().text == "&" and self.peek().kind == "punct":
            self.next()
            parts.append(self.unary())
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = And(p, out)
        return out

    def unary(self) -> Concept:
        # prefix operators are collected iteratively so long chains don't recurse
        prefix: list[tuple[str, str]] = []
        while True:
            tok = self.peek()
            if tok.kind == "punct" and tok.text == "!":
                self.next()
                prefix.append(("!", ""))
            elif tok.kind == "kw" and tok.text in ("some", "only"):
                self.next()
                role = self.next()
                if role.kind != "role":
                    raise self.fail(role, "a role name")
                self.expect(".")
                prefix.append((tok.text, role.text))
            else:
                break
        out = self.atom()
        for op, role in reversed(prefix):
            if op == "!":
                out = Not(out)
            elif op == "some":
                out = Exists(role, out)
            else:
                out = Forall(role, out)
        return out

    def atom(self) -> Concept:
        tok = self.next()
        if tok.kind == "atom":
            return Atom(tok.text)
        if tok.kind == "kw" and tok.text == "top":
            return TOP
        if tok.kind == "kw" and tok.text == "bot":
            return BOT
        if tok.kind == "punct" and tok.text == "(":
            self.nesting += 1
            if self.nesting > MAX_NESTING:
                raise ParseError(ParseDiagnostic(
                    "syntax-error", tok.line, tok.col,
                    f"parentheses nested deeper than {MAX_NESTING}"))
            inner = self.concept()
            self.expect(")")
            self.nesting -= 1
            return inner
        raise self.fail(tok, "a concept")

    def finish(self) -> None:
        tok = self.peek()
        if tok.kind != "eof":
            raise self.fail(tok, "end of input")


def _parse_tokens(toks: list[_Tok]) -> Concept:
    p = _Parser(toks)
    c = p.concept()
    p.finish()
    return c


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def parse_concept(src: str) -> Concept:
    """Parse a concept; ``#`` comments and line breaks are allowed.

    >>> print_concept(parse_concept("A & some r. B"))
    'A & some r. B'
    """
    toks: list[_Tok] = []
    lines = src.replace("\r\n", "\n").split("\n")
    for n, line in enumerate(lines, start=1):
        toks.extend(_tokenize(_strip_comment(line), n)[:-1])
    last = lines[-1] if lines else ""
    toks.append(_Tok("eof", "", len(lines), len(last) + 1))
    return _parse_tokens(toks)


def print_concept(c: Concept) -> str:
    return c.key


# -- knowledge bases -------------------------------------------------------

def definition_graph(definitions: Sequence[tuple[str, Concept]]) -> dict[str, list[str]]:
    """Edges ``A -> B`` whenever atom ``B`` occurs in the body defining ``A``."""
    graph: dict[str, list[str]] = {}
    for name, body in definitions:
        atoms, _ = names_of(body)
        graph.setdefault(name, [])
        graph[name] = sorted(set(graph[name]) | atoms)
    return graph


def check_acyclic(definitions: Sequence[tuple[str, Concept]]) -> Optional[list[str]]:
    """Return ``None`` for an acyclic definition set, else a shortest cycle.

    Vertices are visited in lexicographic order; among cycles of minimum
    length the one through the lexicographically smallest start is returned.
    """
    graph = definition_graph(definitions)
    order = sorted(graph)

    # three-colour DFS decides existence
    colour = dict.fromkeys(order, 0)
    has_cycle = False
    for root in order:
        if colour[root]:
            continue
        colour[root] = 1
        stack = [(root, iter(graph[root]))]
        while stack and not has_cycle:
            v, it = stack[-1]
            for w in it:
                if w not in graph:
                    continue
                if colour[w] == 1:
                    has_cycle = True
                    break
                if colour[w] == 0:
                    colour[w] = 1
                    stack.append((w, iter(graph[w])))
                    break
            else:
                colour[v] = 2
                stack.pop()
        if has_cycle:
            break
    if not has_cycle:
        return None

    best: Optional[list[str]] = None
    for start in order:
        parent = {start: None}
        queue = deque([start])
        found = None
        while queue and found is None:
            v = queue.popleft()
            for w in graph[v]:
                if w == start:
                    found = v
                    break
                if w in graph and w not in parent:
                    parent[w] = v
                    queue.append(w)
        if found is None:
            continue
        path = []
        v = found
        while v is not None:
            path.append(v)
            v = parent[v]
        path.reverse()
        if best is None or len(path) < len(best):
            best = path
    return best


def parse_knowledge_base(src: str) -> KnowledgeBase:
    definitions: list[tuple[str, Concept]] = []
    def_lines: dict[str, int] = {}
    gcis: list[tuple[Concept, Concept]] = []
    for n, raw in enumerate(src.replace("\r\n", "\n").split("\n"), start=1):
        line = _strip_comment(raw)
        toks = _tokenize(line, n)
        head = toks[0]
        if head.kind == "eof":
            continue
        if head.kind == "kw" and head.text == "def":
            name = toks[1]
            if name.kind != "atom":
                raise _Parser(toks[1:]).fail(name, "an atom name")
            p = _Parser(toks[2:])
            p.expect("=")
            body = p.concept()
            p.finish()
            if name.text in def_lines:
                raise ParseError(ParseDiagnostic(
                    "duplicate-definition", n, name.col,
                    f"{name.text} is already defined on line {def_lines[name.text]}"))
            def_lines[name.text] = n
            definitions.append((name.text, body))
        elif head.kind == "kw" and head.text == "gci":
            p = _Parser(toks[1:])
            lhs = p.concept()
            tok = p.next()
            if tok.kind != "sub":
                raise p.fail(tok, "'<='")
            rhs = p.concept()
            p.finish()
            gcis.append((lhs, rhs))
        else:
            raise _Parser(toks).fail(head, "'def' or 'gci'")
    cycle = check_acyclic(definitions)
    if cycle is not None:
        line = def_lines[cycle[0]]
        raise ParseError(ParseDiagnostic(
            "cyclic-definition", line, 1,
            "cyclic definition of " + cycle[0], tuple(cycle)))
    return KnowledgeBase(tuple(definitions), tuple(gcis))


def print_knowledge_base(kb: KnowledgeBase) -> str:
    lines = [f"def {name} = {print_concept(body)}" for name, body in kb.definitions]
    lines += [f"gci {print_concept(c)} <= {print_concept(d)}" for c, d in kb.gcis]
    return "".join(line + "\n" for line in lines)


def make_kb(definitions: Iterable[tuple[str, Concept]] = (),
            gcis: Iterable[tuple[Concept, Concept]] = ()) -> KnowledgeBase:
    """Build a knowledge base, rejecting duplicate or cyclic definitions."""
    definitions = tuple(definitions)
    seen: set[str] = set()
    for name, _ in definitions:
        if name in seen:
            raise ValueError(f"duplicate definition of {name}")
        seen.add(name)
    cycle = check_acyclic(definitions)
    if cycle is not None:
        raise ValueError("cyclic definitions: " + " -> ".join(cycle))
    return KnowledgeBase(definitions, tuple(gcis))
