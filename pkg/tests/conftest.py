import itertools

from hypothesis import strategies as st

from dlsat.concepts import And, Atom, BOT, Bot, Exists, Forall, Not, Or, TOP, Top
from dlsat.semantics import Interpretation

ATOMS = ("A", "B", "C")
ROLES = ("r", "s")


def concepts(atoms=ATOMS, roles=ROLES, max_leaves=12, nnf_only=False):
    """Random concepts; with ``nnf_only`` negation sits on atoms only."""
    base = [Atom(a) for a in atoms] + [TOP, BOT]
    if nnf_only:
        base += [Not(Atom(a)) for a in atoms]
    leaves = st.sampled_from(base)

    def extend(children):
        options = [
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Exists, st.sampled_from(roles), children),
            st.builds(Forall, st.sampled_from(roles), children),
        ]
        if not nnf_only:
            options.append(st.builds(Not, children))
        return st.one_of(options)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


def naive_eval(i: Interpretation, c) -> frozenset:
    """Textbook recursive evaluation, kept independent of the library."""
    dom = frozenset(i.domain)

    def succ(role, x):
        return {b for a, b in i.role_ext.get(role, ()) if a == x}

    def go(d):
        if isinstance(d, Atom):
            return frozenset(i.atom_ext.get(d.name, ()))
        if isinstance(d, Top):
            return dom
        if isinstance(d, Bot):
            return frozenset()
        if isinstance(d, Not):
            return dom - go(d.arg)
        if isinstance(d, And):
            return go(d.left) & go(d.right)
        if isinstance(d, Or):
            return go(d.left) | go(d.right)
        inner = go(d.filler)
        if isinstance(d, Exists):
            return frozenset(x for x in dom if succ(d.role, x) & inner)
        return frozenset(x for x in dom if succ(d.role, x) <= inner)

    return go(c)


def all_interpretations(atoms, roles, d):
    """Every interpretation over ``range(d)`` for the given names."""
    dom = tuple(range(d))
    subsets = [frozenset(s) for n in range(d + 1) for s in itertools.combinations(dom, n)]
    pairs = list(itertools.product(dom, dom))
    rel_sets = [frozenset(p for p, bit in zip(pairs, bits) if bit)
                for bits in itertools.product((0, 1), repeat=len(pairs))]
    for exts in itertools.product(subsets, repeat=len(atoms)):
        for rels in itertools.product(rel_sets, repeat=len(roles)):
            yield Interpretation(dom, dict(zip(atoms, exts)), dict(zip(roles, rels)))
