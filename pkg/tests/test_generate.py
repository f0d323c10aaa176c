import random

import pytest
from hypothesis import given, settings, strategies as st

from dlsat.analysis import analyze
from dlsat.concepts import FragmentClass, count_full_existentials, count_unions, is_nnf
from dlsat.generate import (
    GenSpec, GenerationError, generate, random_concept, random_kb, render_instance,
)
from dlsat.syntax import check_acyclic, parse_concept, parse_knowledge_base


def test_targets_met_exactly():
    c, kb = generate(GenSpec(seed=1, target_unions=2, target_existentials=1))
    r = analyze(c)
    assert (r.union_count, r.full_existential_count) == (2, 1)
    assert kb is None


def test_zero_targets_give_al():
    for seed in range(20):
        c, _ = generate(GenSpec(seed=seed))
        assert analyze(c).fragment is FragmentClass.AL


def test_determinism():
    spec = GenSpec(seed=7, target_unions=3, target_existentials=2, gci_count=2, def_count=2)
    assert render_instance(*generate(spec)) == render_instance(*generate(spec))


def test_knowledge_base_targets():
    c, kb = generate(GenSpec(seed=3, atoms=4, gci_count=2, def_count=3))
    assert len(kb.gcis) == 2 and len(kb.definitions) == 3
    assert check_acyclic(kb.definitions) is None
    text = render_instance(c, kb)[1]
    assert parse_knowledge_base(text) == kb


@pytest.mark.parametrize("spec", [
    GenSpec(target_existentials=1, max_depth=0),
    GenSpec(target_existentials=1, roles=0),
    GenSpec(atoms=9),
    GenSpec(roles=5),
    GenSpec(max_depth=7),
    GenSpec(seed=-1),
    GenSpec(target_unions=-1),
    GenSpec(atoms=2, def_count=3),
])
def test_infeasible_specs(spec):
    with pytest.raises(GenerationError):
        generate(spec)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 8), st.integers(1, 4),
       st.integers(0, 6), st.integers(0, 6), st.integers(1, 6))
def test_generator_postcondition(seed, atoms, roles, unions, existentials, depth):
    c, _ = generate(GenSpec(seed, atoms, roles, unions, existentials, depth))
    assert is_nnf(c)
    assert count_unions(c) == unions
    assert count_full_existentials(c) == existentials
    assert c.depth <= depth
    assert parse_concept(render_instance(c, None)[0]) is c


def test_random_concept_respects_limits():
    for i in range(500):
        c = random_concept(random.Random(f"limits:{i}"), "ABC", "rs", 40, 4)
        assert c.size <= 40 and c.depth <= 4 and is_nnf(c)


def test_random_kb_is_acyclic():
    for i in range(200):
        rng = random.Random(f"kb:{i}")
        kb = random_kb(rng, "ABC", "rs", 3, 2)
        assert check_acyclic(kb.definitions) is None
        assert len(kb.gcis) == 2
