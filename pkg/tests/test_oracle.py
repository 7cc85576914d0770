from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from cmdfix.bench import repeated_examples
from cmdfix.dsl import Ipos, SubLr
from cmdfix.oracle import BudgetExceeded, OracleBounds, brute_substrings, nonlazy_synth
from cmdfix.synthesis import CandidateSet, Example, SynthConfig, apply_symbolic, synth_rules, synth_substrings

import gen
from corpus import AAAA_BBBB, RUN_META


def test_brute_aaaa_bbbb():
    assert len(brute_substrings(AAAA_BBBB, range(4), 0)) == 48


def test_brute_run_meta_matches_engine():
    brute = brute_substrings(RUN_META, {1}, 1)
    assert {(f.pl, f.pr) for f in brute} >= {(Ipos(0), Ipos(-5))}
    assert brute == set(synth_substrings(RUN_META, {1}, 1).expressions())


@given(st.text(alphabet="ab./", min_size=1, max_size=6), st.integers(0, 3))
def test_brute_contains_identity(t, j):
    inputs = ["x"] * 4
    inputs[j] = t
    e = Example(tuple(inputs[:2]), tuple(inputs[2:]), (t,))
    assert SubLr(Ipos(0), Ipos(0), "", "", j) in brute_substrings([e], {j}, 0)


def test_bounds_validation():
    with pytest.raises(ValueError):
        OracleBounds(max_abs_k=0).resolve(RUN_META)
    assert OracleBounds().resolve(RUN_META).max_abs_k == len("Meta.java")


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_engine_equals_oracle(seed):
    rng = random.Random(seed)
    es = gen.example_set(rng, rng.randint(1, 3))
    vs = [j for j in range(len(es[0].inputs)) if rng.random() < 0.7]
    i = rng.randrange(len(es[0].fix))
    d = rng.randint(0, 2)
    engine = set(synth_substrings(es, vs, i, SynthConfig(max_offset=d)).expressions())
    assert engine == brute_substrings(es, vs, i, OracleBounds(max_abs_delta=d))


def test_nonlazy_superset_on_run_meta():
    lazy = synth_rules(RUN_META)
    eager = nonlazy_synth(RUN_META)
    assert isinstance(eager.fix[0], CandidateSet)  # "java" is copied from input 0
    for j, entry in lazy.fix[1].entries.items():
        assert entry <= eager.fix[1].entries[j]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_nonlazy_agrees_on_training_inputs(seed):
    rng = random.Random(seed)
    es = gen.example_set(rng, rng.randint(2, 3))
    lazy, eager = synth_rules(es), nonlazy_synth(es)
    if lazy is None:
        return
    assert eager is not None
    for e in es:
        assert apply_symbolic(lazy, e.cmd, e.err) == e.fix == apply_symbolic(eager, e.cmd, e.err)


def test_nonlazy_mixed_shapes_fail():
    assert nonlazy_synth([RUN_META[0], AAAA_BBBB[0]]) is None


def test_nonlazy_budget():
    with pytest.raises(BudgetExceeded):
        nonlazy_synth(repeated_examples(8), budget=0.0)
