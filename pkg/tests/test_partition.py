from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from cmdfix.dsl import Ipos, SubLr, eval_rule
from cmdfix.partition import enumerate_partitions, group_by_shape, learn_rules
from cmdfix.synthesis import rank_select, synth_rules

import gen
from corpus import MULTI, RUN_META

BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140]


def brute_partitions(n):
    """Set partitions of range(n) by repeatedly placing each element."""
    parts = [[]]
    for i in range(n):
        nxt = []
        for p in parts:
            for k in range(len(p)):
                nxt.append([b + [i] if j == k else b for j, b in enumerate(p)])
            nxt.append(p + [[i]])
        parts = nxt
    return parts


def canon(p):
    return tuple(sorted(tuple(b) for b in p))


@pytest.mark.parametrize("n", range(1, 9))
def test_partition_count_and_order(n):
    ps = list(enumerate_partitions(n))
    assert len(ps) == BELL[n]
    assert ps[0] == [list(range(n))]
    assert ps[-1] == [[i] for i in range(n)]
    sizes = [len(p) for p in ps]
    assert sizes == sorted(sizes)
    assert {canon(p) for p in ps} == {canon(p) for p in brute_partitions(n)}
    assert len({canon(p) for p in ps}) == len(ps)


def test_small_partitions():
    assert list(enumerate_partitions(1)) == [[[0]]]
    assert list(enumerate_partitions(3)) == [
        [[0, 1, 2]],
        [[0, 1], [2]],
        [[0, 2], [1]],
        [[0], [1, 2]],
        [[0], [1], [2]],
    ]
    with pytest.raises(ValueError):
        list(enumerate_partitions(0))


def test_group_by_shape():
    groups = group_by_shape(MULTI)
    assert list(groups) == [(2, 8, 2), (3, 8, 6)]
    assert set(groups[(2, 8, 2)]) == set(MULTI[:4])
    assert set(groups[(3, 8, 6)]) == set(MULTI[4:])
    assert group_by_shape([]) == {}
    assert list(group_by_shape(MULTI[:1]).values()) == [[MULTI[0]]]


def test_learn_multi():
    res = learn_rules(MULTI)
    assert len(res.rules) == 3
    assert {frozenset(b) for b in res.blocks} == {
        frozenset(MULTI[0:2]),
        frozenset(MULTI[2:4]),
        frozenset(MULTI[4:6]),
    }
    composer = res.rules[res.assignment[MULTI[2]]]
    assert rank_select(composer).fix[1] == SubLr(Ipos(0), Ipos(0), "", "", 8)
    assert res.unexplained == [] and res.greedy_groups == []


def test_learn_identical_examples():
    res = learn_rules([RUN_META[0], RUN_META[0]])
    assert len(res.rules) == 1 and len(res.blocks[0]) == 2


def check_result(es, res):
    assert sorted(map(gen_key, es)) == sorted(gen_key(e) for b in res.blocks for e in b)
    for rule, block in zip(res.rules, res.blocks):
        c = rank_select(rule)
        for e in block:
            assert eval_rule(c, e.cmd, e.err) == e.fix
            assert res.assignment[e] == res.rules.index(rule)


def gen_key(e):
    return (e.cmd, e.err, e.fix)


def random_pile(rng, n):
    """Examples drawn from one to three random rules, all of which are defined somewhere."""
    k = rng.randint(1, 3)
    rules = []
    while len(rules) < k:
        r = gen.rand_rule(rng)
        if gen.instance(rng, r) is not None:
            rules.append(r)
    es = []
    while len(es) < n:
        e = gen.instance(rng, rng.choice(rules))
        if e is not None:
            es.append(e)
    return es


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_coverage_and_minimality(seed):
    rng = random.Random(seed)
    es = random_pile(rng, rng.randint(1, 5))
    res = learn_rules(es)
    check_result(es, res)
    for shape, group in group_by_shape(es).items():
        used = sum(1 for b in res.blocks if b[0].shape == shape)
        # no partition with fewer blocks synthesizes everywhere
        for p in enumerate_partitions(len(group)):
            if len(p) >= used:
                break
            assert any(synth_rules([group[i] for i in b]) is None for b in p)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6))
def test_determinism_under_permutation(seed):
    rng = random.Random(seed)
    es = random_pile(rng, rng.randint(2, 5))
    a = learn_rules(es)
    shuffled = es[:]
    rng.shuffle(shuffled)
    b = learn_rules(shuffled)
    assert a.blocks == b.blocks
    assert [r.fix for r in a.rules] == [r.fix for r in b.rules]


def test_greedy_fallback():
    rng = random.Random(3)
    es = random_pile(rng, 6)
    res = learn_rules(es, max_group=2)
    check_result(es, res)
    assert res.greedy_groups
