"""Learning several rules from one undifferentiated pile of examples.

Examples are grouped by shape (token counts of cmd, err and fix), then each
group is split by searching set partitions in ascending block count until
every block admits a single rule.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .synthesis import Example, SymbolicRule, SynthConfig, synth_rules

log = logging.getLogger(__name__)

Shape = tuple[int, int, int]


def example_key(e: Example) -> tuple:
    return (e.cmd, e.err, e.fix)


def group_by_shape(es: Sequence[Example]) -> dict[Shape, list[Example]]:
    groups: dict[Shape, list[Example]] = {}
    for e in es:
        groups.setdefault(e.shape, []).append(e)
    return {s: sorted(g, key=example_key) for s, g in sorted(groups.items())}


def _rgs_with_blocks(n: int, m: int) -> Iterator[list[int]]:
    """Restricted growth strings of length n using exactly m blocks, in lexicographic order."""
    a = [0] * n

    def rec(i: int, used: int) -> Iterator[list[int]]:
        if n - i < m - used:
            return
        if i == n:
            if used == m:
                yield a
            return
        for v in range(min(used + 1, m)):
            a[i] = v
            yield from rec(i + 1, max(used, v + 1))

    if n == 0:
        return
    a[0] = 0
    yield from rec(1, 1)


def enumerate_partitions(n: int) -> Iterator[list[list[int]]]:
    """Every set partition of range(n): fewest blocks first, lexicographic RGS order within."""
    if n < 1:
        raise ValueError("group size must be >= 1")
    for m in range(1, n + 1):
        for rgs in _rgs_with_blocks(n, m):
            blocks: list[list[int]] = [[] for _ in range(m)]
            for i, b in enumerate(rgs):
                blocks[b].append(i)
            yield blocks


@dataclass
class LearnResult:
    rules: list[SymbolicRule] = field(default_factory=list)
    blocks: list[list[Example]] = field(default_factory=list)
    assignment: dict[Example, int] = field(default_factory=dict)
    unexplained: list[Example] = field(default_factory=list)
    greedy_groups: list[Shape] = field(default_factory=list)

    def add(self, rule: SymbolicRule, block: list[Example]) -> None:
        self.rules.append(rule)
        self.blocks.append(block)
        for e in block:
            self.assignment[e] = len(self.rules) - 1


class _BlockSynth:
    """Memoised synthesis over index blocks of one sorted group."""

    def __init__(self, group: Sequence[Example], cfg: SynthConfig):
        self.group = group
        self.cfg = cfg
        self.cache: dict[tuple[int, ...], Optional[SymbolicRule]] = {}

    def __call__(self, block: Sequence[int]) -> Optional[SymbolicRule]:
        key = tuple(block)
        if key not in self.cache:
            self.cache[key] = synth_rules([self.group[i] for i in key], self.cfg)
        return self.cache[key]


def _exact(group: list[Example], cfg: SynthConfig) -> list[tuple[SymbolicRule, list[Example]]]:
    synth = _BlockSynth(group, cfg)
    for blocks in enumerate_partitions(len(group)):
        rules = []
        for block in blocks:
            r = synth(block)
            if r is None:
                break
            rules.append(r)
        else:
            return [(r, [group[i] for i in b]) for r, b in zip(rules, blocks)]
    raise AssertionError("the all-singletons partition always synthesizes")


def _greedy(group: list[Example], cfg: SynthConfig) -> list[tuple[SymbolicRule, list[Example]]]:
    synth = _BlockSynth(group, cfg)
    blocks: list[list[int]] = []
    for i in range(len(group)):
        for b in blocks:
            if synth(b + [i]) is not None:
                b.append(i)
                break
        else:
            blocks.append([i])
    return [(synth(b), [group[i] for i in b]) for b in blocks]


def learn_rules(
    es: Sequence[Example], cfg: SynthConfig = SynthConfig(), max_group: int = 10
) -> LearnResult:
    """Smallest set of rules per shape group (exact search up to ``max_group`` examples)."""
    result = LearnResult()
    for shape, group in group_by_shape(es).items():
        if len(group) > max_group:
            log.info("group %s has %d examples; using greedy partitioning", shape, len(group))
            result.greedy_groups.append(shape)
            found = _greedy(group, cfg)
        else:
            found = _exact(group, cfg)
        for rule, block in found:
            if rule is None:
                result.unexplained.extend(block)
            else:
                result.add(rule, block)
    return result
