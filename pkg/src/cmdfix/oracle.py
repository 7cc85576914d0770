"""Brute-force reference implementations.

Nothing here shares code with the synthesizer's candidate enumeration: the
oracle runs position expressions *forward* over a bounded universe and keeps
whatever evaluates to the right output, where the synthesizer inverts the
semantics.  It is used by the property tests and as the non-lazy baseline of
the scaling benchmark.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .dsl import L, R, Cpos, Ipos, PosExpr, SubLr, eval_pos, substr
from .synthesis import (
    CandidateSet,
    Example,
    FixedStr,
    SymbolicRule,
    SynthConfig,
    Var,
    var_affixes,
)


class BudgetExceeded(TimeoutError):
    """Raised when the eager baseline runs past its time budget."""


@dataclass(frozen=True)
class OracleBounds:
    max_abs_k: Optional[int] = None  # None: longest token in the examples
    max_abs_delta: int = 1

    def resolve(self, es: Sequence[Example]) -> "OracleBounds":
        if self.max_abs_k is not None:
            if self.max_abs_k < 1:
                raise ValueError("max_abs_k must be >= 1")
            return self
        k = max((len(t) for e in es for t in e.inputs + e.fix), default=1)
        return OracleBounds(max(k, 1), self.max_abs_delta)


def position_universe(s: str, b: OracleBounds) -> list[PosExpr]:
    k_max, d_max = b.max_abs_k, b.max_abs_delta
    ps: list[PosExpr] = [Ipos(k) for k in range(-k_max, k_max + 1)]
    for c in sorted(set(s)):
        for k in itertools.chain(range(-k_max, 0), range(1, k_max + 1)):
            for d in range(-d_max, d_max + 1):
                ps.append(Cpos(c, k, d))
    return ps


def _group_by_eval(ps: Iterable[PosExpr], strs: Sequence[str], d: str) -> dict[tuple, list[PosExpr]]:
    groups: dict[tuple, list[PosExpr]] = {}
    for p in ps:
        vec = tuple(eval_pos(p, s, d) for s in strs)
        if None not in vec:
            groups.setdefault(vec, []).append(p)
    return groups


def _landing_groups(bindings: tuple[str, ...], b: OracleBounds) -> tuple[dict, dict]:
    universe = position_universe(bindings[0], b)
    return _group_by_eval(universe, bindings, L), _group_by_eval(universe, bindings, R)


def _brute_column(
    bindings: tuple[str, ...],
    outputs: tuple[str, ...],
    b: OracleBounds,
    groups: Optional[tuple[dict, dict]] = None,
) -> dict[tuple[str, str], frozenset]:
    """All (left, right) -> {(pL, pR)} mapping every binding to its output.

    Pairs are checked through their evaluation vectors: a pair's behaviour on
    the examples depends only on where each side lands in each binding, so
    every position expression with the same landing vector is equivalent.
    """
    lefts, rights = groups or _landing_groups(bindings, b)
    t0 = outputs[0]
    found: dict[tuple[str, str], list] = {}
    for vl, pls in lefts.items():
        for vr, prs in rights.items():
            mids = [substr(s, jl, jr) for s, jl, jr in zip(bindings, vl, vr)]
            if None in mids:
                continue
            m0 = mids[0]
            # every (left, right) split of the first output around this middle
            for a in range(len(t0) - len(m0) + 1):
                z = a + len(m0)
                if t0[a:z] != m0:
                    continue
                left, right = t0[:a], t0[z:]
                if all(left + m + right == t for m, t in zip(mids, outputs)):
                    found.setdefault((left, right), []).extend(itertools.product(pls, prs))
    return {k: frozenset(v) for k, v in found.items()}


def brute_substrings(
    es: Sequence[Example],
    variables: Iterable[int],
    i: int,
    bounds: OracleBounds = OracleBounds(),
) -> set[SubLr]:
    b = bounds.resolve(es)
    outputs = tuple(e.fix[i] for e in es)
    found: set[SubLr] = set()
    for j in variables:
        bindings = tuple(e.inputs[j] for e in es)
        for (left, right), pairs in _brute_column(bindings, outputs, b).items():
            found.update(SubLr(pl, pr, left, right, j) for pl, pr in pairs)
    return found


def nonlazy_synth(
    es: Sequence[Example],
    cfg: SynthConfig = SynthConfig(),
    bounds: Optional[OracleBounds] = None,
    budget: Optional[float] = None,
) -> Optional[SymbolicRule]:
    """Eager synthesis: every input is a variable and every output a candidate set.

    Every (input, output) column is enumerated independently, like the lazy
    engine does for its variables; identical results are interned only to
    bound memory.  ``budget`` (seconds) raises :class:`BudgetExceeded` once
    exceeded.
    """
    if not es:
        raise ValueError("need at least one example")
    if len({e.shape for e in es}) != 1:
        return None
    deadline = None if budget is None else time.perf_counter() + budget
    b = (bounds or OracleBounds(max_abs_delta=cfg.max_offset)).resolve(es)
    ncmd = len(es[0].cmd)
    inputs = [tuple(e.inputs[j] for e in es) for j in range(len(es[0].inputs))]
    match = []
    for j, col in enumerate(inputs):
        pre, suf = var_affixes(col)
        match.append(Var(j, pre, suf, col))

    groups = [_landing_groups(col, b) for col in inputs]
    interned: dict[frozenset, frozenset] = {}
    fix = []
    for i in range(len(es[0].fix)):
        outputs = tuple(e.fix[i] for e in es)
        entries = {}
        for j, col in enumerate(inputs):
            if deadline is not None and time.perf_counter() > deadline:
                raise BudgetExceeded(f"non-lazy synthesis exceeded {budget}s")
            for (left, right), pairs in _brute_column(col, outputs, b, groups[j]).items():
                entries[j, left, right] = interned.setdefault(pairs, pairs)
        if entries:
            fix.append(CandidateSet(entries, outputs))
        elif len(set(outputs)) == 1:
            fix.append(FixedStr(outputs[0]))
        else:
            return None
    return SymbolicRule(tuple(match[:ncmd]), tuple(match[ncmd:]), tuple(fix), len(es))
