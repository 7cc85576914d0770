"""Scaling benchmark on artificially enlarged examples.

Both training examples of the ``java Run.java`` -> ``java Run`` repair are
enlarged by repeating their cmd, err and fix token lists ``n`` times.
"""

from __future__ import annotations

import gc
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterable, Optional

from .oracle import BudgetExceeded, nonlazy_synth
from .synthesis import Example, SynthConfig, synth_rules

BASE = [
    ("java Run.java", "Could not find or load main class Run.java", "java Run"),
    ("java Meta.java", "Could not find or load main class Meta.java", "java Meta"),
]


def repeated_examples(n: int) -> list[Example]:
    out = []
    for cmd, err, fix in BASE:
        e = Example.from_text(cmd, err, fix)
        out.append(Example(e.cmd * n, e.err * n, e.fix * n))
    return out


@dataclass
class BenchRow:
    size: int
    seconds: float
    nonlazy_seconds: Optional[float] = None
    nonlazy_complete: Optional[bool] = None


@contextmanager
def _no_gc():
    """Time like :mod:`timeit`: collect first, then keep the cyclic GC out of the measurement."""
    gc.collect()
    was = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was:
            gc.enable()


def time_lazy(n: int, cfg: SynthConfig = SynthConfig(), repeat: int = 3) -> float:
    es = repeated_examples(n)
    best = float("inf")
    for _ in range(repeat):
        with _no_gc():
            t0 = time.perf_counter()
            rule = synth_rules(es, cfg)
            best = min(best, time.perf_counter() - t0)
        assert rule is not None
    return best


def time_nonlazy(n: int, cfg: SynthConfig = SynthConfig(), budget: Optional[float] = None) -> tuple[float, bool]:
    """Seconds taken and whether it finished; an unfinished run reports the budget it used."""
    es = repeated_examples(n)
    with _no_gc():
        t0 = time.perf_counter()
        try:
            nonlazy_synth(es, cfg, budget=budget)
        except BudgetExceeded:
            return time.perf_counter() - t0, False
        return time.perf_counter() - t0, True


def run_bench(
    sizes: Iterable[int],
    nonlazy: bool = False,
    cfg: SynthConfig = SynthConfig(),
    budget: Optional[float] = 30.0,
) -> list[BenchRow]:
    rows = []
    for n in sizes:
        row = BenchRow(n, time_lazy(n, cfg))
        if nonlazy:
            row.nonlazy_seconds, row.nonlazy_complete = time_nonlazy(n, cfg, budget)
        rows.append(row)
    return rows


def to_csv(rows: Iterable[BenchRow], nonlazy: bool = False) -> str:
    lines = ["size,seconds,nonlazy_seconds,nonlazy_complete" if nonlazy else "size,seconds"]
    for r in rows:
        if nonlazy:
            lines.append(f"{r.size},{r.seconds:.6f},{r.nonlazy_seconds:.6f},{int(bool(r.nonlazy_complete))}")
        else:
            lines.append(f"{r.size},{r.seconds:.6f}")
    return "\n".join(lines) + "\n"
