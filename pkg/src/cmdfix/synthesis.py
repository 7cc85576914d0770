"""Lazy version-space synthesis of repair rules from examples.

A :class:`SymbolicRule` keeps every input and output component constant until
an example disagrees with it.  Disagreeing inputs are promoted to variables
and disagreeing outputs to candidate sets of substring expressions over the
current variables.  Each component also stores its per-example bindings, so
the examples themselves never need to be kept around.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .dsl import (
    L,
    R,
    ConcreteRule,
    ConstStr,
    Cpos,
    FStr,
    Ipos,
    PosExpr,
    SubLr,
    VarMatch,
    display_names,
    eval_pos,
    eval_rule,
    show_fix,
    show_match,
    tokenize,
)


def _check_tokens(name: str, toks: Sequence[str]) -> tuple[str, ...]:
    toks = tuple(toks)
    for t in toks:
        if not isinstance(t, str) or not t or any(ch.isspace() for ch in t):
            raise ValueError(f"{name}: bad token {t!r}")
    return toks


@dataclass(frozen=True)
class Example:
    cmd: tuple[str, ...]
    err: tuple[str, ...]
    fix: tuple[str, ...]

    def __post_init__(self) -> None:
        for name in ("cmd", "err", "fix"):
            object.__setattr__(self, name, _check_tokens(name, getattr(self, name)))
        if not self.cmd:
            raise ValueError("command must have at least one token")
        if not self.fix:
            raise ValueError("fix must have at least one token")

    @classmethod
    def from_text(cls, cmd: str, err: str, fix: str) -> "Example":
        return cls(tokenize(cmd), tokenize(err), tokenize(fix))

    @property
    def inputs(self) -> tuple[str, ...]:
        return self.cmd + self.err

    @property
    def shape(self) -> tuple[int, int, int]:
        return len(self.cmd), len(self.err), len(self.fix)


@dataclass(frozen=True)
class SynthConfig:
    max_offset: int = 1

    def __post_init__(self) -> None:
        if self.max_offset < 0:
            raise ValueError("max_offset must be >= 0")


# --- symbolic components ---------------------------------------------------


@dataclass(frozen=True)
class FixedTok:
    s: str


@dataclass(frozen=True)
class Var:
    index: int
    prefix: str
    suffix: str
    bindings: tuple[str, ...]


MatchComponent = Union[FixedTok, Var]

Pair = tuple[PosExpr, PosExpr]
Key = tuple[int, str, str]  # (variable, left, right)


@dataclass(frozen=True, eq=True)
class CandidateSet:
    """Succinct set of substring expressions: ``(var, left, right) -> {(pL, pR)}``."""

    entries: Mapping[Key, frozenset] = field(default_factory=dict)
    bindings: tuple[str, ...] = ()

    __hash__ = None  # type: ignore[assignment]

    def __len__(self) -> int:
        return sum(len(v) for v in self.entries.values())

    def __bool__(self) -> bool:
        return any(self.entries.values())

    def expressions(self) -> Iterator[SubLr]:
        for (j, left, right), pairs in self.entries.items():
            for pl, pr in pairs:
                yield SubLr(pl, pr, left, right, j)

    def ranked(self) -> list[SubLr]:
        return sorted(self.expressions(), key=rank_key)


@dataclass(frozen=True)
class FixedStr:
    s: str


FixComponent = Union[FixedStr, CandidateSet]


@dataclass(frozen=True)
class SymbolicRule:
    cmd: tuple[MatchComponent, ...]
    err: tuple[MatchComponent, ...]
    fix: tuple[FixComponent, ...]
    count: int = 1

    __hash__ = None  # type: ignore[assignment]

    @property
    def shape(self) -> tuple[int, int, int]:
        return len(self.cmd), len(self.err), len(self.fix)

    @property
    def variables(self) -> set[int]:
        return {m.index for m in self.cmd + self.err if isinstance(m, Var)}

    @property
    def specificity(self) -> int:
        return sum(isinstance(m, FixedTok) for m in self.cmd + self.err)


# --- helpers ---------------------------------------------------------------


def common_prefix(strs: Iterable[str]) -> str:
    strs = list(strs)
    if not strs:
        return ""
    lo, hi = min(strs), max(strs)
    n = 0
    while n < min(len(lo), len(hi)) and lo[n] == hi[n]:
        n += 1
    return lo[:n]


def common_suffix(strs: Iterable[str]) -> str:
    return common_prefix(s[::-1] for s in strs)[::-1]


def var_affixes(bindings: Sequence[str]) -> tuple[str, str]:
    """Longest shared prefix and suffix, with the suffix cut back so both fit every binding."""
    pre = common_prefix(bindings)
    suf = common_suffix(bindings)
    room = min(len(b) for b in bindings) - len(pre)
    if len(suf) > room:
        suf = suf[len(suf) - room :] if room > 0 else ""
    return pre, suf


@lru_cache(maxsize=4096)
def _occurrence_ranks(s: str) -> tuple[tuple[int, int], ...]:
    """For each position p: (forward k, backward k) of s[p] among its occurrences."""
    seen: dict[str, list[int]] = {}
    for p, ch in enumerate(s):
        seen.setdefault(ch, []).append(p)
    out = [(0, 0)] * len(s)
    for occ in seen.values():
        n = len(occ)
        for o, p in enumerate(occ):
            out[p] = (o + 1, o - n)
    return tuple(out)


def position_encodings(s: str, x: int, d: str, max_offset: int) -> list[PosExpr]:
    """Every position expression (|delta| <= max_offset) evaluating to ``x`` on ``s``."""
    n = len(s)
    out: list[PosExpr] = []
    if x > 0:
        out.append(Ipos(x))
    if (d == L and x == 0) or (d == R and x == n):
        out.append(Ipos(0))
    if x < n:
        out.append(Ipos(x - n))
    ranks = _occurrence_ranks(s)
    for delta in range(-max_offset, max_offset + 1):
        p = x - delta
        if 0 <= p < n:
            fwd, bwd = ranks[p]
            out.append(Cpos(s[p], fwd, delta))
            out.append(Cpos(s[p], bwd, delta))
    return out


def _pos_rank(p: PosExpr) -> tuple:
    if isinstance(p, Ipos):
        return (0, abs(p.k), p.k < 0, 0, False, "")
    return (1, abs(p.k), p.k < 0, abs(p.delta), p.delta < 0, p.c)


def rank_key(f: SubLr) -> tuple:
    """Ranking order: lowest variable, then simplest positions, then (left, right)."""
    return (f.var, _pos_rank(f.pl), _pos_rank(f.pr), f.left, f.right)


def pair_key(pair: Pair) -> tuple:
    return (_pos_rank(pair[0]), _pos_rank(pair[1]))


# --- synthesis -------------------------------------------------------------


def const_rule(e: Example) -> SymbolicRule:
    return SymbolicRule(
        cmd=tuple(FixedTok(t) for t in e.cmd),
        err=tuple(FixedTok(t) for t in e.err),
        fix=tuple(FixedStr(t) for t in e.fix),
        count=1,
    )


def find_variables(
    ts: Sequence[str], ms: Sequence[MatchComponent], offset: int, count: int = 1
) -> Optional[tuple[tuple[MatchComponent, ...], set[int]]]:
    """Unify one more input list with the match components, promoting constants as needed.

    ``count`` is how many examples the components already summarize.
    """
    if len(ts) != len(ms):
        return None
    out: list[MatchComponent] = []
    variables: set[int] = set()
    for i, (t, m) in enumerate(zip(ts, ms)):
        if isinstance(m, FixedTok):
            if m.s == t:
                out.append(m)
                continue
            bindings = (m.s,) * count + (t,)
            index = offset + i
        else:
            bindings = m.bindings + (t,)
            index = m.index
        pre, suf = var_affixes(bindings)
        out.append(Var(index, pre, suf, bindings))
        variables.add(index)
    return tuple(out), variables


def _affix_splits(t: str, outputs: Sequence[str]) -> Iterator[tuple[str, str, str]]:
    """(left, middle, right) splits of ``t`` whose left/right are shared by all outputs."""
    max_pre = len(common_prefix(outputs))
    max_suf = len(common_suffix(outputs))
    n = len(t)
    for a in range(max_pre + 1):
        for b in range(min(max_suf, n - a) + 1):
            yield t[:a], t[a : n - b], t[n - b :]


def _find_all(s: str, sub: str) -> Iterator[int]:
    if not sub:
        yield from range(len(s) + 1)
        return
    k = s.find(sub)
    while k >= 0:
        yield k
        k = s.find(sub, k + 1)


def _enumerate_var(
    s: str, t: str, outputs: Sequence[str], j: int, max_offset: int
) -> dict[Key, set[Pair]]:
    entries: dict[Key, set[Pair]] = {}
    enc: dict[tuple[int, str], list[PosExpr]] = {}

    def encode(x: int, d: str) -> list[PosExpr]:
        if (x, d) not in enc:
            enc[x, d] = position_encodings(s, x, d, max_offset)
        return enc[x, d]

    for left, mid, right in _affix_splits(t, outputs):
        for k1 in _find_all(s, mid):
            k2 = k1 + len(mid)
            pairs = entries.setdefault((j, left, right), set())
            pairs.update(itertools.product(encode(k1, L), encode(k2, R)))
    return {k: v for k, v in entries.items() if v}


def all_substrings(
    e: Example,
    variables: Iterable[int],
    i: int,
    cfg: SynthConfig = SynthConfig(),
    outputs: Optional[Sequence[str]] = None,
) -> CandidateSet:
    """All substring expressions over ``variables`` that produce ``e.fix[i]`` on ``e``.

    ``outputs`` (default: just ``e.fix[i]``) restricts the constant left/right
    parts to those shared by every string in it.
    """
    t = e.fix[i]
    outputs = [t] if outputs is None else list(outputs)
    inputs = e.inputs
    entries: dict[Key, frozenset] = {}
    for j in sorted(variables):
        for key, pairs in _enumerate_var(inputs[j], t, outputs, j, cfg.max_offset).items():
            entries[key] = frozenset(pairs)
    return CandidateSet(entries, (t,))


def _filter_entries(
    entries: Mapping[Key, frozenset], e: Example, i: int
) -> dict[Key, frozenset]:
    """Keep the expressions that also produce ``e.fix[i]`` on ``e``."""
    t = e.fix[i]
    inputs = e.inputs
    out: dict[Key, frozenset] = {}
    pos_cache: dict[tuple[int, PosExpr, str], Optional[int]] = {}
    for (j, left, right), pairs in entries.items():
        if len(left) + len(right) > len(t) or not t.startswith(left) or not t.endswith(right):
            continue
        mid = t[len(left) : len(t) - len(right)]
        s = inputs[j]
        kept = []
        for pl, pr in pairs:
            a = pos_cache.get((j, pl, L), -1)
            if a == -1:
                a = pos_cache[j, pl, L] = eval_pos(pl, s, L)
            if a is None:
                continue
            b = pos_cache.get((j, pr, R), -1)
            if b == -1:
                b = pos_cache[j, pr, R] = eval_pos(pr, s, R)
            if b is None or not (a <= b <= len(s)):
                continue
            if s[a:b] == mid:
                kept.append((pl, pr))
        if kept:
            out[(j, left, right)] = frozenset(kept)
    return out


def synth_substrings(
    es: Sequence[Example], variables: Iterable[int], i: int, cfg: SynthConfig = SynthConfig()
) -> CandidateSet:
    """Substring expressions at output position ``i`` consistent with every example."""
    outputs = [e.fix[i] for e in es]
    cs = all_substrings(es[0], variables, i, cfg, outputs=outputs)
    entries = dict(cs.entries)
    for e in es[1:]:
        if not entries:
            break
        entries = _filter_entries(entries, e, i)
    return CandidateSet(entries, tuple(outputs))


def synth_fix(
    fix_tokens: Sequence[str],
    fix: Sequence[FixComponent],
    es: Sequence[Example],
    variables: set[int],
    cfg: SynthConfig = SynthConfig(),
    fresh: Optional[set[int]] = None,
) -> Optional[tuple[FixComponent, ...]]:
    """Refine the fix components against the newest example ``es[-1]``.

    With ``fresh`` given, existing candidate sets are only filtered against
    the newest example and enumeration runs for the ``fresh`` variables alone;
    otherwise every candidate set is rebuilt from all examples.
    """
    if len(fix_tokens) != len(fix):
        return None
    newest = es[-1]
    out: list[FixComponent] = []
    for i, (t, comp) in enumerate(zip(fix_tokens, fix)):
        if isinstance(comp, FixedStr) and comp.s == t:
            out.append(comp)
            continue
        if isinstance(comp, CandidateSet) and fresh is not None:
            entries = _filter_entries(comp.entries, newest, i)
            if fresh:
                extra = synth_substrings(es, fresh, i, cfg)
                entries.update(extra.entries)
            cs = CandidateSet(entries, comp.bindings + (t,))
        else:
            cs = synth_substrings(es, variables, i, cfg)
        if not cs:
            return None
        out.append(cs)
    return tuple(out)


def refine_rule(
    r: SymbolicRule,
    e: Example,
    cfg: SynthConfig = SynthConfig(),
    prior: Optional[Sequence[Example]] = None,
    incremental: bool = True,
) -> Optional[SymbolicRule]:
    """Make ``r`` consistent with one more example, or ``None`` if no rule can be."""
    fc = find_variables(e.cmd, r.cmd, 0, r.count)
    if fc is None:
        return None
    fe = find_variables(e.err, r.err, len(e.cmd), r.count)
    if fe is None:
        return None
    cmd, vc = fc
    err, ve = fe
    variables = vc | ve
    if prior is None:
        prior = examples_of(r)
    fresh = (variables - r.variables) if incremental else None
    fix = synth_fix(e.fix, r.fix, list(prior) + [e], variables, cfg, fresh=fresh)
    if fix is None:
        return None
    return SymbolicRule(cmd, err, fix, r.count + 1)


def synth_rules(
    es: Sequence[Example], cfg: SynthConfig = SynthConfig(), incremental: bool = True
) -> Optional[SymbolicRule]:
    """One symbolic rule covering all examples, or ``None`` if none exists."""
    if not es:
        raise ValueError("need at least one example")
    rule: Optional[SymbolicRule] = const_rule(es[0])
    for k in range(1, len(es)):
        rule = refine_rule(rule, es[k], cfg, prior=es[:k], incremental=incremental)
        if rule is None:
            return None
    return rule


def examples_of(r: SymbolicRule) -> list[Example]:
    """Rebuild the examples a rule was learned from out of its stored bindings."""

    def col(c, k):
        return c.s if isinstance(c, (FixedTok, FixedStr)) else c.bindings[k]

    return [
        Example(
            tuple(col(c, k) for c in r.cmd),
            tuple(col(c, k) for c in r.err),
            tuple(col(c, k) for c in r.fix),
        )
        for k in range(r.count)
    ]


def canonical_rule(r: SymbolicRule) -> SymbolicRule:
    """Same rule with its per-example bindings reordered into sorted example order."""
    rows = examples_of(r)
    order = sorted(range(len(rows)), key=lambda k: (rows[k].cmd, rows[k].err, rows[k].fix))

    def perm(c):
        if isinstance(c, Var):
            return Var(c.index, c.prefix, c.suffix, tuple(c.bindings[k] for k in order))
        if isinstance(c, CandidateSet):
            return CandidateSet(dict(c.entries), tuple(c.bindings[k] for k in order))
        return c

    return SymbolicRule(
        tuple(perm(c) for c in r.cmd),
        tuple(perm(c) for c in r.err),
        tuple(perm(c) for c in r.fix),
        r.count,
    )


# --- concrete rules --------------------------------------------------------


def match_exprs(ms: Sequence[MatchComponent]) -> tuple:
    return tuple(
        ConstStr(m.s) if isinstance(m, FixedTok) else VarMatch(m.index, m.prefix, m.suffix)
        for m in ms
    )


def _options(c: FixComponent) -> list:
    return [FStr(c.s)] if isinstance(c, FixedStr) else c.ranked()


def concretize(r: SymbolicRule) -> Iterator[ConcreteRule]:
    """Enumerate every concrete rule the symbolic rule stands for, best-ranked first."""
    cmd, err = match_exprs(r.cmd), match_exprs(r.err)
    for fix in itertools.product(*(_options(c) for c in r.fix)):
        yield ConcreteRule(cmd, err, tuple(fix))


def count_concrete(r: SymbolicRule) -> int:
    return math.prod(1 if isinstance(c, FixedStr) else len(c) for c in r.fix)


def rank_select(r: SymbolicRule) -> ConcreteRule:
    fix = tuple(
        FStr(c.s) if isinstance(c, FixedStr) else min(c.expressions(), key=rank_key)
        for c in r.fix
    )
    return ConcreteRule(match_exprs(r.cmd), match_exprs(r.err), fix)


def apply_symbolic(
    r: SymbolicRule, cmd: Sequence[str], err: Sequence[str]
) -> Optional[tuple[str, ...]]:
    if len(cmd) != len(r.cmd) or len(err) != len(r.err):
        return None
    return eval_rule(rank_select(r), cmd, err)


# --- rendering -------------------------------------------------------------


def show_symbolic(r: SymbolicRule, limit: int = 5) -> str:
    """Render in ``match [...] and [...] -> [...]`` notation, listing up to ``limit`` candidates."""
    cmd, err = match_exprs(r.cmd), match_exprs(r.err)
    names = display_names(cmd + err)

    def fix(c: FixComponent) -> str:
        if isinstance(c, FixedStr):
            return show_fix(FStr(c.s), names)
        ranked = c.ranked()
        shown = [show_fix(f, names) for f in ranked[:limit]]
        if len(ranked) > limit:
            shown.append(f"... +{len(ranked) - limit} more")
        return "{" + " | ".join(shown) + "}"

    return (
        f"match [{', '.join(show_match(m, names) for m in cmd)}]\n"
        f"and [{', '.join(show_match(m, names) for m in err)}]\n"
        f"-> [{', '.join(fix(c) for c in r.fix)}]"
    )
