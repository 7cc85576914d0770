"""Abstract syntax and evaluation semantics of the command-repair rule language.

A rule has the shape ``match cmd and err -> fix``.  ``cmd`` and ``err`` are
lists of match expressions that are unified token-by-token against a
tokenized command line and error message.  Matching binds variables (indexed
by their position in ``cmd @ err``) and the fix expressions then build the
output tokens from constants and substrings of bound tokens.

Every evaluation function returns ``None`` for the undefined result; that is
how a rule says "I do not apply", never an error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

L = "L"
R = "R"


def tokenize(line: str) -> tuple[str, ...]:
    """Split a raw command line or error message on runs of whitespace."""
    return tuple(line.split())


def join(tokens: Sequence[str]) -> str:
    return " ".join(tokens)


# --- match expressions -----------------------------------------------------


@dataclass(frozen=True)
class ConstStr:
    s: str


@dataclass(frozen=True)
class VarMatch:
    """Binds the token to variable ``index`` if it reads ``prefix . x . suffix``."""

    index: int
    prefix: str = ""
    suffix: str = ""


MatchExpr = Union[ConstStr, VarMatch]


# --- position expressions --------------------------------------------------


@dataclass(frozen=True)
class Ipos:
    k: int


@dataclass(frozen=True)
class Cpos:
    """Offset ``delta`` from the ``k``-th occurrence of ``c`` (negative k counts from the end)."""

    c: str
    k: int
    delta: int = 0

    def __post_init__(self) -> None:
        if self.k == 0:
            raise ValueError("Cpos occurrence count must be non-zero")
        if len(self.c) != 1:
            raise ValueError(f"Cpos expects a single character, got {self.c!r}")


PosExpr = Union[Ipos, Cpos]


# --- fix expressions -------------------------------------------------------


@dataclass(frozen=True)
class FStr:
    s: str


@dataclass(frozen=True)
class SubLr:
    """``left + s[pL:pR] + right`` where ``s`` is the token bound to ``var``."""

    pl: PosExpr
    pr: PosExpr
    left: str
    right: str
    var: int


FixExpr = Union[FStr, SubLr]


@dataclass(frozen=True)
class ConcreteRule:
    cmd: tuple[MatchExpr, ...]
    err: tuple[MatchExpr, ...]
    fix: tuple[FixExpr, ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        n = len(self.cmd)
        for pos, m in enumerate(self.cmd + self.err):
            if isinstance(m, VarMatch):
                if m.index in seen:
                    raise ValueError(f"duplicate variable index {m.index}")
                if m.index != pos:
                    side = "cmd" if pos < n else "err"
                    raise ValueError(
                        f"variable {m.index} sits at {side} position {pos}; "
                        "indices must equal positions in cmd @ err"
                    )
                seen.add(m.index)
        for f in self.fix:
            if isinstance(f, SubLr) and f.var not in seen:
                raise ValueError(f"fix uses unbound variable {f.var}")


Substitution = Mapping[int, str]


# --- semantics -------------------------------------------------------------


def indices(s: str, c: str) -> list[int]:
    return [p for p, ch in enumerate(s) if ch == c]


def eval_pos(p: PosExpr, s: str, d: str) -> Optional[int]:
    if isinstance(p, Ipos):
        k = p.k
        if k > 0:
            return k
        if k < 0:
            j = len(s) + k
            return j if j >= 0 else None
        return 0 if d == L else len(s)
    occ = indices(s, p.c)
    if p.k > 0:
        if len(occ) < p.k:
            return None
        j = occ[p.k - 1] + p.delta
    else:
        if len(occ) + p.k < 0:
            return None
        j = occ[len(occ) + p.k] + p.delta
    return j if j >= 0 else None


def substr(s: str, jl: Optional[int], jr: Optional[int]) -> Optional[str]:
    if jl is None or jr is None:
        return None
    if 0 <= jl <= jr <= len(s):
        return s[jl:jr]
    return None


def var_matches(prefix: str, suffix: str, t: str) -> bool:
    return len(prefix) + len(suffix) <= len(t) and t.startswith(prefix) and t.endswith(suffix)


def match_expr(m: MatchExpr, t: str) -> Optional[dict[int, str]]:
    if isinstance(m, ConstStr):
        return {} if m.s == t else None
    if var_matches(m.prefix, m.suffix, t):
        return {m.index: t}
    return None


def unify(ms: Sequence[MatchExpr], ts: Sequence[str]) -> Optional[dict[int, str]]:
    if len(ms) != len(ts):
        return None
    sigma: dict[int, str] = {}
    for m, t in zip(ms, ts):
        b = match_expr(m, t)
        if b is None:
            return None
        sigma.update(b)
    return sigma


def eval_sublr(f: SubLr, s: str) -> Optional[str]:
    """Evaluate a substring expression directly on its bound string."""
    m = substr(s, eval_pos(f.pl, s, L), eval_pos(f.pr, s, R))
    if m is None:
        return None
    return f.left + m + f.right


def eval_fix_expr(f: FixExpr, sigma: Substitution) -> Optional[str]:
    if isinstance(f, FStr):
        out = f.s
    else:
        s = sigma.get(f.var)
        if s is None:
            return None
        out = eval_sublr(f, s)
    # output tokens are whitespace-delimited, so they cannot be empty
    return out or None


def eval_rule(r: ConcreteRule, cmd: Sequence[str], err: Sequence[str]) -> Optional[tuple[str, ...]]:
    sc = unify(r.cmd, cmd)
    if sc is None:
        return None
    se = unify(r.err, err)
    if se is None:
        return None
    sigma = {**sc, **se}
    out = []
    for f in r.fix:
        v = eval_fix_expr(f, sigma)
        if v is None:
            return None
        out.append(v)
    return tuple(out)


# --- rendering -------------------------------------------------------------


def _q(s: str) -> str:
    return s if s else "ε"


def show_pos(p: PosExpr) -> str:
    if isinstance(p, Ipos):
        return str(p.k)
    return f"Cpos({p.c},{p.k},{p.delta})"


def show_match(m: MatchExpr, names: Mapping[int, int]) -> str:
    if isinstance(m, ConstStr):
        return f"Str({m.s})"
    return f"Var-Match({names.get(m.index, m.index)}, {_q(m.prefix)}, {_q(m.suffix)})"


def show_fix(f: FixExpr, names: Mapping[int, int]) -> str:
    if isinstance(f, FStr):
        return f"Fstr({f.s})"
    return (
        f"Sub-lr({show_pos(f.pl)}, {show_pos(f.pr)}, {_q(f.left)}, {_q(f.right)}, "
        f"Var({names.get(f.var, f.var)}))"
    )


def display_names(ms: Sequence[MatchExpr]) -> dict[int, int]:
    """Map concat-position variable ids to sequential 1-based display ids."""
    names: dict[int, int] = {}
    for m in ms:
        if isinstance(m, VarMatch):
            names[m.index] = len(names) + 1
    return names


def show_rule(r: ConcreteRule) -> str:
    names = display_names(r.cmd + r.err)
    cmd = ", ".join(show_match(m, names) for m in r.cmd)
    err = ", ".join(show_match(m, names) for m in r.err)
    fix = ", ".join(show_fix(f, names) for f in r.fix)
    return f"match [{cmd}]\nand [{err}]\n-> [{fix}]"
