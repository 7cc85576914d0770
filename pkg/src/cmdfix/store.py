"""Rule store persistence, example files, and the suggestion engine."""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from .dsl import ConcreteRule, Cpos, Ipos, PosExpr, eval_rule, join
from .partition import LearnResult
from .synthesis import (
    CandidateSet,
    Example,
    FixedStr,
    FixedTok,
    SymbolicRule,
    Var,
    canonical_rule,
    pair_key,
    rank_select,
)

SCHEMA_VERSION = 1


class StoreError(Exception):
    pass


class ExampleFormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


# --- JSON encoding ---------------------------------------------------------


def pos_to_json(p: PosExpr) -> dict:
    if isinstance(p, Ipos):
        return {"t": "ipos", "k": p.k}
    return {"t": "cpos", "c": p.c, "k": p.k, "d": p.delta}


def rule_to_json(r: SymbolicRule) -> dict:
    def match(m):
        if isinstance(m, FixedTok):
            return {"t": "str", "s": m.s}
        return {"t": "var", "i": m.index, "l": m.prefix, "r": m.suffix, "bindings": list(m.bindings)}

    def fix(f):
        if isinstance(f, FixedStr):
            return {"t": "fstr", "s": f.s}
        entries = [
            {
                "var": j,
                "l": left,
                "r": right,
                "pairs": [[pos_to_json(a), pos_to_json(b)] for a, b in sorted(pairs, key=pair_key)],
            }
            for (j, left, right), pairs in sorted(f.entries.items())
        ]
        return {"t": "cands", "bindings": list(f.bindings), "entries": entries}

    return {
        "count": r.count,
        "cmd": [match(m) for m in r.cmd],
        "err": [match(m) for m in r.err],
        "fix": [fix(f) for f in r.fix],
    }


def _need(obj: Any, key: str, typ: type, where: str) -> Any:
    if not isinstance(obj, dict) or key not in obj:
        raise StoreError(f"{where}: missing field {key!r}")
    v = obj[key]
    if typ is int and isinstance(v, bool) or not isinstance(v, typ):
        raise StoreError(f"{where}.{key}: expected {typ.__name__}")
    return v


def pos_from_json(o: Any, where: str) -> PosExpr:
    tag = _need(o, "t", str, where)
    try:
        if tag == "ipos":
            return Ipos(_need(o, "k", int, where))
        if tag == "cpos":
            return Cpos(_need(o, "c", str, where), _need(o, "k", int, where), _need(o, "d", int, where))
    except ValueError as exc:
        raise StoreError(f"{where}: {exc}") from None
    raise StoreError(f"{where}: unknown position tag {tag!r}")


def rule_from_json(o: Any, where: str = "rule") -> SymbolicRule:
    count = _need(o, "count", int, where)

    def match(m, w):
        tag = _need(m, "t", str, w)
        if tag == "str":
            return FixedTok(_need(m, "s", str, w))
        if tag == "var":
            b = tuple(_need(m, "bindings", list, w))
            if len(b) != count:
                raise StoreError(f"{w}: expected {count} bindings, got {len(b)}")
            return Var(_need(m, "i", int, w), _need(m, "l", str, w), _need(m, "r", str, w), b)
        raise StoreError(f"{w}: unknown match tag {tag!r}")

    def fix(f, w):
        tag = _need(f, "t", str, w)
        if tag == "fstr":
            return FixedStr(_need(f, "s", str, w))
        if tag != "cands":
            raise StoreError(f"{w}: unknown fix tag {tag!r}")
        b = tuple(_need(f, "bindings", list, w))
        if len(b) != count:
            raise StoreError(f"{w}: expected {count} bindings, got {len(b)}")
        entries = {}
        for k, e in enumerate(_need(f, "entries", list, w)):
            we = f"{w}.entries[{k}]"
            pairs = []
            for n, pr in enumerate(_need(e, "pairs", list, we)):
                if not isinstance(pr, list) or len(pr) != 2:
                    raise StoreError(f"{we}.pairs[{n}]: expected a pair")
                pairs.append((pos_from_json(pr[0], f"{we}.pairs[{n}][0]"), pos_from_json(pr[1], f"{we}.pairs[{n}][1]")))
            key = (_need(e, "var", int, we), _need(e, "l", str, we), _need(e, "r", str, we))
            entries[key] = frozenset(pairs)
        return CandidateSet(entries, b)

    return SymbolicRule(
        tuple(match(m, f"{where}.cmd[{k}]") for k, m in enumerate(_need(o, "cmd", list, where))),
        tuple(match(m, f"{where}.err[{k}]") for k, m in enumerate(_need(o, "err", list, where))),
        tuple(fix(f, f"{where}.fix[{k}]") for k, f in enumerate(_need(o, "fix", list, where))),
        count,
    )


def rule_id(r: SymbolicRule) -> str:
    blob = json.dumps(rule_to_json(canonical_rule(r)), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def example_fingerprint(e: Example) -> str:
    blob = json.dumps([e.cmd, e.err, e.fix], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


# --- example files ---------------------------------------------------------


def parse_examples(lines: Iterable[str]) -> list[Example]:
    """Examples from JSON lines of the form {"cmd": ..., "err": ..., "fix": ...}."""
    out = []
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ExampleFormatError(n, f"invalid JSON ({exc.msg})") from None
        if not isinstance(rec, dict):
            raise ExampleFormatError(n, "expected an object")
        fields = []
        for key in ("cmd", "err", "fix"):
            v = rec.get(key, "" if key == "err" else None)
            if not isinstance(v, str):
                raise ExampleFormatError(n, f"field {key!r} must be a string")
            fields.append(v)
        try:
            out.append(Example.from_text(*fields))
        except ValueError as exc:
            raise ExampleFormatError(n, str(exc)) from None
    return out


def load_examples(path: str | os.PathLike) -> list[Example]:
    with open(path, encoding="utf-8") as fh:
        return parse_examples(fh)


def dump_examples(es: Iterable[Example]) -> str:
    return "".join(
        json.dumps({"cmd": join(e.cmd), "err": join(e.err), "fix": join(e.fix)}) + "\n" for e in es
    )


# --- the store -------------------------------------------------------------


@dataclass(frozen=True)
class StoredRule:
    id: str
    rule: SymbolicRule
    provenance: tuple[str, ...]
    created_at: str

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "created_at": self.created_at,
            "provenance": list(self.provenance),
            **rule_to_json(self.rule),
        }


@dataclass(frozen=True)
class Suggestion:
    rule_id: str
    fixed: tuple[str, ...]
    specificity: int

    @property
    def line(self) -> str:
        return join(self.fixed)


class RuleStore:
    """Learned rules keyed by content hash; reads may run concurrently with one writer."""

    def __init__(self, rules: Iterable[StoredRule] = ()):
        self._lock = threading.RLock()
        self._rules: dict[str, StoredRule] = {}
        self._selected: dict[str, ConcreteRule] = {}
        for sr in rules:
            self._rules[sr.id] = sr

    def __len__(self) -> int:
        return len(self._rules)

    def __contains__(self, rid: str) -> bool:
        return rid in self._rules

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RuleStore):
            return NotImplemented
        return self.to_json() == other.to_json()

    @property
    def rules(self) -> list[StoredRule]:
        with self._lock:
            return sorted(self._rules.values(), key=lambda sr: sr.id)

    def get(self, rid: str) -> StoredRule:
        return self._rules[rid]

    def add_rule(
        self, rule: SymbolicRule, provenance: Iterable[str] = (), now: Optional[str] = None
    ) -> str:
        rid = rule_id(rule)
        with self._lock:
            old = self._rules.get(rid)
            prov = set(provenance) | set(old.provenance if old else ())
            created = old.created_at if old else (now or dt.datetime.now(dt.timezone.utc).isoformat())
            self._rules[rid] = StoredRule(rid, rule, tuple(sorted(prov)), created)
        return rid

    def add_rules(self, result: LearnResult, now: Optional[str] = None) -> list[str]:
        return [
            self.add_rule(rule, [example_fingerprint(e) for e in block], now)
            for rule, block in zip(result.rules, result.blocks)
        ]

    def _select(self, sr: StoredRule) -> ConcreteRule:
        sel = self._selected.get(sr.id)
        if sel is None:
            sel = self._selected[sr.id] = rank_select(sr.rule)
        return sel

    def matches(self, cmd: Sequence[str], err: Sequence[str]) -> list[Suggestion]:
        """Every stored rule that applies, best first, without deduplication."""
        cmd, err = tuple(cmd), tuple(err)
        out = []
        for sr in self.rules:
            if sr.rule.shape[:2] != (len(cmd), len(err)):
                continue
            fixed = eval_rule(self._select(sr), cmd, err)
            if fixed is not None:
                out.append(Suggestion(sr.id, fixed, sr.rule.specificity))
        out.sort(key=lambda s: (-s.specificity, s.rule_id))
        return out

    def suggest(self, cmd: Sequence[str], err: Sequence[str]) -> list[Suggestion]:
        seen: set[tuple[str, ...]] = set()
        out = []
        for s in self.matches(cmd, err):
            if s.fixed not in seen:
                seen.add(s.fixed)
                out.append(s)
        return out

    # persistence

    def to_json(self) -> dict:
        return {"version": SCHEMA_VERSION, "rules": [sr.to_json() for sr in self.rules]}

    def save(self, path: str | os.PathLike) -> None:
        path = Path(path)
        text = json.dumps(self.to_json(), sort_keys=True, indent=1, ensure_ascii=False)
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def from_json(cls, doc: Any) -> "RuleStore":
        if not isinstance(doc, dict):
            raise StoreError("top level: expected an object")
        version = doc.get("version")
        if version != SCHEMA_VERSION:
            raise StoreError(f"unsupported store version {version!r} (expected {SCHEMA_VERSION})")
        rules = []
        for k, o in enumerate(_need(doc, "rules", list, "top level")):
            where = f"rules[{k}]"
            rule = rule_from_json(o, where)
            rid = _need(o, "id", str, where)
            prov = tuple(_need(o, "provenance", list, where))
            rules.append(StoredRule(rid, rule, prov, _need(o, "created_at", str, where)))
        return cls(rules)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "RuleStore":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreError(f"{path}: {exc.strerror or exc}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StoreError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        return cls.from_json(doc)

    @classmethod
    def open(cls, path: str | os.PathLike) -> "RuleStore":
        """Load ``path`` or start empty if it does not exist yet."""
        return cls.load(path) if Path(path).exists() else cls()
