"""Command-line front end.

Exit codes: 0 success, 1 I/O or store failure, 2 malformed example input,
3 no suggestion, 4 unknown rule id, 5 ``test`` accuracy below 100%.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from typing import Optional, Sequence

from .bench import run_bench, to_csv
from .dsl import join, show_rule, tokenize
from .partition import learn_rules
from .store import ExampleFormatError, RuleStore, StoreError, load_examples
from .synthesis import SynthConfig, concretize, count_concrete, show_symbolic

EXIT_OK = 0
EXIT_IO = 1
EXIT_MALFORMED = 2
EXIT_NO_SUGGESTION = 3
EXIT_UNKNOWN_ID = 4
EXIT_TEST_FAILED = 5


def _err(msg: str) -> None:
    print(f"cmdfix: {msg}", file=sys.stderr)


def _load_examples(path: str):
    try:
        return load_examples(path), None
    except ExampleFormatError as exc:
        _err(f"{path}: {exc}")
        return None, EXIT_MALFORMED
    except OSError as exc:
        _err(f"{path}: {exc.strerror or exc}")
        return None, EXIT_IO
    except UnicodeDecodeError as exc:
        _err(f"{path}: not UTF-8 ({exc.reason})")
        return None, EXIT_MALFORMED


def _load_store(path: str, missing_ok: bool = False):
    try:
        return (RuleStore.open(path) if missing_ok else RuleStore.load(path)), None
    except StoreError as exc:
        _err(str(exc))
        return None, EXIT_IO


def cmd_learn(args: argparse.Namespace) -> int:
    es, code = _load_examples(args.examples)
    if es is None:
        return code
    store, code = _load_store(args.store, missing_ok=True)
    if store is None:
        return code
    try:
        cfg = SynthConfig(max_offset=args.max_offset)
    except ValueError as exc:
        _err(str(exc))
        return EXIT_MALFORMED
    result = learn_rules(es, cfg, max_group=args.max_group)
    ids = store.add_rules(result)
    for rid, rule, block in zip(ids, result.rules, result.blocks):
        shape = "x".join(map(str, rule.shape))
        print(f"{rid}  shape={shape}  examples={len(block)}  concrete={count_concrete(rule)}")
    for shape in result.greedy_groups:
        print(f"note: greedy partitioning used for shape {'x'.join(map(str, shape))}")
    print(f"{len(result.rules)} rules learned")
    try:
        store.save(args.store)
    except OSError as exc:
        _err(f"{args.store}: {exc.strerror or exc}")
        return EXIT_IO
    return EXIT_OK


def cmd_suggest(args: argparse.Namespace) -> int:
    store, code = _load_store(args.store)
    if store is None:
        return code
    found = store.suggest(tokenize(args.cmd), tokenize(args.err))
    if args.top is not None:
        found = found[: args.top]
    for s in found:
        print(s.line)
    return EXIT_OK if found else EXIT_NO_SUGGESTION


def cmd_show(args: argparse.Namespace) -> int:
    store, code = _load_store(args.store)
    if store is None:
        return code
    if args.concretize is None:
        for sr in store.rules:
            shape = "x".join(map(str, sr.rule.shape))
            print(f"# {sr.id}  shape={shape}  examples={sr.rule.count}  concrete={count_concrete(sr.rule)}")
            print(show_symbolic(sr.rule, limit=args.limit))
            print()
        print(f"{len(store)} rules")
        return EXIT_OK
    if args.concretize not in store:
        _err(f"unknown rule id {args.concretize!r}")
        return EXIT_UNKNOWN_ID
    rule = store.get(args.concretize).rule
    total = count_concrete(rule)
    shown = 0
    for c in itertools.islice(concretize(rule), args.limit):
        shown += 1
        print(f"[{shown}]")
        print(show_rule(c))
    print(f"{shown} of {total} concrete rules shown")
    return EXIT_OK


def cmd_test(args: argparse.Namespace) -> int:
    es, code = _load_examples(args.examples)
    if es is None:
        return code
    store, code = _load_store(args.store)
    if store is None:
        return code
    one = many = unmatched = correct = 0
    for e in es:
        applicable = store.matches(e.cmd, e.err)
        if not applicable:
            unmatched += 1
        elif len(applicable) == 1:
            one += 1
        else:
            many += 1
        ok = any(s.fixed == e.fix for s in applicable)
        correct += ok
        if not ok:
            print(f"FAIL {join(e.cmd)!r} -> expected {join(e.fix)!r}")
    n = len(es)
    print(f"matched by one rule: {one}")
    print(f"matched by multiple rules: {many}")
    print(f"unmatched: {unmatched}")
    print(f"accuracy: {correct}/{n}" + (f" ({100 * correct / n:.1f}%)" if n else ""))
    return EXIT_OK if correct == n else EXIT_TEST_FAILED


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes or any(n < 1 for n in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def cmd_bench(args: argparse.Namespace) -> int:
    rows = run_bench(args.sizes, nonlazy=args.non_lazy, budget=args.budget)
    sys.stdout.write(to_csv(rows, nonlazy=args.non_lazy))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmdfix", description="Learn and apply command-repair rules.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("learn", help="learn rules from a JSON-lines example file")
    s.add_argument("--examples", required=True)
    s.add_argument("--store", required=True)
    s.add_argument("--max-offset", type=int, default=1)
    s.add_argument("--max-group", type=int, default=10)
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("suggest", help="suggest fixes for a failing command")
    s.add_argument("--cmd", required=True)
    s.add_argument("--err", default="")
    s.add_argument("--store", required=True)
    s.add_argument("--top", type=int)
    s.set_defaults(func=cmd_suggest)

    s = sub.add_parser("show", help="list stored rules or concretize one")
    s.add_argument("--store", required=True)
    s.add_argument("--concretize", metavar="ID")
    s.add_argument("--limit", type=int, default=20, help="cap on rules or candidates printed")
    s.set_defaults(func=cmd_show)

    s = sub.add_parser("test", help="measure accuracy on held-out examples")
    s.add_argument("--examples", required=True)
    s.add_argument("--store", required=True)
    s.set_defaults(func=cmd_test)

    s = sub.add_parser("bench", help="time synthesis on enlarged examples (CSV)")
    s.add_argument("--sizes", type=_sizes, default=[1, 2, 4, 8, 16, 32, 64])
    s.add_argument("--non-lazy", action="store_true", help="also time the eager baseline")
    s.add_argument("--budget", type=float, default=30.0, help="seconds allowed per eager run")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
