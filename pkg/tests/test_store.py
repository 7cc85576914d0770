from __future__ import annotations

import json
import random
import threading

import pytest
from hypothesis import given, settings, strategies as st

from cmdfix.partition import learn_rules
from cmdfix.store import (
    ExampleFormatError,
    RuleStore,
    StoreError,
    dump_examples,
    parse_examples,
    rule_from_json,
    rule_id,
    rule_to_json,
)
from cmdfix.synthesis import Example, synth_rules

import gen
from corpus import EMPLOYEE_PAIR, MULTI, RUN_META, javac

NOW = "2026-01-01T00:00:00+00:00"


def test_empty_roundtrip(tmp_path):
    p = tmp_path / "s.json"
    RuleStore().save(p)
    assert len(RuleStore.load(p)) == 0


def test_run_meta_roundtrip(tmp_path):
    s = RuleStore()
    rid = s.add_rule(synth_rules(RUN_META), now=NOW)
    s.save(tmp_path / "s.json")
    back = RuleStore.load(tmp_path / "s.json")
    assert back == s
    assert back.get(rid).rule.fix[1].entries == s.get(rid).rule.fix[1].entries


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_rule_json_roundtrip(seed):
    r = gen.rand_symbolic(random.Random(seed))
    back = rule_from_json(json.loads(json.dumps(rule_to_json(r))))
    assert back == r
    assert rule_id(back) == rule_id(r)


def test_truncated_file(tmp_path):
    p = tmp_path / "s.json"
    s = RuleStore()
    s.add_rules(learn_rules(MULTI), now=NOW)
    s.save(p)
    text = p.read_text()
    p.write_text(text[: len(text) // 2])
    with pytest.raises(StoreError, match=r"s\.json:\d+:\d+"):
        RuleStore.load(p)


def test_version_rejected():
    with pytest.raises(StoreError, match="version"):
        RuleStore.from_json({"version": 2, "rules": []})


def test_bad_field_reports_path():
    doc = RuleStore()
    doc.add_rule(synth_rules(RUN_META), now=NOW)
    j = doc.to_json()
    j["rules"][0]["fix"][1]["entries"][0]["pairs"][0][1] = {"t": "cpos", "c": ".", "k": 0, "d": 0}
    with pytest.raises(StoreError, match=r"rules\[0\]\.fix\[1\]\.entries\[0\]\.pairs\[0\]\[1\]"):
        RuleStore.from_json(j)


def test_add_rules_idempotent():
    res = learn_rules(MULTI)
    a = RuleStore()
    a.add_rules(res, now=NOW)
    assert len(a) == 3
    before = a.to_json()
    a.add_rules(res, now="later")
    assert a.to_json() == before


def test_add_preserves_loaded_ids(tmp_path):
    a = RuleStore()
    ids = a.add_rules(learn_rules(MULTI), now=NOW)
    a.save(tmp_path / "s.json")
    b = RuleStore.load(tmp_path / "s.json")
    b.add_rule(synth_rules(EMPLOYEE_PAIR), now=NOW)
    assert all(i in b for i in ids) and len(b) == 4


def test_id_ignores_example_order():
    assert rule_id(synth_rules(MULTI[4:])) == rule_id(synth_rules(MULTI[4:][::-1]))


def test_suggest_employee():
    s = RuleStore()
    s.add_rule(synth_rules(EMPLOYEE_PAIR))
    g = javac("Greeter")
    (sug,) = s.suggest(g.cmd, g.err)
    assert sug.fixed == ("javac", "Greeter.java")
    assert s.suggest(("nothing",), ()) == []


def test_suggest_orders_by_specificity():
    general = [
        Example.from_text("cp a b", "", "cp -r a b"),
        Example.from_text("mv c d", "", "mv -r c d"),
    ]
    specific = [
        Example.from_text("cp a b", "", "cp -f a b"),
        Example.from_text("cp c d", "", "cp -f c d"),
    ]
    s = RuleStore()
    g = s.add_rule(synth_rules(general))
    sp = s.add_rule(synth_rules(specific))
    out = s.suggest(("cp", "x", "y"), ())
    assert [o.rule_id for o in out] == [sp, g]
    assert out[0].line == "cp -f x y"
    assert out[0].specificity > out[1].specificity


def test_suggest_dedupes_identical_fixes():
    s = RuleStore()
    s.add_rule(synth_rules(RUN_META))
    s.add_rule(synth_rules(MULTI[:2]))
    e = Example.from_text("java A.java", "Could not find or load main class A.java", "java A")
    assert len(s.matches(e.cmd, e.err)) == 2
    assert [x.fixed for x in s.suggest(e.cmd, e.err)] == [("java", "A")]


def test_concurrent_suggest_and_add():
    s = RuleStore()
    s.add_rule(synth_rules(RUN_META))
    e = Example.from_text("java A.java", "Could not find or load main class A.java", "java A")
    errors = []

    def reader():
        for _ in range(200):
            if s.suggest(e.cmd, e.err)[0].fixed != ("java", "A"):
                errors.append("bad")

    threads = [threading.Thread(target=reader) for _ in range(4)]
    for t in threads:
        t.start()
    s.add_rules(learn_rules(MULTI))
    for t in threads:
        t.join()
    assert not errors


def test_parse_examples():
    lines = ['{"cmd": "ls", "fix": "ls -la"}', "", '{"cmd": "a", "err": "e", "fix": "b"}']
    es = parse_examples(lines)
    assert es == [Example(("ls",), (), ("ls", "-la")), Example(("a",), ("e",), ("b",))]
    assert parse_examples(dump_examples(es).splitlines()) == es


@pytest.mark.parametrize(
    "line",
    ['{"cmd": "x", "fix": ""}', "not json", "[1]", '{"cmd": 1, "fix": "x"}', '{"fix": "x"}'],
)
def test_parse_examples_errors(line):
    with pytest.raises(ExampleFormatError) as info:
        parse_examples(['{"cmd": "a", "fix": "b"}', line])
    assert info.value.line == 2


def test_save_is_atomic_on_failure(tmp_path, monkeypatch):
    p = tmp_path / "s.json"
    RuleStore().save(p)
    s = RuleStore()
    s.add_rule(synth_rules(RUN_META))

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr("os.replace", boom)
    with pytest.raises(OSError):
        s.save(p)
    assert len(RuleStore.load(p)) == 0
    assert [x.name for x in tmp_path.iterdir()] == ["s.json"]
