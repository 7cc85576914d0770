"""Worked examples shared by several test modules."""

from __future__ import annotations

from cmdfix.synthesis import Example

_CLASS_ERR = "Class names, `{0}', are only accepted if annotation processing is explicitly requested"
_MAIN_ERR = "Could not find or load main class {0}"
_MV_ERR = "can't rename `{0}': No such file or directory"


def javac(name: str) -> Example:
    return Example.from_text(f"javac {name}", _CLASS_ERR.format(name), f"javac {name}.java")


EMPLOYEE_PAIR = [javac("Employee"), javac("Pair")]

RUN_META = [
    Example.from_text("java Run.java", _MAIN_ERR.format("Run.java"), "java Run"),
    Example.from_text("java Meta.java", _MAIN_ERR.format("Meta.java"), "java Meta"),
]

AAAA_BBBB = [
    Example.from_text("aaaa aaaa", "aaaa aaaa", "aa"),
    Example.from_text("bbbb bbbb", "bbbb bbbb", "bb"),
]

MULTI = [
    Example.from_text("java Run.java", _MAIN_ERR.format("Run.java"), "java Run"),
    Example.from_text("java Test.java", _MAIN_ERR.format("Test.java"), "java Test"),
    Example.from_text("composer pkg", "did you mean one of these? pkg1 pkg2", "composer pkg1"),
    Example.from_text("composer hptt", "did you mean one of these? http html", "composer http"),
    Example.from_text(
        "mv photo.jpg Mary/summer12.jpg",
        _MV_ERR.format("photo.jpg"),
        "mkdir Mary && mv photo.jpg Mary/summer12.jpg",
    ),
    Example.from_text(
        "mv dec31.jpg Bob/family.jpg",
        _MV_ERR.format("dec31.jpg"),
        "mkdir Bob && mv dec31.jpg Bob/family.jpg",
    ),
]
