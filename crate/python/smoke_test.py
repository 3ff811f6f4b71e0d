#!/usr/bin/env python3
"""Smoke test for the treelike Python extension.

Build and stage the module first (from the repository root):

    cargo build --release -p treelike-py
    cp target/release/libtreelike_py.so python/treelike.so

then run `python3 python/smoke_test.py`.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import treelike  # noqa: E402


def check(label, got, want):
    status = "ok" if got == want else "FAIL"
    print(f"[{status}] {label}: {got!r}" + ("" if got == want else f" (want {want!r})"))
    assert got == want, label


def main():
    # Trees: parsing, canonical form, the ternary relation.
    t = treelike.Tree("(1 (2 * *) *)", 2)
    check("canonical form", t.canonical().text(), "(1 * (2 * *))")
    left = treelike.Tree("(1 * (3 * (2 * *)))", 3)
    check("S(a,b,c)", left.relation_s(0, 1, 2), True)
    check("S(c,a,d)", left.relation_s(2, 0, 3), False)
    check("restriction", left.restrict([1, 2, 3]).text(), "(3 * (2 * *))")
    balanced = treelike.Tree("(1 (2 * *) (2 * *))", 2)
    check("automorphisms", balanced.automorphism_count(), 8)
    check("marked class", balanced.marked_class(0), "D(1,2)")

    # Enumeration counts.
    classes, labeled = treelike.structures(2, 3)
    check("3-leaf classes", len(classes), 4)
    check("labeled count", labeled, 12)
    check("measures n=1", len(treelike.measures(1)), 4)
    check("measures n=2", len(treelike.measures(2)), 36)
    check("subclasses n=3", treelike.subclass_count(3), 61)
    check("recurrence n=4", treelike.subclass_recurrence(4), 551)
    check("induced n=2", treelike.induced_subclass_count(2), 8)

    # Measures: the unique regular one-color measure.
    regular = [m for m in treelike.measures(1) if m.is_regular()]
    check("one regular measure", len(regular), 1)
    check("B(1)", regular[0].b(1)["str"], "-1/2")
    cherry = treelike.Tree("(1 * *)", 1)
    check("measure of the cherry", regular[0].evaluate(cherry), "-1/4")

    # Round-trip through JSON.
    back = treelike.measure_from_json(regular[0].to_json())
    check("json round-trip", back.key(), regular[0].key())

    # Induced regular measures: the two closed-formula examples.
    intro_left = treelike.Tree("(2 (3 * *) (3 * *))", 3)
    check("closed formula", treelike.induced_value(3, [1, 2, 3], intro_left), "-1/128")
    intro_right = treelike.Tree("(1 * (2 * (3 * *)))", 3)
    mu = treelike.induced_measure(3, [1, 2, 3])
    check("chain evaluation", mu.evaluate(intro_right), "-1/512")
    check("support name", treelike.induced_measure(2, [1, 2]).support_name(), "ord")

    # Category layer.
    point = treelike.Tree("*", 1)
    check("dim End(point)", treelike.hom_dim(point, point), 2)
    check(
        "tensor square",
        treelike.point_power(1, 2),
        {"*": 1, "(1 * *)": 1},
    )
    report = treelike.gram(regular[0], cherry)
    check("gram nondegenerate", report["nondegenerate"], True)

    # A named verification suite.
    passed, lines = treelike.run_suite("example-4-2")
    check("example suite", passed, True)
    print(f"example-4-2 suite: {len(lines)} checks")

    print("all smoke checks passed")


if __name__ == "__main__":
    main()
