"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line; the lines are printed at the end of the
pytest run (see ``conftest.py``) and when this file is run as a script.
"""

import math
import sys
import time

import pytest

from operad_lab import disc_operads as D
from operad_lab import flow as F
from operad_lab import suites as SU
from operad_lab import trees as TR
from operad_lab.disc_operads import DiscConfig
from operad_lab.sampling import SampleSpec

RESULTS = {}

TREE_SHAPES = len(SU.tree_shapes(5))


def record(number, title, ok, detail):
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[number] = line
    print(line)
    return ok


def run(name, count, seed=1, **kw):
    return SU.run_suite(name, SampleSpec(seed=seed, count=count, **kw))


def describe(reports, elapsed=None):
    parts = [f"{r.name} {r.samples} samples, {len(r.failures)} failures" for r in reports]
    if elapsed is not None:
        parts.append(f"{elapsed:.1f} s")
    return "; ".join(parts)


def first_failures(reports):
    return [(r.name, r.failures[:2]) for r in reports if r.failures]


def test_criterion_01_operad_axioms():
    start = time.perf_counter()
    rep = run("operad-axioms", 1000, max_labels=5, max_dim=3)
    elapsed = time.perf_counter() - start
    ok = rep.ok and elapsed < 60
    record(1, "operad axioms (P, R, D; both associativity shapes)", ok, describe([rep], elapsed))
    assert ok, first_failures([rep]) or f"took {elapsed:.1f} s"


def test_criterion_02_inverse():
    rep = run("inverse", 1000, max_labels=5, max_dim=3)
    record(2, "compose/decompose round trips and barycentre calculus", rep.ok, describe([rep]))
    assert rep.ok, first_failures([rep])


def test_criterion_03_closure():
    rep = run("closure", 1000, max_labels=5, max_dim=3)
    record(3, "closure of D and E, open star under decomposition, block inequalities",
           rep.ok, describe([rep]))
    assert rep.ok, first_failures([rep])


def test_criterion_04_tree_subspace():
    # sample k uses tree shape k % TREE_SHAPES, so this is 500 samples per shape
    rep = run("dv-trees", 500 * TREE_SHAPES)
    record(4, f"tree-indexed subspace characterization ({TREE_SHAPES} shapes x 500)",
           rep.ok, describe([rep]))
    assert rep.ok, first_failures([rep])


def test_criterion_05_fm():
    rep = run("fm", 500)
    record(5, "FM associativity, coherence, weighted normalization", rep.ok, describe([rep]))
    assert rep.ok, first_failures([rep])


def test_criterion_06_pairing():
    reps = [run(name, 1000) for name in ("alpha-edge", "alpha-diagram", "rho")]
    ok = all(r.ok for r in reps)
    record(6, "pairing closed form, pairing square, corolla factorization", ok, describe(reps))
    assert ok, first_failures(reps)


def test_criterion_07_phi():
    rep = run("phi", 1000)
    record(7, "phi round trip", rep.ok, describe([rep]))
    assert rep.ok, first_failures([rep])


def _two_disc_case():
    tr = F.flow_retract(DiscConfig({1: (-1.0,), 2: (1.0,)}, {1: 0.5, 2: 0.5}))
    term = (tr.terminal.x[1][0], tr.terminal.x[2][0])
    err = max(abs(tr.total_time - math.log(2)), abs(term[0] + 0.5), abs(term[1] - 0.5))
    return err < 1e-9 and D.in_D(tr.terminal, eps=1e-9), err


def test_criterion_08_flow():
    start = time.perf_counter()
    rep = run("flow", 200, max_labels=5, max_dim=3)
    analytic_ok, err = _two_disc_case()
    elapsed = time.perf_counter() - start
    ok = rep.ok and analytic_ok and elapsed < 120
    record(8, "retraction flow", ok,
           describe([rep], elapsed) + f"; two-disc case error {err:.1e}")
    assert ok, first_failures([rep]) or (err, elapsed)


def test_criterion_09_tree_counts():
    start = time.perf_counter()
    counts, agree = [], True
    for n in range(2, 6):
        labels = range(1, n + 1)
        rec, lam = TR.enumerate_trees(labels), TR.enumerate_laminar(labels)
        counts.append(len(rec))
        agree = agree and set(rec) == set(lam) and len(lam) == len(rec)
    elapsed = time.perf_counter() - start
    ok = counts == [1, 4, 26, 236] and agree and elapsed < 30
    record(9, "tree counts by two enumerations", ok,
           f"counts {counts}, methods agree {agree}, {elapsed:.2f} s")
    assert ok


def test_criterion_10_suspension():
    rep = run("kappa-pro", 500)
    record(10, "kappa well-defined, split/merge, suspension square", rep.ok, describe([rep]))
    assert rep.ok, first_failures([rep])


def test_criterion_11_mutants():
    count = 60
    lines, ok = [], True
    baseline = {}
    for name, m in sorted(SU.MUTANTS.items()):
        caught = []
        for suite in m.suites:
            if suite not in baseline:
                baseline[suite] = run(suite, count, seed=2).ok
            rep = SU.run_suite(suite, SampleSpec(seed=2, count=count), mutant_name=name)
            if not rep.ok:
                caught.append(suite)
        ok = ok and bool(caught)
        lines.append(f"{name} caught by {','.join(caught) or 'nothing'}")
    clean = all(baseline.values())
    ok = ok and clean and len(SU.MUTANTS) >= 5
    record(11, "mutation sanity", ok,
           f"{len(SU.MUTANTS)} mutants; " + "; ".join(lines) + f"; baseline clean {clean}")
    assert ok


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
