"""Acceptance criteria 1-10 at their stated tolerances and time limits.

Each test runs one verification suite, asserts every check in it and the
wall-time limit, and records a one-line verdict.  The verdicts are printed
in the pytest terminal summary, or directly when this file is executed:

    python3 tests/test_acceptance.py
"""

import time

import pytest

from reeb_lab import verify

RESULTS: list = []

CRITERIA = [
    (1, "structure equations", "structure-equations", 5),
    (2, "pullback identities", "pullback", 5),
    (3, "Reeb periodicity", "reeb", 30),
    (4, "latitude projection", "latitude", 30),
    (5, "magnetic correspondence", "correspondence", 120),
    (6, "two-orbit deformation", "two-orbit", 300),
    (7, "Finsler checks", "finsler", 60),
    (8, "Boothby-Wang lift", "lift", 120),
    (9, "counting", "counting", 10),
    (10, "irrational ellipsoid census", "ellipsoid", 10),
]


def evaluate(number, title, suite, limit):
    t0 = time.perf_counter()
    rep = verify.SUITES[suite](seed=0)
    seconds = time.perf_counter() - t0
    ok = rep.passed and seconds < limit
    worst = ", ".join(f"{c.name}={c.value!r}" for c in rep.failures()) or "all checks within bounds"
    line = (f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {len(rep.checks)} checks, "
            f"{seconds:.1f}s (limit {limit}s); {worst}")
    return ok, line, rep, seconds


@pytest.mark.parametrize("number,title,suite,limit", CRITERIA, ids=[c[2] for c in CRITERIA])
def test_criterion(number, title, suite, limit):
    ok, line, rep, seconds = evaluate(number, title, suite, limit)
    RESULTS.append(line)
    print(line)
    assert rep.passed, "\n".join(f"{c.name}: {c.value!r} vs {c.relation} {c.bound!r}" for c in rep.failures())
    assert seconds < limit, f"took {seconds:.1f}s, limit {limit}s"


if __name__ == "__main__":
    lines = [evaluate(*c) for c in CRITERIA]
    for _, line, _, _ in lines:
        print(line)
    raise SystemExit(0 if all(ok for ok, *_ in lines) else 1)
