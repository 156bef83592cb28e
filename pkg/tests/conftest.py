import itertools

import pytest

from holderdecay.dioph import sine_sequence
from holderdecay.weights import lower_convex_envelope

GOLDEN = "golden"


def brute_force_hull(points):
    """O(k^3) lower hull: a point is a vertex iff no chord between two other
    points passes through or below it.  The rising tail is dropped."""
    pts = sorted(points)
    keep = []
    for xj, yj in pts:
        covered = any(
            yi + (yk - yi) * (xj - xi) / (xk - xi) <= yj
            for (xi, yi), (xk, yk) in itertools.combinations(pts, 2)
            if xi < xj < xk
        )
        if not covered:
            keep.append((xj, yj))
    ymin = min(y for _, y in keep)
    last = max(i for i, (_, y) in enumerate(keep) if y == ymin)
    return keep[:last + 1]


@pytest.fixture(scope="session")
def golden_envelope():
    return lower_convex_envelope(sine_sequence(GOLDEN, 4096).rows())


@pytest.fixture(scope="session")
def golden_envelope_64():
    return lower_convex_envelope(sine_sequence(GOLDEN, 64).rows())


ACCEPTANCE_LINES = []


@pytest.fixture
def accept():
    """Record one pass/fail line for an acceptance criterion."""

    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
