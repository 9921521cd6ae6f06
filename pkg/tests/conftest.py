import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sweepcut.graph import WeightedGraph

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# lines printed after the run by pytest_terminal_summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def complete(n, off=0, w=1.0):
    return [(off + i, off + j, w) for i, j in itertools.combinations(range(n), 2)]


def cycle(n):
    return WeightedGraph(n, [(i, (i + 1) % n, 1.0) for i in range(n)])


def barbell4():
    """Two K4's on 0..3 and 4..7 joined by the unit bridge (3, 4)."""
    return WeightedGraph(8, complete(4) + complete(4, 4) + [(3, 4, 1.0)])


@st.composite
def graphs(draw, min_n=2, max_n=8, connected=True, weighted=True):
    """Random small graphs; connected ones contain a random spanning tree."""
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = set()
    if connected:
        order = draw(st.permutations(range(n)))
        for i in range(1, n):
            j = draw(st.integers(0, i - 1))
            a, b = order[i], order[j]
            chosen.add((min(a, b), max(a, b)))
    extra = draw(st.lists(st.sampled_from(pairs), max_size=2 * n)) if pairs else []
    chosen.update(extra)
    if not chosen:
        chosen.add((0, 1))
    wts = st.sampled_from([0.5, 1.0, 1.5, 2.0, 3.0]) if weighted else st.just(1.0)
    edges = [(a, b, draw(wts)) for a, b in sorted(chosen)]
    return WeightedGraph(n, edges, warn_low_degree=False)


def jacobi_eigvalsh(a, tol=1e-13, sweeps=100):
    """Cyclic Jacobi eigenvalues of a symmetric matrix, written independently of LAPACK."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    for _ in range(sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * max(1.0, np.abs(a).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1)) if theta else 1.0
                c = 1 / np.sqrt(t * t + 1)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))


@pytest.fixture
def bar():
    return barbell4()
