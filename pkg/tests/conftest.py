import numpy as np
import pytest

DELTA = np.array(
    [
        [0, 1, 1, 1, 2],
        [1, 0, 2, 2, 1],
        [1, 2, 0, 2, 1],
        [1, 2, 2, 0, 1],
        [2, 1, 1, 1, 0],
    ],
    dtype=float,
)


@pytest.fixture
def delta():
    return DELTA.copy()


def random_sum_zero(rng, n, count):
    c = rng.normal(size=(count, n))
    return c - c.mean(axis=1, keepdims=True)


def floyd_warshall(labels, edges):
    idx = {x: i for i, x in enumerate(labels)}
    n = len(labels)
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0)
    for u, v in edges:
        d[idx[u], idx[v]] = d[idx[v], idx[u]] = 1
    for k in range(n):
        d = np.minimum(d, d[:, [k]] + d[[k], :])
    return d


# criterion number -> (passed, summary); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        passed, summary = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if passed else 'FAIL'}  {summary}")
