import numpy as np
import pytest

J3 = np.ones((3, 3))
I3 = np.eye(3)

# filled by test_acceptance.py, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20241014)


def hermitian(rng, d, scale=1.0):
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * (G + G.conj().T) / 2


def width_k_sum(rng, d, k, terms=None, real=False):
    """Sum of rank-one ``v v^*`` with each ``v`` supported on at most ``k`` coordinates."""
    terms = int(rng.integers(1, d * d + 1)) if terms is None else terms
    B = np.zeros((d, d), dtype=complex)
    for _ in range(terms):
        size = int(rng.integers(1, min(k, d) + 1))
        idx = rng.choice(d, size=size, replace=False)
        v = np.zeros(d, dtype=complex)
        v[idx] = rng.standard_normal(size)
        if not real:
            v[idx] += 1j * rng.standard_normal(size)
        B += np.outer(v, v.conj())
    return B
