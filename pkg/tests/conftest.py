import numpy as np
import pytest

from scatterkit import forward as fw
from scatterkit.geometry import preset_curve

# (shape, k, n, eta, delta) for the imaging experiments
PEANUT = ("peanut", 2 * np.pi, 4 + 1j, 2 + 1j, 0.10)
KITE = ("kite", 6.0, 4 + 1j, 2 + 1j, 0.10)
CIRCLE = ("circle", 4.0, 3.0, 6 + 4j, 0.15)


def _far_field(shape, k, n, eta, nf=128):
    return fw.far_field_matrix(preset_curve(shape), fw.Medium(k, n, eta), fw.Discretization(nf))


@pytest.fixture(scope="session")
def far_fields():
    """Far-field matrices at Nf = 128 for the imaging experiments (built lazily)."""
    cache = {}

    def get(case):
        if case not in cache:
            shape, k, n, eta, _ = case
            cache[case] = _far_field(shape, k, n, eta)
        return cache[case]

    return get


@pytest.fixture(scope="session")
def peanut_ff(far_fields):
    return far_fields(PEANUT)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one summary line per acceptance check."""

    def add(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"[criterion {criterion}] {'PASS' if ok else 'FAIL'}: {detail}")
        return ok

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
