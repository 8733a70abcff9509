import numpy as np
import pytest

from icsa.linalg import rng_stream

ACCEPTANCE_LINES = []


def random_affine(p, rng, cond=4.0):
    """Invertible A with singular values in [1/sqrt(cond), sqrt(cond)] and shift b."""
    Q1, _ = np.linalg.qr(rng.standard_normal((p, p)))
    Q2, _ = np.linalg.qr(rng.standard_normal((p, p)))
    s = np.exp(rng.uniform(-0.5, 0.5, p) * np.log(cond))
    return (Q1 * s) @ Q2, rng.normal(0, 3, p)


@pytest.fixture
def rng():
    return rng_stream(20240611)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
