import sys

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def eigenprojector(op, sign):
    """Projector onto the eigenspace of a Hermitian ``op`` with eigenvalue ``sign`` (oracle, via eigh)."""
    w, v = np.linalg.eigh(op)
    cols = v[:, np.isclose(w, sign)]
    return cols @ cols.conj().T


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
