import numpy as np
import pytest

from sigmasurf import families as fam


def grid(lo, hi, n, shift=0.0):
    """Tensor grid with an optional offset of the xi_R axis (keeps samples off symmetry lines)."""
    g = np.linspace(lo, hi, n)
    return np.meshgrid(g, g + shift, indexing="ij")


@pytest.fixture(scope="session")
def tanh():
    return fam.tanh_family()


@pytest.fixture(scope="session")
def piette():
    return fam.piette_family(fam.Piette(1.1 + 1.1j))


@pytest.fixture(scope="session")
def control():
    return fam.control_field()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
