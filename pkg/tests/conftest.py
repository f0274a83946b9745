import numpy as np
import pytest

from iffm.config import SEC5_A, SEC5_B, SEC5_X0, UNIT_SCALAR
from iffm.linsys import validate
from iffm.motifs import InitialPolicy, make_motif


@pytest.fixture(scope="session")
def sec5():
    return validate(SEC5_A, SEC5_B)


@pytest.fixture(scope="session")
def unit():
    return UNIT_SCALAR


def sec5_init(name: str, index: int) -> InitialPolicy:
    """The benchmark initial condition ``index`` (0..2) for IFFM ``name``."""
    y0 = "adapted" if name in ("iffm-1", "iffm-3") else "michaelis"
    return InitialPolicy.explicit(np.array(SEC5_X0[index]), y0, label=f"x0-{index + 1}")


def scalar_init(x0: float, y0: float = 1.0) -> InitialPolicy:
    return InitialPolicy.explicit([x0], y0, label=f"x0={x0:g}")


IFFM_NAMES = ("iffm-1", "iffm-2", "iffm-3", "iffm-4")
SCALAR_NAMES = tuple(f"scalar-{k}" for k in range(1, 9))


@pytest.fixture(scope="session")
def motifs():
    return {name: make_motif(name) for name in IFFM_NAMES + SCALAR_NAMES}


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
