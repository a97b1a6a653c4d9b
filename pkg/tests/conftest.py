import numpy as np
import pytest

from firefight.grid import Cell, ScriptedDecoder, SimConfig, simulate

# The c=2.7 walkthrough barrier: capacities (2,3,3,2), 5 burning
# at t=3, enclosed by step 4. Grouped by the step that protects it.
WALK_STEPS = (
    ((-1, 0), (0, -1)),
    ((-1, 1), (0, 2), (1, -1)),
    ((1, 2), (2, -1), (3, 0)),
    ((2, 2), (3, 1)),
)
WALK_CELLS = tuple(c for step in WALK_STEPS for c in step)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def walk_outcome():
    return simulate(ScriptedDecoder(WALK_CELLS), SimConfig(c="2.7", t_max=10), record_frames=True)


def ring(center=(0, 0)):
    x, y = center
    return [Cell(x, y + 1), Cell(x + 1, y), Cell(x, y - 1), Cell(x - 1, y)]


# Acceptance lines, filled in by test_acceptance.py and printed once at the end.
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
