"""The compiled evaluator must agree with the reference simulator bit for bit."""
from fractions import Fraction

import numpy as np
import pytest

from firefight.genomes import (
    ConnectedDecoder,
    ConnectedGenome,
    CoordinateDecoder,
    End,
    Window,
    random_connected,
    random_coordinate,
)
from firefight.grid import Direction8 as D
from firefight.grid import Reason, SimConfig, simulate
from firefight.kernels import evaluate_connected, evaluate_coordinate

BUDGETS = ["2", "1.7", "1.5", "2.7", "1.2", "13/10", "3"]
CREDITS = [Fraction(0), Fraction(1), Fraction(2), Fraction(3, 10), Fraction(1, 2)]


def _reference(outcome):
    return (outcome.reason, outcome.end_time, outcome.burning_count,
            outcome.protected_count, outcome.distance_profile)


def _random_config(rng):
    c = str(rng.choice(BUDGETS))
    t = int(rng.integers(1, 25))
    credit = CREDITS[int(rng.integers(len(CREDITS)))]
    if rng.random() < 0.5:
        d = int(rng.integers(1, 12))
        pre = ()
        if credit >= 1 and d > 1 and rng.random() < 0.5:
            pre = ((int(rng.integers(-2, 3)), int(rng.integers(1, d))),)
        return SimConfig.highway(c, d, t, initial_budget=credit, initial_protected=pre)
    return SimConfig(c=c, t_max=t, initial_budget=credit)


def test_connected_cross_check():
    rng = np.random.default_rng(0)
    for _ in range(400):
        cfg = _random_config(rng)
        o = cfg.fire_origin
        start = (o.x + int(rng.integers(-3, 4)), o.y + int(rng.integers(-3, 4)))
        genome = random_connected(int(rng.integers(1, 60)), start, rng)
        orientation = "ccw" if rng.random() < 0.7 else "cw"
        ref = _reference(simulate(ConnectedDecoder(genome, orientation), cfg))
        assert evaluate_connected(genome, cfg, orientation) == ref, (genome, cfg)


def test_coordinate_cross_check():
    rng = np.random.default_rng(1)
    for _ in range(400):
        cfg = _random_config(rng)
        o = cfg.fire_origin
        window = Window(o.x - 8, o.x + 8, o.y - 8, o.y + 8)
        genome = random_coordinate(int(rng.integers(0, 40)), window, rng)
        floor = cfg.highway_row if cfg.scenario.value == "highway" else None
        ref = _reference(simulate(CoordinateDecoder(genome, o, floor), cfg))
        assert evaluate_coordinate(genome, cfg) == ref, (genome, cfg)


def test_walkthrough_genome_on_kernel():
    genome = ConnectedGenome((0, 1), ((D.SE, End.F), (D.SW, End.F), (D.NW, End.F)))
    res = evaluate_connected(genome, SimConfig(c=4, t_max=5))
    assert res == (Reason.ENCLOSED, 1, 1, 4, [])


@pytest.mark.parametrize("t_max", [1, 30])
def test_grid_edge_never_reached(t_max):
    # The grid is sized from the horizon; an unprotected fire must still
    # burn the full diamond without touching the border.
    cfg = SimConfig(c=1, t_max=t_max)
    genome = ConnectedGenome((500, 500), ())
    res = evaluate_connected(genome, cfg)
    r = t_max - 1
    assert res[2] == 2 * r * r + 2 * r + 1
