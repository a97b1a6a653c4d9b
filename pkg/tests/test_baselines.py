from fractions import Fraction

import pytest

from firefight.baselines import (
    OPTIMAL_C2_CELLS,
    BudgetTooSmall,
    ScriptedStrategy,
    SearchSpaceTooLarge,
    StartTooClose,
    asymmetric_diagonal,
    brute_force_best,
    export_script,
    min_diagonal_start,
    optimal_c2_enclosure,
    oracle_fitness,
    symmetric_alternating,
)
from firefight.fitness import highway_fitness
from firefight.genomes import format_genome, parse_genome
from firefight.grid import Reason, ScriptedDecoder, SimConfig, is_enclosed, simulate

from conftest import ring


def _r(decoder, c, d, t_max=400):
    return highway_fitness(simulate(decoder, SimConfig.highway(c, d, t_max)))


@pytest.mark.parametrize("c,n", [("1.2", 5), ("1.5", 2), ("1.1", 10), ("2", 1), ("1.01", 100)])
def test_min_diagonal_start(c, n):
    assert min_diagonal_start(c) == n
    cf = Fraction(c)
    assert cf * n >= n + 1 and cf * (n - 1) < n


@pytest.mark.parametrize("c", ["1", "0.5"])
def test_min_diagonal_start_rejects(c):
    with pytest.raises(BudgetTooSmall):
        min_diagonal_start(c)


def test_optimal_c2():
    out = simulate(optimal_c2_enclosure(), SimConfig(c=2, t_max=20))
    assert (out.reason, out.end_time, out.burning_count) == (Reason.ENCLOSED, 8, 18)
    assert is_enclosed(out.state)
    assert len(OPTIMAL_C2_CELLS) == 16


def test_optimal_c2_script_fails_below_two():
    out = simulate(optimal_c2_enclosure(), SimConfig(c="1.9", t_max=20))
    assert not out.enclosed


@pytest.mark.parametrize("c,r", [("1.4", 61), ("1.3", 54), ("1.2", 48), ("1.1", 43)])
def test_symmetric_alternating(c, r):
    fit = _r(symmetric_alternating(c, 20), c, 20)
    assert abs(fit.r - r) <= 2


def test_symmetric_adjacent_fire():
    assert _r(symmetric_alternating("1.0", 1), "1.0", 1).r == 1


def test_symmetric_rejects_bad_row():
    with pytest.raises(ValueError):
        symmetric_alternating("1.2", 20, barrier_row=20)


def test_asymmetric_diagonal_c12():
    fit = _r(asymmetric_diagonal("1.2", 20, 5), "1.2", 20)
    assert fit.r >= 85 and not fit.survived


def test_asymmetric_diagonal_c15_survives():
    fit = _r(asymmetric_diagonal("1.5", 20, 2), "1.5", 20, t_max=500)
    assert fit.survived and fit.r == 501


def test_asymmetric_diagonal_start_guard():
    with pytest.raises(StartTooClose):
        asymmetric_diagonal("1.2", 20, 4)
    with pytest.raises(StartTooClose):
        asymmetric_diagonal("1.2", 5, 5)


def test_recursive_tail_not_worse():
    plain = _r(asymmetric_diagonal("1.2", 20, 5), "1.2", 20)
    tail = _r(asymmetric_diagonal("1.2", 20, 5, recursive_tail=True), "1.2", 20)
    assert tail.r >= plain.r


def test_scripted_strategy_factory():
    assert ScriptedStrategy("asymmetric_diagonal").decoder("1.2", 20).n == 5
    with pytest.raises(ValueError):
        ScriptedStrategy("zigzag")
    with pytest.raises(ValueError):
        ScriptedStrategy("symmetric_alternating").decoder("1.2")


def test_export_script_replays_identically():
    cfg = SimConfig.highway("1.2", 20, 400)
    original = simulate(asymmetric_diagonal("1.2", 20, 5), cfg)
    script = parse_genome(format_genome(export_script(asymmetric_diagonal("1.2", 20, 5), cfg)))
    replay = simulate(ScriptedDecoder(script.cells), cfg)
    assert (replay.reason, replay.end_time, replay.distance_profile) == (
        original.reason, original.end_time, original.distance_profile)


def test_oracle_ring_at_c4():
    res = brute_force_best(4, 1, 4, starts=ring())
    assert res.outcome.burning_count == 1 and res.outcome.enclosed
    assert res.searched == 4 * 16 ** 4


def test_oracle_guard():
    with pytest.raises(SearchSpaceTooLarge):
        brute_force_best(2, 3, 7, starts=ring())


def test_oracle_result_is_reproducible():
    a = brute_force_best(2, 2, 3)
    b = brute_force_best(2, 2, 3)
    assert a.genome == b.genome
    assert oracle_fitness(a) == oracle_fitness(b)
