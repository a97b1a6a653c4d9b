"""Fitness for the two scenarios.

Enclosure runs are ranked by the number of burning cells at the horizon
(fewer is fitter). Highway runs are ranked lexicographically: a later
first contact with the highway wins; on a tie, the burning-cell counts
per distance to the highway are compared from distance 0 upwards and the
smaller count at the first difference wins.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from itertools import zip_longest
from typing import Optional

from firefight.grid import Outcome, Reason

_NOT_ENCLOSED = 1 << 30


@dataclass(frozen=True, order=True)
class EnclosureFitness:
    """Sort key: smaller is fitter.

    Field order is the comparison order: burn count, then enclosed before
    not enclosed, then earlier enclosure, then fewer protected cells.
    """

    burning_count: int
    not_enclosed: bool
    time_key: int
    protected_count: int

    @property
    def enclosed(self) -> bool:
        return not self.not_enclosed

    @property
    def enclosure_time(self) -> Optional[int]:
        return None if self.not_enclosed else self.time_key

    def __str__(self) -> str:
        return f"fitness={self.burning_count}"


def enclosure_fitness(outcome: Outcome) -> EnclosureFitness:
    enclosed = outcome.reason is Reason.ENCLOSED
    return EnclosureFitness(
        burning_count=outcome.burning_count,
        not_enclosed=not enclosed,
        time_key=outcome.end_time if enclosed else _NOT_ENCLOSED,
        protected_count=outcome.protected_count,
    )


@total_ordering
@dataclass(frozen=True)
class HighwayProfile:
    """First contact time ``r`` and distance profile ``d``.

    ``survived`` marks runs in which the fire never touched the highway; then
    ``r`` is the horizon plus one and ``d`` the profile at the horizon.
    Comparison operators order by fitness, so ``max`` picks the fittest.
    """

    r: int
    d: tuple
    survived: bool = False

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(v) for v in self.d))

    def __eq__(self, other):
        if not isinstance(other, HighwayProfile):
            return NotImplemented
        return compare_highway(self, other) == 0

    def __lt__(self, other):
        return compare_highway(self, other) < 0

    def __hash__(self):
        d = list(self.d)
        while d and d[-1] == 0:
            d.pop()
        return hash((self.survived, self.r, tuple(d)))

    def __str__(self) -> str:
        r = f">{self.r - 1}" if self.survived else str(self.r)
        return f"r={r} d=[{','.join(map(str, self.d))}]"


def compare_highway(a: HighwayProfile, b: HighwayProfile) -> int:
    """+1 if ``a`` is fitter, -1 if ``b`` is, 0 if they are equal."""
    if a.survived != b.survived:
        return 1 if a.survived else -1
    if a.r != b.r:
        return 1 if a.r > b.r else -1
    for x, y in zip_longest(a.d, b.d, fillvalue=0):
        if x != y:
            return 1 if x < y else -1
    return 0


def highway_fitness(outcome: Outcome) -> HighwayProfile:
    if outcome.reason is Reason.HIGHWAY_REACHED:
        return HighwayProfile(outcome.end_time, tuple(outcome.distance_profile))
    return HighwayProfile(outcome.end_time + 1, tuple(outcome.distance_profile), survived=True)


def format_fitness(fitness) -> str:
    return str(fitness)
