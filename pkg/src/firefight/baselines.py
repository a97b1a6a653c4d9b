"""Hand-written reference strategies and an exhaustive search oracle.

Every strategy here is a decoder (``next_cell(state)``) that can be fed to
:func:`firefight.grid.simulate`. The highway strategies assume the
geometry of :meth:`SimConfig.highway`: highway on row ``highway_row`` and
the fire ``d`` rows above it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import njit

from firefight import kernels
from firefight.fitness import enclosure_fitness
from firefight.genomes import ConnectedDecoder, ConnectedGenome, ScriptGenome
from firefight.grid import (
    Cell,
    FireError,
    FireState,
    Outcome,
    ScriptedDecoder,
    SimConfig,
    parse_rational,
    simulate,
)


class BudgetTooSmall(FireError, ValueError):
    pass


class StartTooClose(FireError, ValueError):
    pass


class SearchSpaceTooLarge(FireError, ValueError):
    pass


def min_diagonal_start(c) -> int:
    """Smallest n with c*n >= n + 1, i.e. ceil(1 / (c - 1))."""
    c = parse_rational(c)
    if c <= 1:
        raise BudgetTooSmall(f"a diagonal start needs c > 1, got {c}")
    return math.ceil(1 / (c - 1))


# -- enclosure ---------------------------------------------------------------

# Protection order of an enclosure found by the generational EA for c = 2
# from start (0, 1); 16 cells, two per step, fire enclosed at step 8 with
# 18 cells burning. Checked by the test suite, not trusted blindly.
OPTIMAL_C2_CELLS: tuple = tuple(Cell(x, y) for x, y in (
    (1, 0), (0, -1), (1, 1), (0, 2), (-1, -2), (-2, -1), (-3, -1), (-1, 3),
    (-4, -1), (-5, 0), (-5, 1), (-2, 4), (-5, 2), (-3, 4), (-4, 4), (-5, 3),
))


def optimal_c2_enclosure() -> ScriptedDecoder:
    return ScriptedDecoder(OPTIMAL_C2_CELLS)


# -- highway -------------------------------------------------------------------

class SymmetricAlternating:
    """Grow a horizontal barrier under the fire, alternately right and left.

    The barrier sits on row ``highway_row + offset`` (default: the row
    right above the highway) and starts directly below the fire. Each call
    extends the side whose turn it is by its nearest unprotected cell; a
    side whose next cell is already burning is given up.
    """

    def __init__(self, origin: Cell, highway_row: int = 0, offset: int = 1):
        self.origin = Cell(*origin)
        d = self.origin.y - highway_row
        self.row = highway_row + offset
        self.active = 1 <= offset < d
        self.reach = {+1: 0, -1: 0}
        self.centre_done = False
        self.side = +1
        self.dead = set()

    def next_cell(self, state: FireState) -> Optional[Cell]:
        if not self.active:
            return None
        if not self.centre_done:
            self.centre_done = True
            cell = Cell(self.origin.x, self.row)
            if state.is_free(cell):
                return cell
        for _ in range(2):
            side = self.side
            self.side = -side
            if side in self.dead:
                continue
            self.reach[side] += 1
            cell = Cell(self.origin.x + side * self.reach[side], self.row)
            if state.is_free(cell):
                return cell
            self.dead.add(side)
        return None


def symmetric_alternating(c, d: int, barrier_row: Optional[int] = None, highway_row: int = 0):
    """Decoder for the symmetric-alternating barrier.

    ``barrier_row`` counts rows above the highway and defaults to 1, or 0
    when the fire sits right next to the highway. Row 0 is the highway
    itself, which cannot be protected, so that choice yields nothing.
    ``c`` is unused but kept so every baseline has the same call shape.
    """
    parse_rational(c)
    if barrier_row is None:
        barrier_row = 1 if d > 1 else 0
    if not 0 <= barrier_row < d:
        raise ValueError(f"barrier row {barrier_row} must lie in [0, {d})")
    return SymmetricAlternating(Cell(0, highway_row + d), highway_row, barrier_row)


class AsymmetricDiagonal:
    """Three-phase connected barrier.

    Coordinates below are local: ``u`` runs along x, ``v`` counts rows from
    the fire towards the highway. A cell at ``(u, v)`` catches fire no
    earlier than spread ``|u| + |v|`` and that is used as its deadline.

    Phase I protects the diagonal ``(-k, n - k)`` for ``k = 0..n``.
    Phase II continues it away from the highway, one cell ``(-n-j, -j)``
    every second step, and spends the rest of the budget on a roof running
    from ``(0, n)`` in +u, kept as low as the deadlines allow.
    Phase III starts when the roof is pinned to the row next to the highway:
    the roof then gets priority and the diagonal is abandoned once a cell
    misses its deadline.

    With ``recursive_tail`` the roof runs along the highway at one cell per
    step once the diagonal is lost, and the remaining ``c - 1`` per step
    builds a symmetric-alternating barrier right above the highway, centred
    on the column where the escaped fire heads for it.
    """

    def __init__(self, c, d: int, n: int, highway_row: int = 0, recursive_tail: bool = False):
        c = parse_rational(c)
        if n < min_diagonal_start(c):
            raise StartTooClose(f"n={n} is below the minimum {min_diagonal_start(c)} for c={c}")
        if d <= n:
            raise StartTooClose(f"diagonal start n={n} must lie below the highway distance d={d}")
        self.c, self.d, self.n = c, d, n
        self.origin = Cell(0, highway_row + d)
        self.phase1 = [(-k, n - k) for k in range(n + 1)]
        self.diag_j = 1
        self.diag_alive = True
        self.roof_k = 0
        self.roof_v = n
        self.phase = 1
        self.phase_started = {1: 1}
        self.highway_row = highway_row
        self.recursive_tail = recursive_tail
        self.tail: Optional[SymmetricAlternating] = None

    def _cell(self, u: int, v: int) -> Cell:
        return Cell(self.origin.x + u, self.origin.y - v)

    def _diag_next(self):
        j = self.diag_j
        return (-self.n - j, -j), self.n + 2 * j

    def next_cell(self, state: FireState) -> Optional[Cell]:
        t = state.t + 1
        while self.phase1:
            u, v = self.phase1.pop(0)
            cell = self._cell(u, v)
            if state.is_free(cell):
                return cell
        if self.phase == 1:
            self.phase = 2
            self.phase_started[2] = t
        if self.phase == 2 and self.roof_v >= self.d - 1:
            self.phase = 3
            self.phase_started[3] = t

        if self.diag_alive:
            (u, v), due = self._diag_next()
            cell = self._cell(u, v)
            if not state.is_free(cell):
                self.diag_alive = False
        if self.diag_alive:
            if due <= t and (self.phase == 2 or not self._roof_due(t)):
                self.diag_j += 1
                return cell
        if self.recursive_tail and self.phase == 3 and not self.diag_alive:
            return self._tail_step(state, t)
        return self._roof_next(t)

    def _tail_step(self, state: FireState, t: int) -> Cell:
        if self.tail is None:
            column = self.origin.x - self.n - self.diag_j
            self.tail = SymmetricAlternating(Cell(column, self.origin.y), self.highway_row)
        if not self._roof_due(t):
            cell = self.tail.next_cell(state)
            if cell is not None:
                return cell
        return self._roof_next(t)

    def _roof_due(self, t: int) -> bool:
        k = self.roof_k + 1
        return k + self.roof_v <= t

    def _roof_next(self, t: int) -> Optional[Cell]:
        k = self.roof_k + 1
        v = max(self.roof_v, t - k)
        v = min(v, self.roof_v + 1, self.d - 1)
        self.roof_k = k
        self.roof_v = v
        return self._cell(k, v)


def asymmetric_diagonal(c, d: int, n: int, highway_row: int = 0,
                        recursive_tail: bool = False) -> AsymmetricDiagonal:
    return AsymmetricDiagonal(c, d, n, highway_row, recursive_tail)


@dataclass(frozen=True)
class ScriptedStrategy:
    """Named scripted strategy plus its geometric parameters.

    ``n`` is the diagonal start offset above the fire (default: the smallest
    legal one) and ``barrier_row`` the alternating barrier's height above
    the highway.
    """

    kind: str
    n: Optional[int] = None
    barrier_row: Optional[int] = None
    recursive_tail: bool = False

    KINDS = ("optimal_c2", "symmetric_alternating", "asymmetric_diagonal")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown scripted strategy {self.kind!r}")

    def decoder(self, c, d: Optional[int] = None, highway_row: int = 0):
        if self.kind == "optimal_c2":
            return optimal_c2_enclosure()
        if d is None:
            raise ValueError(f"{self.kind} needs the fire-to-highway distance d")
        if self.kind == "symmetric_alternating":
            return symmetric_alternating(c, d, self.barrier_row, highway_row)
        n = self.n if self.n is not None else min_diagonal_start(c)
        return asymmetric_diagonal(c, d, n, highway_row, self.recursive_tail)


def export_script(decoder, config: SimConfig) -> ScriptGenome:
    """Run a decoder and return the cells it protected, in order, for replay."""
    cells = []

    class _Tap:
        def next_cell(self, state):
            cell = decoder.next_cell(state)
            if cell is not None:
                cells.append(cell)
            return cell

    simulate(_Tap(), config)
    return ScriptGenome(tuple(cells))


# -- exhaustive oracle ---------------------------------------------------------------

SEARCH_GUARD = 10**8


@njit(cache=True)
def _enumerate(starts, seq_len, c_num, c_den, i_num, i_den, t_max, front_step):
    empty = np.zeros(0, dtype=np.int64)
    total = 16 ** seq_len
    best = (1 << 62, 2, 1 << 62, 1 << 62)
    best_start = -1
    best_code = -1
    dirs = np.empty(seq_len, dtype=np.int64)
    ends = np.empty(seq_len, dtype=np.int64)
    for s in range(starts.shape[0]):
        sx = starts[s, 0]
        sy = starts[s, 1]
        half = max(t_max + 2, max(abs(sx), abs(sy)) + seq_len + 2)
        for code in range(total):
            x = code
            for i in range(seq_len - 1, -1, -1):
                digit = x % 16
                x //= 16
                dirs[i] = digit >> 1
                ends[i] = digit & 1
            reason, t, burning, protected, _ = kernels._evaluate(
                0, sx, sy, dirs, ends, front_step, empty, empty,
                c_num, c_den, i_num, i_den, t_max, False, 0, 0, 0, empty, empty, half)
            enclosed = 1 if reason == kernels.ENCLOSED else 0
            key = (burning, 1 - enclosed, t if enclosed == 1 else (1 << 30), protected)
            if key < best:
                best = key
                best_start = s
                best_code = code
    return best_start, best_code


@dataclass
class OracleResult:
    genome: ConnectedGenome
    outcome: Outcome
    searched: int


def _decode_code(code: int, seq_len: int):
    dirs, ends = [], []
    digits = []
    for _ in range(seq_len):
        digits.append(code % 16)
        code //= 16
    for digit in reversed(digits):
        dirs.append(digit >> 1)
        ends.append(digit & 1)
    return dirs, ends


def brute_force_best(c, t_max: int, seq_len: int, starts: Sequence = ((0, 1),),
                     initial_budget=0, orientation: str = "ccw") -> OracleResult:
    """Enumerate every connected genome of ``seq_len`` loci from each start.

    Genomes are enumerated in lexicographic order of their loci (direction
    major, front before back) and the first fitness-minimal one wins.
    """
    c = parse_rational(c)
    credit = parse_rational(initial_budget)
    space = 16 ** seq_len * len(starts)
    if space > SEARCH_GUARD:
        raise SearchSpaceTooLarge(f"{space} genomes exceed the guard of {SEARCH_GUARD}")
    arr = np.array([tuple(s) for s in starts], dtype=np.int64).reshape(-1, 2)
    s, code = _enumerate(arr, seq_len, c.numerator, c.denominator,
                         credit.numerator, credit.denominator, t_max,
                         -1 if orientation == "ccw" else 1)
    dirs, ends = _decode_code(int(code), seq_len)
    genome = ConnectedGenome.from_arrays(Cell(int(arr[s, 0]), int(arr[s, 1])), dirs, ends)
    config = SimConfig(c=c, t_max=t_max, initial_budget=credit)
    outcome = simulate(ConnectedDecoder(genome, orientation), config)
    return OracleResult(genome, outcome, space)


def oracle_fitness(result: OracleResult):
    return enclosure_fitness(result.outcome)
