"""Strategy encodings: connected barrier genomes and coordinate genomes.

A connected genome is a start cell plus a list of ``(direction, end)``
loci. Each locus grows the barrier by one cell from either its front or
its back end. The start cell is the seed of the barrier: it is the first
cell protected (paid from the budget like any other) and both ends sit on
it until first moved. A start cell that is not free when the first
protection is due is used as an anchor only. A coordinate genome
is a plain set of cells protected nearest-to-the-fire first. A script is
an ordered cell list replayed as written (used to export the scripted
baselines).

All random operators take an explicit ``numpy.random.Generator`` and
return new genome objects.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from firefight.grid import Cell, Direction8, FireError, FireState


class End(enum.IntEnum):
    F = 0
    B = 1


class GenomeParseError(FireError, ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class ConnectedGenome:
    start: Cell
    sequence: tuple

    def __post_init__(self):
        object.__setattr__(self, "start", Cell(*self.start))
        object.__setattr__(
            self, "sequence", tuple((Direction8(d), End(e)) for d, e in self.sequence)
        )

    def __len__(self) -> int:
        return len(self.sequence)

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        dirs = np.fromiter((d for d, _ in self.sequence), dtype=np.int64, count=len(self))
        ends = np.fromiter((e for _, e in self.sequence), dtype=np.int64, count=len(self))
        return dirs, ends

    @classmethod
    def from_arrays(cls, start, dirs, ends) -> "ConnectedGenome":
        return cls(start, tuple(zip((int(d) for d in dirs), (int(e) for e in ends))))


@dataclass(frozen=True)
class CoordinateGenome:
    cells: tuple = ()

    def __post_init__(self):
        seen = dict.fromkeys(Cell(*c) for c in self.cells)
        object.__setattr__(self, "cells", tuple(seen))

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class ScriptGenome:
    cells: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(Cell(*c) for c in self.cells))

    def __len__(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class MutationRates:
    p: float = 0.02
    move_rate: float = 0.05
    add_rate: float = 0.5
    remove_rate: float = 0.02
    move_radius: int = 2

    def __post_init__(self):
        for name in ("p", "move_rate", "add_rate", "remove_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability, got {value}")
        if self.move_radius < 0:
            raise ValueError("move_radius must be non-negative")


@dataclass(frozen=True)
class Window:
    """Inclusive bounding box for coordinate-genome cells."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def contains(self, cell) -> bool:
        return self.x_min <= cell[0] <= self.x_max and self.y_min <= cell[1] <= self.y_max


# -- decoding ---------------------------------------------------------------

def repair_direction(
    state: FireState, anchor: Cell, direction: Direction8, end: End, orientation: str = "ccw"
) -> Optional[Cell]:
    """First free neighbour of ``anchor`` found by rotating away from ``direction``.

    With the default orientation the front rotates counter-clockwise and
    the back clockwise; ``orientation="cw"`` swaps the two. The rotation
    starts one step past ``direction`` and wraps all the way round, so the
    original direction is checked last.
    """
    front_step = -1 if orientation == "ccw" else 1
    step = front_step if end == End.F else -front_step
    for k in range(1, 9):
        d = Direction8((direction + step * k) % 8)
        cand = anchor + d.offset
        if state.is_free(cand):
            return cand
    return None


@dataclass
class GenomeCursor:
    front: Cell
    back: Cell
    next_index: int = 0
    exhausted: bool = False
    misses: int = 0
    seeded: bool = False


class ConnectedDecoder:
    """Stateful decoder feeding a connected genome into :func:`simulate`."""

    MAX_MISSES = 8

    def __init__(self, genome: ConnectedGenome, orientation: str = "ccw"):
        self.genome = genome
        self.orientation = orientation
        self.cursor = GenomeCursor(genome.start, genome.start)

    def next_cell(self, state: FireState) -> Optional[Cell]:
        while True:
            cell, self.cursor = decode_connected_step(
                self.genome, self.cursor, state, self.orientation
            )
            if cell is not None or self.cursor.exhausted:
                return cell


def decode_connected_step(
    genome: ConnectedGenome, cursor: GenomeCursor, state: FireState, orientation: str = "ccw"
) -> tuple[Optional[Cell], GenomeCursor]:
    """Apply the next locus; returns the cell to protect (or None) and the new cursor.

    The very first call yields the start cell itself without consuming a
    locus.
    """
    if not cursor.seeded:
        cursor = replace(cursor, seeded=True)
        if state.is_free(genome.start):
            return genome.start, cursor
    if cursor.exhausted or cursor.next_index >= len(genome.sequence):
        return None, replace(cursor, exhausted=True)
    direction, end = genome.sequence[cursor.next_index]
    anchor = cursor.front if end == End.F else cursor.back
    cand = anchor + direction.offset
    if not state.is_free(cand):
        cand = repair_direction(state, anchor, direction, end, orientation)
    nxt = cursor.next_index + 1
    if cand is None:
        misses = cursor.misses + 1
        exhausted = misses >= ConnectedDecoder.MAX_MISSES or nxt >= len(genome.sequence)
        return None, replace(cursor, next_index=nxt, misses=misses, exhausted=exhausted)
    if end == End.F:
        new = replace(cursor, front=cand, next_index=nxt, misses=0)
    else:
        new = replace(cursor, back=cand, next_index=nxt, misses=0)
    return cand, new


def coordinate_order_key(cell: Cell, origin: Cell) -> tuple:
    return (abs(cell[0] - origin[0]) + abs(cell[1] - origin[1]), -cell[1], cell[0])


def decode_coordinate(genome: CoordinateGenome, fire_origin: Cell) -> list[Cell]:
    """Cells sorted by L1 distance to the fire, then y descending, then x ascending."""
    return sorted(genome.cells, key=lambda c: coordinate_order_key(c, fire_origin))


class CoordinateDecoder:
    """Yields the decoded cells in order, skipping those that are no longer free.

    ``forbidden_row_max`` excludes cells on or below that row (the highway).
    """

    def __init__(self, genome: CoordinateGenome, fire_origin: Cell,
                 forbidden_row_max: Optional[int] = None):
        self.cells = decode_coordinate(genome, Cell(*fire_origin))
        if forbidden_row_max is not None:
            self.cells = [c for c in self.cells if c.y > forbidden_row_max]
        self.index = 0

    def next_cell(self, state: FireState) -> Optional[Cell]:
        while self.index < len(self.cells):
            cell = self.cells[self.index]
            self.index += 1
            if state.is_free(cell):
                return cell
        return None


# -- random operators ---------------------------------------------------------

def random_loci(length: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    return rng.integers(0, 8, size=length), rng.integers(0, 2, size=length)


def random_connected(length: int, start, rng: np.random.Generator) -> ConnectedGenome:
    if length < 1:
        raise ValueError("a connected genome needs at least one locus")
    dirs, ends = random_loci(length, rng)
    return ConnectedGenome.from_arrays(start, dirs, ends)


def random_coordinate(count: int, window: Window, rng: np.random.Generator) -> CoordinateGenome:
    area = (window.x_max - window.x_min + 1) * (window.y_max - window.y_min + 1)
    if count > area:
        raise ValueError("window too small for the requested number of cells")
    flat = rng.choice(area, size=count, replace=False) if count else []
    width = window.x_max - window.x_min + 1
    return CoordinateGenome(tuple(
        Cell(window.x_min + int(i) % width, window.y_min + int(i) // width) for i in flat
    ))


def mutate_loci(dirs: np.ndarray, ends: np.ndarray, p: float,
                rng: np.random.Generator) -> int:
    """Resample each locus with probability ``p``, in place. Works on any shape."""
    mask = rng.random(dirs.shape) < p
    k = int(mask.sum())
    if k:
        dirs[mask] = rng.integers(0, 8, size=k)
        ends[mask] = rng.integers(0, 2, size=k)
    return k


def crossover_cut(len_a: int, len_b: int, rng: np.random.Generator) -> int:
    shortest = min(len_a, len_b)
    return int(rng.integers(1, shortest)) if shortest > 1 else 1


def mutate_connected(genome: ConnectedGenome, rates: MutationRates,
                     rng: np.random.Generator) -> ConnectedGenome:
    dirs, ends = genome.as_arrays()
    if mutate_loci(dirs, ends, rates.p, rng) == 0:
        return genome
    return ConnectedGenome.from_arrays(genome.start, dirs, ends)


def crossover(a: ConnectedGenome, b: ConnectedGenome, rng: np.random.Generator,
              cut: Optional[int] = None) -> ConnectedGenome:
    """Single-point crossover: a's loci before the cut, b's from the cut on."""
    if not a.sequence or not b.sequence:
        raise ValueError("crossover needs non-empty parents")
    if cut is None:
        cut = crossover_cut(len(a), len(b), rng)
    return ConnectedGenome(a.start, a.sequence[:cut] + b.sequence[cut:])


def mutate_coordinate(genome: CoordinateGenome, rates: MutationRates,
                      rng: np.random.Generator, window: Window) -> CoordinateGenome:
    out = []
    r = rates.move_radius
    for cell in genome.cells:
        u = rng.random()
        if u < rates.remove_rate:
            continue
        if u < rates.remove_rate + rates.move_rate:
            dx, dy = rng.integers(-r, r + 1, size=2)
            moved = Cell(int(np.clip(cell.x + dx, window.x_min, window.x_max)),
                         int(np.clip(cell.y + dy, window.y_min, window.y_max)))
            out.append(moved)
        else:
            out.append(cell)
    if rng.random() < rates.add_rate:
        out.append(Cell(int(rng.integers(window.x_min, window.x_max + 1)),
                        int(rng.integers(window.y_min, window.y_max + 1))))
    return CoordinateGenome(tuple(out))


# -- text format ----------------------------------------------------------------
#
#   # comment lines and blank lines are ignored
#   kind connected|coordinate|script   (optional, inferred otherwise)
#   start X Y                      (connected only, must come first)
#   DIR F|B                        (connected loci, DIR in N NE E SE S SW W NW)
#   cell X Y                       (coordinate or script cells)

def format_genome(genome) -> str:
    if isinstance(genome, ConnectedGenome):
        lines = [f"start {genome.start.x} {genome.start.y}"]
        lines += [f"{d.name} {e.name}" for d, e in genome.sequence]
    elif isinstance(genome, CoordinateGenome):
        # The kind line is only needed to tell an empty set from an empty file.
        lines = [f"cell {c.x} {c.y}" for c in genome.cells] or ["kind coordinate"]
    elif isinstance(genome, ScriptGenome):
        lines = ["kind script"] + [f"cell {c.x} {c.y}" for c in genome.cells]
    else:
        raise TypeError(f"not a genome: {genome!r}")
    return "\n".join(lines) + "\n"


def parse_genome(text: str):
    kind = None
    start = None
    loci: list = []
    cells: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "kind":
                if len(parts) != 2 or parts[1] not in ("connected", "coordinate", "script"):
                    raise GenomeParseError(lineno, f"bad kind line {raw!r}")
                kind = parts[1]
            elif head == "start":
                if len(parts) != 3:
                    raise GenomeParseError(lineno, "start needs two integers")
                if start is not None or loci:
                    raise GenomeParseError(lineno, "start must appear once, before loci")
                start = Cell(int(parts[1]), int(parts[2]))
            elif head == "cell":
                if len(parts) != 3:
                    raise GenomeParseError(lineno, "cell needs two integers")
                cells.append(Cell(int(parts[1]), int(parts[2])))
            elif head in Direction8.__members__:
                if len(parts) != 2 or parts[1] not in ("F", "B"):
                    raise GenomeParseError(lineno, f"bad locus {raw!r}")
                loci.append((Direction8[head], End[parts[1]]))
            else:
                raise GenomeParseError(lineno, f"unrecognised line {raw!r}")
        except ValueError as exc:
            if isinstance(exc, GenomeParseError):
                raise
            raise GenomeParseError(lineno, str(exc)) from exc
    if kind is None:
        if not (cells or loci or start is not None):
            raise GenomeParseError(0, "empty genome text")
        kind = "coordinate" if cells and not loci and start is None else "connected"
    if kind == "connected":
        if cells:
            raise GenomeParseError(0, "cell lines in a connected genome")
        if start is None:
            raise GenomeParseError(0, "connected genome without start line")
        return ConnectedGenome(start, tuple(loci))
    if loci or start is not None:
        raise GenomeParseError(0, f"loci in a {kind} genome")
    if kind == "script":
        return ScriptGenome(tuple(cells))
    if len(set(cells)) != len(cells):
        raise GenomeParseError(0, "duplicate cells in coordinate genome")
    return CoordinateGenome(tuple(cells))


def load_genome(path) -> object:
    with open(path) as fh:
        return parse_genome(fh.read())


def save_genome(genome, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_genome(genome))
