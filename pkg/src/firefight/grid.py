"""Sparse infinite-grid fire dynamics.

The fire lives on Z^2 with 4-neighbour spread. Each simulation step first
lets the fighter protect as many cells as the budget account allows, then
tests for enclosure, then spreads the fire by one ring. Burning and
protected cells are kept in dicts keyed by coordinate so the grid never
needs bounds; the dict values record when each cell changed state, which
the frame renderer uses for shading and labels.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Protocol


class FireError(Exception):
    """Base class for simulator errors."""


class CellBurning(FireError):
    pass


class CellAlreadyProtected(FireError):
    pass


class CellForbidden(FireError):
    """Cell lies on or beyond the highway and may not be protected."""


class BudgetExhausted(FireError):
    pass


class ConfigInvalid(FireError, ValueError):
    pass


class Cell(NamedTuple):
    x: int
    y: int

    def __add__(self, other):  # type: ignore[override]
        return Cell(self.x + other[0], self.y + other[1])

    def l1(self, other: "Cell") -> int:
        return abs(self.x - other.x) + abs(self.y - other.y)


NEIGHBOURS4 = ((0, 1), (1, 0), (0, -1), (-1, 0))


class Direction8(enum.IntEnum):
    """Compass directions in clockwise order, N = +y."""

    N = 0
    NE = 1
    E = 2
    SE = 3
    S = 4
    SW = 5
    W = 6
    NW = 7

    @property
    def offset(self) -> tuple[int, int]:
        return _OFFSETS[self]

    def cw(self) -> "Direction8":
        return Direction8((self + 1) % 8)

    def ccw(self) -> "Direction8":
        return Direction8((self - 1) % 8)


_OFFSETS = ((0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1))


def parse_rational(value) -> Fraction:
    """Read a budget such as ``"1.7"``, ``"17/10"`` or ``2`` exactly.

    Floats are converted through their shortest repr so that ``1.1`` means
    11/10 rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        value = repr(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigInvalid(f"not a rational number: {value!r}") from exc


@dataclass
class BudgetAccount:
    c: Fraction
    initial: Fraction = Fraction(0)
    spent: int = 0

    def __post_init__(self):
        self.c = parse_rational(self.c)
        self.initial = parse_rational(self.initial)
        if self.c < 0 or self.initial < 0:
            raise ConfigInvalid("budget income and initial credit must be non-negative")

    def capacity(self, t: int) -> int:
        """Total number of cells protectable up to and including step t.

        The credit may be fractional: an account that opens with balance
        ``b`` instead of ``c`` has credit ``b - c``.
        """
        return (self.initial + self.c * t).__floor__()


def budget_available(account: BudgetAccount, t: int) -> int:
    """Cells still protectable at step ``t``: floor(initial + c*t) - spent."""
    return account.capacity(t) - account.spent


@dataclass
class FireState:
    """Burning and protected cells plus clock and budget ledger.

    ``burning`` maps a cell to the spread index at which it ignited (the
    origin has 0); ``protected`` maps a cell to the step that protected it
    (0 for pre-protected cells). ``front`` holds the cells ignited by the
    most recent spread: older burning cells can have no free neighbour, so
    only the front needs to be scanned.
    """

    budget: BudgetAccount
    burning: dict = field(default_factory=dict)
    protected: dict = field(default_factory=dict)
    t: int = 0
    front: list = field(default_factory=list)
    floor_row: Optional[int] = None

    @classmethod
    def ignite(
        cls,
        c,
        origin: Cell = Cell(0, 0),
        initial_budget=0,
        initial_protected: Iterable[Cell] = (),
        floor_row: Optional[int] = None,
    ) -> "FireState":
        origin = Cell(*origin)
        state = cls(budget=BudgetAccount(parse_rational(c), initial_budget), floor_row=floor_row)
        state.burning[origin] = 0
        state.front = [origin]
        for cell in initial_protected:
            protect(state, Cell(*cell), stamp=0)
        return state

    def copy(self) -> "FireState":
        return FireState(
            budget=BudgetAccount(self.budget.c, self.budget.initial, self.budget.spent),
            burning=dict(self.burning),
            protected=dict(self.protected),
            t=self.t,
            front=list(self.front),
            floor_row=self.floor_row,
        )

    def is_free(self, cell) -> bool:
        """Neither burning nor protected, and protectable at all."""
        if self.floor_row is not None and cell[1] <= self.floor_row:
            return False
        return cell not in self.burning and cell not in self.protected

    def available(self) -> int:
        """Budget available in the protect phase of the upcoming step."""
        return budget_available(self.budget, self.t + 1)


def protect(state: FireState, cell: Cell, stamp: Optional[int] = None) -> FireState:
    """Protect ``cell`` during the current protect phase.

    The cell is stamped with the step being played (``state.t + 1``) unless
    ``stamp`` says otherwise; the budget check is the caller's job, see
    :func:`simulate`.
    """
    cell = Cell(*cell)
    if cell in state.burning:
        raise CellBurning(cell)
    if cell in state.protected:
        raise CellAlreadyProtected(cell)
    if state.floor_row is not None and cell.y <= state.floor_row:
        raise CellForbidden(cell)
    state.protected[cell] = state.t + 1 if stamp is None else stamp
    state.budget.spent += 1
    return state


def spread(state: FireState) -> FireState:
    """Ignite every free 4-neighbour of the burning set; advance the clock."""
    state.t += 1
    burning, protected = state.burning, state.protected
    new_front = []
    for x, y in state.front:
        for dx, dy in NEIGHBOURS4:
            nb = Cell(x + dx, y + dy)
            if nb not in burning and nb not in protected:
                burning[nb] = state.t
                new_front.append(nb)
    state.front = new_front
    return state


def is_enclosed(state: FireState) -> bool:
    """True iff spreading would not ignite anything."""
    burning, protected = state.burning, state.protected
    for x, y in state.front:
        for dx, dy in NEIGHBOURS4:
            nb = (x + dx, y + dy)
            if nb not in burning and nb not in protected:
                return False
    return True


def highway_reached(state: FireState, highway_row: int) -> bool:
    return any(cell[1] == highway_row for cell in state.burning)


def distance_profile(state: FireState, highway_row: int) -> list[int]:
    """Count of burning cells per vertical distance to the highway row."""
    dists = [cell[1] - highway_row for cell in state.burning]
    if not dists:
        return []
    profile = [0] * (max(dists) + 1)
    for d in dists:
        if d >= 0:
            profile[d] += 1
    return profile


class Scenario(str, enum.Enum):
    ENCLOSURE = "enclosure"
    HIGHWAY = "highway"


class Reason(str, enum.Enum):
    ENCLOSED = "enclosed"
    HIGHWAY_REACHED = "highway_reached"
    TIME_LIMIT = "time_limit"
    GENOME_EXHAUSTED = "genome_exhausted"


@dataclass(frozen=True)
class SimConfig:
    c: Fraction
    t_max: int
    initial_budget: Fraction = Fraction(0)
    scenario: Scenario = Scenario.ENCLOSURE
    fire_origin: Cell = Cell(0, 0)
    highway_row: int = 0
    initial_protected: tuple = ()
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "c", parse_rational(self.c))
        object.__setattr__(self, "initial_budget", parse_rational(self.initial_budget))
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        object.__setattr__(self, "fire_origin", Cell(*self.fire_origin))
        object.__setattr__(
            self, "initial_protected", tuple(Cell(*p) for p in self.initial_protected)
        )
        if self.t_max < 1:
            raise ConfigInvalid("t_max must be at least 1")
        if self.c < 0 or self.initial_budget < 0:
            raise ConfigInvalid("budget income and initial budget must be non-negative")
        if self.scenario is Scenario.HIGHWAY and self.fire_origin.y <= self.highway_row:
            raise ConfigInvalid("fire origin must lie strictly above the highway row")
        if len(self.initial_protected) > self.initial_budget:
            raise ConfigInvalid("pre-protected cells must be paid from the initial budget")

    @classmethod
    def highway(cls, c, d: int, t_max: int, **kw) -> "SimConfig":
        """Highway on row 0 and the fire ``d`` rows above it."""
        return cls(c=c, t_max=t_max, scenario=Scenario.HIGHWAY,
                   fire_origin=Cell(0, d), highway_row=0, **kw)


@dataclass
class Frame:
    """Snapshot taken after the protect phase of step ``t``."""

    t: int
    burning: dict
    protected: dict


@dataclass
class Outcome:
    reason: Reason
    end_time: int
    burning_count: int
    protected_count: int
    distance_profile: list = field(default_factory=list)
    protections_per_step: list = field(default_factory=list)
    frames: Optional[list] = None
    state: Optional[FireState] = field(default=None, repr=False, compare=False)

    @property
    def enclosed(self) -> bool:
        return self.reason is Reason.ENCLOSED


class Decoder(Protocol):
    """Supplies protection targets one at a time.

    ``next_cell`` returns a cell to protect or ``None`` once the strategy
    has nothing more to offer. Implementations are responsible for
    returning free cells; :func:`simulate` silently skips any that are not.
    """

    def next_cell(self, state: FireState) -> Optional[Cell]: ...


def simulate(decoder: Decoder, config: SimConfig, record_frames: bool = False) -> Outcome:
    """Play ``decoder`` against the fire for up to ``config.t_max`` steps.

    Each step: protect while budget remains, test enclosure, spread, test
    highway contact. Step ``t`` therefore sees the fire after ``t - 1``
    spreads. When the horizon is hit, the run stops after the protect phase
    of step ``t_max`` without a final spread, so the reported count is the
    burning set shown at that step.
    """
    if config.scenario is Scenario.HIGHWAY and config.fire_origin.y <= config.highway_row:
        raise ConfigInvalid("fire origin must lie strictly above the highway row")
    highway = config.scenario is Scenario.HIGHWAY
    state = FireState.ignite(config.c, config.fire_origin, config.initial_budget,
                             config.initial_protected,
                             floor_row=config.highway_row if highway else None)
    frames = [] if record_frames else None
    per_step = []
    exhausted = False
    reason = None
    for t in range(1, config.t_max + 1):
        placed = 0
        while not exhausted and budget_available(state.budget, t) >= 1:
            cell = decoder.next_cell(state)
            if cell is None:
                exhausted = True
                break
            if not state.is_free(cell):
                continue
            protect(state, cell)
            placed += 1
        per_step.append(placed)
        if frames is not None:
            frames.append(Frame(t, dict(state.burning), dict(state.protected)))
        if not highway and is_enclosed(state):
            reason = Reason.ENCLOSED
            break
        if t == config.t_max and not highway:
            break
        spread(state)
        if highway and highway_reached(state, config.highway_row):
            reason = Reason.HIGHWAY_REACHED
            if frames is not None:
                frames[-1] = Frame(t, dict(state.burning), dict(state.protected))
            break
    if reason is None:
        reason = Reason.GENOME_EXHAUSTED if exhausted else Reason.TIME_LIMIT
    return Outcome(
        reason=reason,
        end_time=t,
        burning_count=len(state.burning),
        protected_count=len(state.protected),
        distance_profile=distance_profile(state, config.highway_row) if highway else [],
        protections_per_step=per_step,
        frames=frames,
        state=state,
    )


class ScriptedDecoder:
    """Replays a fixed list of cells, skipping any that are no longer free."""

    def __init__(self, cells: Iterable):
        self.cells = [Cell(*c) for c in cells]
        self.index = 0

    def next_cell(self, state: FireState) -> Optional[Cell]:
        while self.index < len(self.cells):
            cell = self.cells[self.index]
            self.index += 1
            if state.is_free(cell):
                return cell
        return None
