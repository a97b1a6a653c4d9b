"""Compiled dense-grid evaluators used inside the optimisation loops.

These reproduce :func:`firefight.grid.simulate` driven by a connected or a
coordinate decoder, bit for bit, on a bounded array around the fire
origin. The array is sized so that neither the fire (which moves at most
one cell per spread) nor the barrier (which moves at most one cell per
locus) can leave it. The sparse simulator stays the reference; the test
suite checks the two agree on random genomes.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from firefight.grid import Reason

FREE, BURNING, PROTECTED = 0, 1, 2

REASONS = (Reason.ENCLOSED, Reason.HIGHWAY_REACHED, Reason.TIME_LIMIT, Reason.GENOME_EXHAUSTED)
ENCLOSED, HIGHWAY_REACHED, TIME_LIMIT, GENOME_EXHAUSTED = 0, 1, 2, 3

_DX8 = np.array([0, 1, 1, 1, 0, -1, -1, -1], dtype=np.int64)
_DY8 = np.array([1, 1, 0, -1, -1, -1, 0, 1], dtype=np.int64)
_DX4 = np.array([0, 1, 0, -1], dtype=np.int64)
_DY4 = np.array([1, 0, -1, 0], dtype=np.int64)


@njit(cache=True)
def _is_free(grid, ix, iy, floor_iy):
    if iy <= floor_iy:
        return False
    return grid[ix, iy] == FREE


@njit(cache=True)
def _evaluate(
    kind,            # 0 connected, 1 coordinate
    start_x, start_y, dirs, ends, front_step,
    cells_x, cells_y,
    c_num, c_den, i_num, i_den, t_max,
    highway, origin_x, origin_y, highway_row,
    pre_x, pre_y,
    half,
):
    size = 2 * half + 1
    grid = np.zeros((size, size), dtype=np.int8)
    ox = origin_x - half
    oy = origin_y - half
    floor_iy = highway_row - oy if highway else -1
    highway_iy = highway_row - oy

    front = np.empty(size * size, dtype=np.int32)
    nxt = np.empty(size * size, dtype=np.int32)
    n_front = 1
    front[0] = half * size + half
    grid[half, half] = BURNING
    n_burning = 1
    spent = 0
    n_protected = 0
    for i in range(pre_x.shape[0]):
        grid[pre_x[i] - ox, pre_y[i] - oy] = PROTECTED
        spent += 1
        n_protected += 1

    fx = start_x - ox
    fy = start_y - oy
    bx = fx
    by = fy
    idx = 0
    misses = 0
    seeded = kind != 0
    exhausted = False
    reason = TIME_LIMIT
    t = 0
    for t in range(1, t_max + 1):
        cap = (i_num * c_den + c_num * t * i_den) // (i_den * c_den)
        while not exhausted and cap - spent >= 1:
            # ---- decode one cell -------------------------------------
            got = False
            cx = 0
            cy = 0
            if not seeded:
                seeded = True
                if _is_free(grid, fx, fy, floor_iy):
                    cx = fx
                    cy = fy
                    got = True
            if kind == 0 and not got:
                while True:
                    if idx >= dirs.shape[0]:
                        exhausted = True
                        break
                    d = dirs[idx]
                    e = ends[idx]
                    if e == 0:
                        ax = fx
                        ay = fy
                    else:
                        ax = bx
                        ay = by
                    cx = ax + _DX8[d]
                    cy = ay + _DY8[d]
                    if not _is_free(grid, cx, cy, floor_iy):
                        step = front_step if e == 0 else -front_step
                        found = False
                        for k in range(1, 9):
                            dd = (d + step * k) % 8
                            cx = ax + _DX8[dd]
                            cy = ay + _DY8[dd]
                            if _is_free(grid, cx, cy, floor_iy):
                                found = True
                                break
                    else:
                        found = True
                    idx += 1
                    if found:
                        misses = 0
                        if e == 0:
                            fx = cx
                            fy = cy
                        else:
                            bx = cx
                            by = cy
                        got = True
                        break
                    misses += 1
                    if misses >= 8 or idx >= dirs.shape[0]:
                        exhausted = True
                        break
            else:
                while idx < cells_x.shape[0]:
                    cx = cells_x[idx] - ox
                    cy = cells_y[idx] - oy
                    idx += 1
                    if 0 <= cx < size and 0 <= cy < size:
                        if _is_free(grid, cx, cy, floor_iy):
                            got = True
                            break
                    elif not (highway and cells_y[idx - 1] <= highway_row):
                        # outside the array: the fire can never get there
                        got = True
                        break
                if not got:
                    exhausted = True
            if not got:
                break
            if 0 <= cx < size and 0 <= cy < size:
                grid[cx, cy] = PROTECTED
            spent += 1
            n_protected += 1
        # ---- enclosure test ----------------------------------------------
        if not highway:
            open_front = False
            for i in range(n_front):
                px = front[i] // size
                py = front[i] % size
                for k in range(4):
                    if grid[px + _DX4[k], py + _DY4[k]] == FREE:
                        open_front = True
                        break
                if open_front:
                    break
            if not open_front:
                reason = ENCLOSED
                break
            if t == t_max:
                break
        # ---- spread -----------------------------------------------------------
        n_next = 0
        reached = False
        for i in range(n_front):
            px = front[i] // size
            py = front[i] % size
            for k in range(4):
                qx = px + _DX4[k]
                qy = py + _DY4[k]
                if grid[qx, qy] == FREE:
                    grid[qx, qy] = BURNING
                    nxt[n_next] = qx * size + qy
                    n_next += 1
                    if highway and qy == highway_iy:
                        reached = True
        n_burning += n_next
        tmp = front
        front = nxt
        nxt = tmp
        n_front = n_next
        if reached:
            reason = HIGHWAY_REACHED
            break
    if reason == TIME_LIMIT and exhausted:
        reason = GENOME_EXHAUSTED

    profile = np.zeros(1, dtype=np.int64)
    if highway:
        top = 0
        for ix in range(size):
            for iy in range(size):
                if grid[ix, iy] == BURNING and iy - highway_iy > top:
                    top = iy - highway_iy
        profile = np.zeros(top + 1, dtype=np.int64)
        for ix in range(size):
            for iy in range(size):
                if grid[ix, iy] == BURNING:
                    profile[iy - highway_iy] += 1
    return reason, t, n_burning, n_protected, profile


_EMPTY = np.zeros(0, dtype=np.int64)


def _half_extent(config, reach: int) -> int:
    return max(config.t_max + 2, reach + 2)


def _pre_arrays(config):
    if not config.initial_protected:
        return _EMPTY, _EMPTY
    xs = np.array([c.x for c in config.initial_protected], dtype=np.int64)
    ys = np.array([c.y for c in config.initial_protected], dtype=np.int64)
    return xs, ys


def evaluate_connected(genome, config, orientation: str = "ccw"):
    """Run a connected genome; returns ``(reason, end_time, burning, protected, profile)``."""
    dirs, ends = genome.as_arrays()
    return evaluate_loci(genome.start, dirs, ends, config, orientation)


def evaluate_loci(start, dirs, ends, config, orientation: str = "ccw"):
    """Same as :func:`evaluate_connected` for raw int64 locus arrays."""
    o = config.fire_origin
    sx, sy = start
    reach = max(abs(sx - o.x), abs(sy - o.y)) + len(dirs)
    pre_x, pre_y = _pre_arrays(config)
    for c in config.initial_protected:
        reach = max(reach, abs(c.x - o.x), abs(c.y - o.y))
    res = _evaluate(
        0, sx, sy, dirs, ends, -1 if orientation == "ccw" else 1,
        _EMPTY, _EMPTY,
        config.c.numerator, config.c.denominator,
        config.initial_budget.numerator, config.initial_budget.denominator, config.t_max,
        config.scenario.value == "highway", o.x, o.y, config.highway_row,
        pre_x, pre_y, _half_extent(config, reach),
    )
    return _wrap(res, config)


def evaluate_coordinate(genome, config):
    """Run a coordinate genome (cells decoded in L1 order)."""
    from firefight.genomes import decode_coordinate

    o = config.fire_origin
    order = decode_coordinate(genome, o)
    xs = np.array([c.x for c in order], dtype=np.int64)
    ys = np.array([c.y for c in order], dtype=np.int64)
    pre_x, pre_y = _pre_arrays(config)
    reach = 0
    for c in config.initial_protected:
        reach = max(reach, abs(c.x - o.x), abs(c.y - o.y))
    res = _evaluate(
        1, 0, 0, _EMPTY, _EMPTY, -1,
        xs, ys,
        config.c.numerator, config.c.denominator,
        config.initial_budget.numerator, config.initial_budget.denominator, config.t_max,
        config.scenario.value == "highway", o.x, o.y, config.highway_row,
        pre_x, pre_y, _half_extent(config, reach),
    )
    return _wrap(res, config)


def _wrap(res, config):
    reason, t, burning, protected, profile = res
    prof = [int(v) for v in profile] if config.scenario.value == "highway" else []
    return REASONS[reason], int(t), int(burning), int(protected), prof
