"""Text and SVG snapshots of simulation frames."""
from __future__ import annotations

from pathlib import Path
from typing import Iterable, Optional

from firefight.grid import Frame

BURNING_CHAR = "#"
PROTECTED_CHAR = "o"
FREE_CHAR = "."
HIGHWAY_CHAR = "="

CELL_PX = 12
PROTECTED_FILL = "#2b6cb0"
HIGHWAY_FILL = "#4a4a4a"


def _bounds(frames: Iterable[Frame], highway_row: Optional[int], margin: int = 1):
    xs, ys = [0], [0]
    for fr in frames:
        for cell in list(fr.burning) + list(fr.protected):
            xs.append(cell[0])
            ys.append(cell[1])
    if highway_row is not None:
        ys.append(highway_row)
    return min(xs) - margin, max(xs) + margin, min(ys) - margin, max(ys) + margin


def frame_to_ascii(frame: Frame, highway_row: Optional[int] = None, bounds=None) -> str:
    """Rows from top (largest y) to bottom, one character per cell."""
    x0, x1, y0, y1 = bounds or _bounds([frame], highway_row)
    lines = []
    for y in range(y1, y0 - 1, -1):
        row = []
        for x in range(x0, x1 + 1):
            cell = (x, y)
            if cell in frame.burning:
                row.append(BURNING_CHAR)
            elif cell in frame.protected:
                row.append(PROTECTED_CHAR)
            elif highway_row is not None and y == highway_row:
                row.append(HIGHWAY_CHAR)
            else:
                row.append(FREE_CHAR)
        lines.append("".join(row))
    return "\n".join(lines) + "\n"


def _fire_colour(age: int, oldest: int) -> str:
    # Fresh fire is bright yellow, old fire deep red.
    s = 0.0 if oldest <= 0 else min(1.0, age / oldest)
    g = int(220 * (1 - s))
    r = int(255 - 90 * s)
    return f"#{r:02x}{g:02x}00"


def frame_to_svg(frame: Frame, highway_row: Optional[int] = None, bounds=None,
                 cell_px: int = CELL_PX) -> str:
    """SVG drawing of a frame; burning cells are shaded by ignition time."""
    x0, x1, y0, y1 = bounds or _bounds([frame], highway_row)
    w = (x1 - x0 + 1) * cell_px
    h = (y1 - y0 + 1) * cell_px
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]

    def rect(x, y, fill):
        px = (x - x0) * cell_px
        py = (y1 - y) * cell_px
        parts.append(f'<rect x="{px}" y="{py}" width="{cell_px}" height="{cell_px}" '
                     f'fill="{fill}" stroke="#dddddd" stroke-width="0.5"/>')

    if highway_row is not None and y0 <= highway_row <= y1:
        for x in range(x0, x1 + 1):
            if (x, highway_row) not in frame.burning:
                rect(x, highway_row, HIGHWAY_FILL)
    latest = max(frame.burning.values(), default=0)
    for (x, y), ignited in frame.burning.items():
        rect(x, y, _fire_colour(latest - ignited, latest))
    for (x, y) in frame.protected:
        rect(x, y, PROTECTED_FILL)
    parts.append(f'<text x="2" y="{h - 3}" font-size="10" font-family="monospace">t={frame.t}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_frames(frames, out_dir, fmt: str = "ascii", every: int = 1,
                 highway_row: Optional[int] = None) -> list:
    """Write ``frame_{t:04}.txt`` or ``.svg`` files, every ``every``-th frame plus the last.

    All frames share one bounding box so they line up when flipped through.
    """
    if fmt == "none" or not frames:
        return []
    if fmt not in ("ascii", "svg"):
        raise ValueError(f"unknown render format {fmt!r}")
    every = max(1, int(every))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bounds = _bounds(frames, highway_row)
    chosen = [fr for i, fr in enumerate(frames) if i % every == 0]
    if chosen[-1] is not frames[-1]:
        chosen.append(frames[-1])
    paths = []
    for fr in chosen:
        if fmt == "ascii":
            path = out / f"frame_{fr.t:04}.txt"
            path.write_text(frame_to_ascii(fr, highway_row, bounds))
        else:
            path = out / f"frame_{fr.t:04}.svg"
            path.write_text(frame_to_svg(fr, highway_row, bounds))
        paths.append(path)
    return paths
