"""3x3 playout pattern table: loading and neighborhood encoding.

The data file (data/patterns_3x3.txt) holds one concrete pattern per line:
8 context characters in NW N NE W E SW S SE order around an empty center,
alphabet B (stone of the player to move), W (opponent stone), . (empty),
# (board edge), followed by a weight.

At runtime a neighborhood is packed into a 16-bit code, 2 bits per cell in the
same order: 0 empty, 1 mover's stone, 2 opponent stone, 3 edge.  Lookup is a
flat 65536-entry table: ``match[code]`` is 1 for a pattern hit and
``weight[code]`` carries the pattern weight (0 where there is no pattern).
"""

import pathlib

import numpy as np

from .board import EMPTY

CHAR_VALUE = {".": 0, "B": 1, "W": 2, "#": 3}

# (dr, dc) in NW N NE W E SW S SE order; the packing order is frozen
OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

DATA_PATH = pathlib.Path(__file__).parent / "data" / "patterns_3x3.txt"

_tables = None


def tables():
    """(match uint8[65536], weight float32[65536]) from the packaged data file."""
    global _tables
    if _tables is None:
        match = np.zeros(65536, dtype=np.uint8)
        weight = np.zeros(65536, dtype=np.float32)
        for line in DATA_PATH.read_text().splitlines():
            # comment lines have prose after "# "; pattern contexts are 8 chars
            # and may legitimately start with '#' (edge cells)
            parts = line.split()
            if len(parts) != 2 or len(parts[0]) != 8:
                continue
            ctx, w = parts
            code = 0
            for i, ch in enumerate(ctx):
                code |= CHAR_VALUE[ch] << (2 * i)
            match[code] = 1
            weight[code] = float(w)
        match.setflags(write=False)
        weight.setflags(write=False)
        _tables = (match, weight)
    return _tables


def code_at(grid, size, pt, mover):
    """Pack the 3x3 neighborhood of pt on a flat grid, mover-relative."""
    r, c = divmod(pt, size)
    code = 0
    for i, (dr, dc) in enumerate(OFFSETS):
        rr, cc = r + dr, c + dc
        if 0 <= rr < size and 0 <= cc < size:
            g = int(grid[rr * size + cc])
            v = 0 if g == EMPTY else (1 if g == mover else 2)
        else:
            v = 3
        code |= v << (2 * i)
    return code


def matches_at(grid, size, pt, mover):
    match, _ = tables()
    return bool(match[code_at(grid, size, pt, mover)])


def weight_at(grid, size, pt, mover):
    _, weight = tables()
    return float(weight[code_at(grid, size, pt, mover)])
