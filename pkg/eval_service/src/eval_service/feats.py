"""Input planes for the network, extracted from a Goban.

The layout is the engine's evaluator wire contract and must stay aligned
with it bit for bit, since at serve time the engine extracts these planes
itself and ships them in the request:

  0-2   our stones with exactly 1 / exactly 2 / >=3 liberties
  3-5   the same for the opponent
  6     ko point
  7-9   our stones / opponent stones / empty
  10-11 history, exp(-0.1 * plies since the stone appeared)
  12-20 opponent rank, cumulative thermometer over 0..9
  21    board border
  22    exp(-0.5 * squared distance to board center)
  23-24 our / opponent territory by strict nearest-stone distance

The standard set is the first 21 planes; extended appends the last 4.
"""

from collections import deque

import numpy as np

from .goban import EMPTY, group_at, opponent

STANDARD = "standard"
EXTENDED = "extended"

HISTORY_DECAY = 0.1
MASK_DECAY = 0.5


def plane_count(set_kind):
    if set_kind == STANDARD:
        return 21
    if set_kind == EXTENDED:
        return 25
    raise ValueError("unknown feature set %r" % (set_kind,))


def _bfs_distance(size, sources):
    dist = np.full((size, size), -1, dtype=np.int32)
    q = deque()
    for r, c in zip(*np.nonzero(sources)):
        dist[r, c] = 0
        q.append((int(r), int(c)))
    while q:
        r, c = q.popleft()
        d = dist[r, c] + 1
        for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= rr < size and 0 <= cc < size and dist[rr, cc] < 0:
                dist[rr, cc] = d
                q.append((rr, cc))
    return dist


_mask_cache = {}


def _position_mask(size):
    m = _mask_cache.get(size)
    if m is None:
        center = (size - 1) / 2.0
        r = np.arange(size, dtype=np.float64) - center
        m = np.exp(-MASK_DECAY * (r[:, None] ** 2 + r[None, :] ** 2))
        m = m.astype(np.float32)
        _mask_cache[size] = m
    return m


def extract(board, opponent_rank=0, set_kind=EXTENDED):
    """Planes for the side to move, float32 in [0, 1]."""
    if not 0 <= opponent_rank <= 9:
        raise ValueError("opponent_rank must be 0..9")
    size = board.size
    n = plane_count(set_kind)
    planes = np.zeros((n, size, size), dtype=np.float32)
    grid = np.asarray(board.grid, dtype=np.int8).reshape(size, size)
    per = board.to_move
    opp = opponent(per)

    ours = grid == per
    theirs = grid == opp
    planes[7][ours] = 1.0
    planes[8][theirs] = 1.0
    planes[9][grid == EMPTY] = 1.0

    seen = set()
    for pt in range(size * size):
        if board.grid[pt] == EMPTY or pt in seen:
            continue
        stones, libs = group_at(board.grid, size, pt)
        seen |= stones
        base = 0 if board.grid[pt] == per else 3
        plane = planes[base + min(len(libs), 3) - 1]
        for s in stones:
            plane[s // size, s % size] = 1.0

    if board.ko_point is not None:
        planes[6][board.ko_point // size, board.ko_point % size] = 1.0

    age = np.asarray(board.age).reshape(size, size)
    decay = np.exp(-HISTORY_DECAY * (board.move_number - age).astype(np.float64))
    planes[10][ours] = decay[ours]
    planes[11][theirs] = decay[theirs]

    if opponent_rank > 0:
        planes[12:12 + opponent_rank] = 1.0

    if set_kind == EXTENDED:
        planes[21][0, :] = 1.0
        planes[21][-1, :] = 1.0
        planes[21][:, 0] = 1.0
        planes[21][:, -1] = 1.0
        planes[22] = _position_mask(size)
        if ours.any() or theirs.any():
            inf = size * size
            d_our = _bfs_distance(size, ours)
            d_opp = _bfs_distance(size, theirs)
            d_our = np.where(d_our < 0, inf, d_our)
            d_opp = np.where(d_opp < 0, inf, d_opp)
            planes[23][d_our < d_opp] = 1.0
            planes[24][d_opp < d_our] = 1.0

    return planes


# -- board symmetries -------------------------------------------------------
#
# Symmetry s in 0..7: low two bits rotate 90 degrees counterclockwise that
# many times, bit 2 flips horizontally first.  Matches the engine's move
# transform so augmented tensors and targets stay paired.

SYMMETRIES = tuple(range(8))


def transform_planes(planes, sym):
    out = planes
    if sym & 4:
        out = out[..., :, ::-1]
    k = sym & 3
    if k:
        out = np.rot90(out, k, axes=(-2, -1))
    return np.ascontiguousarray(out)


def transform_move(move, sym, size):
    if move < 0:
        return move
    row, col = move // size, move % size
    if sym & 4:
        col = size - 1 - col
    for _ in range(sym & 3):
        row, col = size - 1 - col, row
    return row * size + col
