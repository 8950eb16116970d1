"""Feature tensor encoding of a Position from the side-to-move's perspective.

Plane order is frozen; the wire protocol and any external evaluator must agree
with it bit for bit:

  standard set (21 planes)
    0- 2  our stones with exactly 1 / exactly 2 / >=3 liberties
    3- 5  opponent stones with exactly 1 / exactly 2 / >=3 liberties
    6     ko point (at most one cell set)
    7     our stones
    8     opponent stones
    9     empty intersections
    10    our history: exp(-0.1 * t), t = plies since the stone was placed
    11    opponent history
    12-20 opponent rank, cumulative: plane 12+i is all-1 iff i < rank_level
          (kyu -> all zero, 1d..9d -> 1..9, professionals -> 9)
  extended set appends (25 planes total)
    21    border: first/last row and column
    22    exp(-0.5 * l^2), l = Euclidean distance to the board center in
          intersection units
    23    our territory: intersections strictly closer (grid BFS over all
          intersections) to our stones than to opponent stones
    24    opponent territory

All planes lie in [0, 1].  Binary planes contain only {0, 1}.  The decay
constants and the rank/territory conventions are part of the engine contract.
History counts plies, not own-moves.  Territory ties and regions with no
reachable stones belong to neither side.
"""

from collections import deque

import numpy as np

from .board import BLACK, WHITE, EMPTY, PASS, RESIGN, opponent

STANDARD = "standard"
EXTENDED = "extended"

N_STANDARD = 21
N_EXTENDED = 25

# plane indices
OUR_LIB1, OUR_LIB2, OUR_LIB3 = 0, 1, 2
OPP_LIB1, OPP_LIB2, OPP_LIB3 = 3, 4, 5
KO = 6
OUR_STONES, OPP_STONES, EMPTY_PLANE = 7, 8, 9
OUR_HISTORY, OPP_HISTORY = 10, 11
RANK_BASE = 12  # 9 planes
BORDER = 21
POSITION_MASK = 22
OUR_TERRITORY, OPP_TERRITORY = 23, 24

HISTORY_DECAY = 0.1
MASK_DECAY = 0.5


class FeatureTensor:
    __slots__ = ("planes", "perspective", "set_kind")

    def __init__(self, planes, perspective, set_kind):
        self.planes = planes
        self.perspective = perspective
        self.set_kind = set_kind

    @property
    def size(self):
        return self.planes.shape[-1]


def plane_count(set_kind):
    if set_kind == STANDARD:
        return N_STANDARD
    if set_kind == EXTENDED:
        return N_EXTENDED
    raise ValueError(f"unknown feature set {set_kind!r}")


def _bfs_distance(grid2d, sources):
    """Grid-graph distance from a boolean source mask, over all intersections."""
    size = grid2d.shape[0]
    dist = np.full((size, size), -1, dtype=np.int32)
    q = deque()
    for r, c in zip(*np.nonzero(sources)):
        dist[r, c] = 0
        q.append((int(r), int(c)))
    while q:
        r, c = q.popleft()
        d = dist[r, c] + 1
        if r > 0 and dist[r - 1, c] < 0:
            dist[r - 1, c] = d
            q.append((r - 1, c))
        if r < size - 1 and dist[r + 1, c] < 0:
            dist[r + 1, c] = d
            q.append((r + 1, c))
        if c > 0 and dist[r, c - 1] < 0:
            dist[r, c - 1] = d
            q.append((r, c - 1))
        if c < size - 1 and dist[r, c + 1] < 0:
            dist[r, c + 1] = d
            q.append((r, c + 1))
    return dist


_mask_cache = {}


def position_mask(size):
    """exp(-0.5 l^2) about the exact board center; cached per size."""
    m = _mask_cache.get(size)
    if m is None:
        center = (size - 1) / 2.0
        r = np.arange(size, dtype=np.float64) - center
        l2 = r[:, None] ** 2 + r[None, :] ** 2
        m = np.exp(-MASK_DECAY * l2).astype(np.float32)
        m.setflags(write=False)
        _mask_cache[size] = m
    return m


def extract(pos, perspective=None, opponent_rank=0, set_kind=EXTENDED):
    """Encode pos into the documented plane stack, floats in [0, 1]."""
    if perspective is None:
        perspective = pos.to_move
    if not 0 <= opponent_rank <= 9:
        raise ValueError(f"opponent_rank must be 0..9, got {opponent_rank}")
    size = pos.size
    n = plane_count(set_kind)
    planes = np.zeros((n, size, size), dtype=np.float32)
    grid = np.asarray(pos.grid).reshape(size, size)
    opp = opponent(perspective)

    ours = grid == perspective
    theirs = grid == opp
    planes[OUR_STONES][ours] = 1.0
    planes[OPP_STONES][theirs] = 1.0
    planes[EMPTY_PLANE][grid == EMPTY] = 1.0

    for head, libs in pos._libs.items():
        stones = pos._stones[head]
        color = pos.stone_at(head)
        base = OUR_LIB1 if color == perspective else OPP_LIB1
        idx = base + min(len(libs), 3) - 1
        plane = planes[idx]
        for pt in stones:
            plane[pt // size, pt % size] = 1.0

    if pos.ko_point is not None:
        planes[KO][pos.ko_point // size, pos.ko_point % size] = 1.0

    age = np.asarray(pos.age).reshape(size, size)
    t = (pos.move_number - age).astype(np.float64)
    decay = np.exp(-HISTORY_DECAY * t)
    planes[OUR_HISTORY][ours] = decay[ours]
    planes[OPP_HISTORY][theirs] = decay[theirs]

    if opponent_rank > 0:
        planes[RANK_BASE:RANK_BASE + opponent_rank] = 1.0

    if set_kind == EXTENDED:
        planes[BORDER][0, :] = 1.0
        planes[BORDER][-1, :] = 1.0
        planes[BORDER][:, 0] = 1.0
        planes[BORDER][:, -1] = 1.0
        planes[POSITION_MASK] = position_mask(size)
        if ours.any() or theirs.any():
            d_our = _bfs_distance(grid, ours)
            d_opp = _bfs_distance(grid, theirs)
            # -1 means unreachable (that color has no stones at all)
            inf = size * size
            d_our = np.where(d_our < 0, inf, d_our)
            d_opp = np.where(d_opp < 0, inf, d_opp)
            planes[OUR_TERRITORY][d_our < d_opp] = 1.0
            planes[OPP_TERRITORY][d_opp < d_our] = 1.0

    return FeatureTensor(planes, perspective, set_kind)


# -- dihedral symmetries ---------------------------------------------------
#
# Symmetry s in 0..7: low two bits = number of 90-degree counterclockwise
# rotations, bit 2 = horizontal flip (applied first).

SYMMETRIES = tuple(range(8))

_perm_cache = {}


def _index_maps(size, sym):
    """(perm, inv) with perm[new_flat] = old_flat for this symmetry."""
    key = (size, sym)
    maps = _perm_cache.get(key)
    if maps is None:
        idx = np.arange(size * size, dtype=np.int64).reshape(size, size)
        t = _apply_2d(idx, sym)
        perm = t.reshape(-1).copy()
        inv = np.empty_like(perm)
        inv[perm] = np.arange(size * size, dtype=np.int64)
        perm.setflags(write=False)
        inv.setflags(write=False)
        maps = (perm, inv)
        _perm_cache[key] = maps
    return maps


def _apply_2d(a, sym):
    if sym & 4:
        a = a[..., ::-1]
    k = sym & 3
    if k:
        a = np.rot90(a, k=k, axes=(-2, -1))
    return a


def transform_planes(planes, sym):
    """Spatially permute an (..., size, size) array by symmetry sym."""
    return np.ascontiguousarray(_apply_2d(planes, sym))


def transform(t, sym):
    return FeatureTensor(transform_planes(t.planes, sym), t.perspective, t.set_kind)


def transform_move(move, sym, size):
    if move in (PASS, RESIGN):
        return move
    _, inv = _index_maps(size, sym)
    return int(inv[move])


def inverse_symmetry(sym):
    """The symmetry undoing sym: transform(transform(x, s), inverse_symmetry(s)) == x."""
    k = sym & 3
    if sym & 4:
        return sym  # flips composed with their own rotation are involutions
    return (4 - k) & 3


def compose(a, b):
    """Symmetry equivalent to applying a first, then b."""
    # resolved through the permutation representation; cached per board size 19
    pa, _ = _index_maps(19, a)
    pb, _ = _index_maps(19, b)
    target = pa[pb]
    for s in SYMMETRIES:
        ps, _ = _index_maps(19, s)
        if np.array_equal(ps, target):
            return s
    raise AssertionError("dihedral group not closed")
