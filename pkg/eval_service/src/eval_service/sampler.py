"""Minibatch sampling that keeps every batch spread over game stages.

A pool holds a few hundred games open at once, each parked at a random
point of its record.  One sample draws one pool slot, emits (features,
next k recorded moves), and advances that game a single ply; a game with
fewer than k moves left is swapped for a freshly drawn one at a random
stage.  Batches therefore mix openings, middle game, and endgame instead
of marching through one game at a time.  A random board symmetry is
applied jointly to the tensor and its targets when augmentation is on.
"""

import numpy as np

from . import feats, sgfio
from .goban import Goban, PASS


class _Slot:
    __slots__ = ("game", "board", "idx")

    def __init__(self, game, board, idx):
        self.game = game
        self.board = board
        self.idx = idx


class GamePool:
    def __init__(self, games, steps, pool_size=300, rng=None, augment=True,
                 feature_set=feats.EXTENDED):
        self.games = [g for g in games if len(g.moves) >= steps]
        if not self.games:
            raise ValueError("no game in the corpus has %d moves" % steps)
        self.steps = steps
        self.augment = augment
        self.feature_set = feature_set
        self.rng = rng or np.random.default_rng()
        self.slots = [self._fresh() for _ in range(pool_size)]

    def _fresh(self):
        """A random game opened at a random stage with >= steps moves left."""
        game = self.games[int(self.rng.integers(len(self.games)))]
        idx = int(self.rng.integers(0, len(game.moves) - self.steps + 1))
        board = Goban(game.size)
        for pt in game.setup_black:
            board.grid[pt] = 1
            board.age[pt] = 0
        for pt in game.setup_white:
            board.grid[pt] = 2
            board.age[pt] = 0
        board._seen = {tuple(board.grid)}
        for color, move in game.moves[:idx]:
            board.to_move = color
            board.play(move)
        if game.moves[idx:]:
            board.to_move = game.moves[idx][0]
        return _Slot(game, board, idx)

    def _advance(self, slot):
        color, move = slot.game.moves[slot.idx]
        slot.board.to_move = color
        slot.board.play(move)
        slot.idx += 1

    def sample(self):
        """(planes, targets): features of one position and its next
        `steps` recorded moves, symmetry-augmented as a pair."""
        i = int(self.rng.integers(len(self.slots)))
        slot = self.slots[i]
        while True:
            if slot.idx + self.steps > len(slot.game.moves):
                slot = self.slots[i] = self._fresh()
            window = [m for _, m in
                      slot.game.moves[slot.idx:slot.idx + self.steps]]
            if PASS not in window:
                break
            # heads predict board cells; windows containing a pass are
            # skipped by advancing past them
            self._advance(slot)

        game = slot.game
        self.last_stage = slot.idx  # move number of the sampled position
        mover = game.moves[slot.idx][0]
        opp_rank = sgfio.rank_level(
            game.white_rank if mover == 1 else game.black_rank)
        planes = feats.extract(slot.board, opp_rank, self.feature_set)
        targets = list(window)
        if self.augment:
            sym = int(self.rng.integers(8))
            if sym:
                planes = feats.transform_planes(planes, sym)
                targets = [feats.transform_move(m, sym, game.size)
                           for m in targets]
        self._advance(slot)
        return planes, targets


def sample_minibatch(pool, batch_size):
    """(X, Y): X stacked float32 planes, Y int64 targets of shape
    (steps, batch)."""
    xs, ys = [], []
    for _ in range(batch_size):
        planes, targets = pool.sample()
        xs.append(planes)
        ys.append(targets)
    x = np.stack(xs)
    y = np.asarray(ys, dtype=np.int64).T
    return x, y
