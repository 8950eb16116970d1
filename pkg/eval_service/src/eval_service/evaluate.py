"""Prediction accuracy of the immediate-move head over recorded games.

Every position of every game whose recorded move places a stone counts
once; predictions are masked to the legal moves of that position before
ranking.  The uniform baseline answers what a model that knows nothing
but legality would score on the same positions.
"""

import numpy as np
import torch

from . import feats, sgfio
from .goban import BLACK, Goban, PASS


def iter_positions(game):
    """(board, opponent_rank, target) for each place-move of the record;
    the board is the position the move was chosen in."""
    board = Goban(game.size)
    for pt in game.setup_black:
        board.grid[pt] = 1
        board.age[pt] = 0
    for pt in game.setup_white:
        board.grid[pt] = 2
        board.age[pt] = 0
    board._seen = {tuple(board.grid)}
    for color, move in game.moves:
        board.to_move = color
        if move != PASS:
            rank = sgfio.rank_level(
                game.white_rank if color == BLACK else game.black_rank)
            yield board, rank, move
        board.play(move)


def evaluate_accuracy(model, games, limit=None, batch=256):
    """{'positions', 'top1', 'top5'} of the first head, legality-masked."""
    cfg = model.cfg
    model.eval()
    n = hit1 = hit5 = 0
    xs, masks, targets = [], [], []

    def flush():
        nonlocal n, hit1, hit5
        if not xs:
            return
        with torch.no_grad():
            logits = model(torch.from_numpy(np.stack(xs)))[0].numpy()
        for row, mask, target in zip(logits, masks, targets):
            row = np.where(mask, row, -np.inf)
            order = np.argsort(-row, kind="stable")
            top = order[:5]
            hit1 += int(top[0] == target)
            hit5 += int(target in top)
            n += 1
        xs.clear(), masks.clear(), targets.clear()

    for game in games:
        for board, rank, move in iter_positions(game):
            mask = np.zeros(game.size * game.size, dtype=bool)
            for mv in board.legal_moves():
                if mv != PASS:
                    mask[mv] = True
            xs.append(feats.extract(board, rank, cfg.feature_set))
            masks.append(mask)
            targets.append(move)
            if len(xs) >= batch:
                flush()
            if limit is not None and n + len(xs) >= limit:
                flush()
                return {"positions": n, "top1": hit1 / n, "top5": hit5 / n}
    flush()
    if n == 0:
        raise ValueError("no scorable positions in the corpus")
    return {"positions": n, "top1": hit1 / n, "top5": hit5 / n}


def uniform_baseline(games, limit=None):
    """Expected Top-1/Top-5 of a uniform-over-legal predictor on the same
    positions."""
    n = 0
    p1 = p5 = 0.0
    for game in games:
        for board, _, _ in iter_positions(game):
            legal = sum(1 for mv in board.legal_moves() if mv != PASS)
            if legal:
                p1 += 1.0 / legal
                p5 += min(5, legal) / legal
            n += 1
            if limit is not None and n >= limit:
                return {"positions": n, "top1": p1 / n, "top5": p5 / n}
    if n == 0:
        raise ValueError("no scorable positions in the corpus")
    return {"positions": n, "top1": p1 / n, "top5": p5 / n}
