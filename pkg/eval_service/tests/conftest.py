import random

import pytest

from eval_service.goban import BLACK, Goban, PASS
from eval_service.sgfio import Game


def random_game(seed, size=9, max_moves=100):
    """Legal random game for pipeline tests; ends on two passes or the cap."""
    rng = random.Random(seed)
    board = Goban(size)
    moves = []
    while len(moves) < max_moves and board.pass_streak < 2:
        legal = board.legal_moves()
        # keep passes rare so games have substance
        place = [m for m in legal if m != PASS]
        move = rng.choice(place) if place and rng.random() < 0.98 else PASS
        board.play(move)
        moves.append((3 - board.to_move, move))
    return Game(size, 7.5, moves)


@pytest.fixture(scope="session")
def small_corpus():
    return [random_game(100 + i) for i in range(8)]
