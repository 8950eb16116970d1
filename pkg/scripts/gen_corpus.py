"""Generate the seeded SGF test corpus under tests/data/corpus/.

Random legal self-play through the rules kernel, mixed board sizes, a few
handicap games, occasional mid-game resignations.  Deterministic: re-running
reproduces the same files byte for byte.
"""

import pathlib
import random
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from tengen.board import BLACK, WHITE, PASS, Position, point
from tengen import sgf

RANKS = ["", "9p", "7d", "5d", "3d", "1d", "2k", "5k", "10k", "17k"]


def star_points(size, count):
    if size == 19:
        pts = [(3, 3), (15, 15), (3, 15), (15, 3), (9, 9), (3, 9), (15, 9), (9, 3), (9, 15)]
    elif size == 13:
        pts = [(3, 3), (9, 9), (3, 9), (9, 3), (6, 6)]
    else:
        pts = [(2, 2), (6, 6), (2, 6), (6, 2), (4, 4)]
    return [point(c, r, size) for c, r in pts[:count]]


def random_game(rng, size, handicap=0):
    if handicap:
        setup = tuple(sorted(star_points(size, handicap)))
        pos = Position.from_setup(size, setup, (), WHITE)
    else:
        setup = ()
        pos = Position.empty(size)
    moves = []
    cap = int(2.2 * size * size)
    points = list(range(size * size))
    while not pos.game_over() and len(moves) < cap:
        rng.shuffle(points)
        chosen = PASS
        for cand in points:
            if pos.grid[cand] == 0 and pos.is_legal(cand):
                chosen = cand
                break
        pos = pos.play(chosen)
        moves.append(chosen)
    # close the record with two passes so scoring is well-defined
    while not pos.game_over():
        pos = pos.play(PASS)
        moves.append(PASS)
    score = pos.tromp_taylor_score(7.5)
    if score.margin > 0:
        result = f"B+{score.margin:g}"
    elif score.margin < 0:
        result = f"W+{-score.margin:g}"
    else:
        result = "0"
    colored = []
    to_move = WHITE if handicap else BLACK
    for mv in moves:
        colored.append((to_move, mv))
        to_move = BLACK + WHITE - to_move
    return sgf.GameRecord(
        board_size=size, komi=7.5, handicap=handicap,
        setup_black=setup, moves=tuple(colored), result=result,
        black_rank=rng.choice(RANKS), white_rank=rng.choice(RANKS),
        black_player=f"rand{rng.randrange(100)}", white_player=f"rand{rng.randrange(100)}",
    )


def opponent_of_next(pos):
    return BLACK + WHITE - pos.to_move


def main():
    out_dir = pathlib.Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus"
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20240817)
    specs = [(19, 0)] * 62 + [(19, 2)] * 4 + [(19, 5)] * 4 + [(13, 0)] * 15 + [(9, 0)] * 13 + [(9, 3)] * 2
    for idx, (size, handicap) in enumerate(specs):
        rec = random_game(rng, size, handicap)
        (out_dir / f"g{idx:03d}.sgf").write_text(sgf.serialize(rec) + "\n")
    print(f"wrote {len(specs)} games to {out_dir}")


if __name__ == "__main__":
    main()
