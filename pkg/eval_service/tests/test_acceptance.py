"""Deliverable gates for the policy service.

Each test prints one PASS/FAIL line to stdout and appends it to
acceptance_report.txt in the package root.  The gates:

  service-1  a small net memorizes a 100-position corpus (>= 99% Top-1
             within 2000 minibatches)
  service-2  3-step supervision strengthens the gradient signal more at
             the top trunk conv than at the input conv (norm ratio
             inequality on identical data/seed)
  service-3  the committed desk model's held-out Top-1 meets the floor
             recorded at its first successful evaluation and exceeds the
             measured uniform baseline by >= 20x
  service-4  the engine and the served model complete a legal 9x9 game
             over the wire, and engine+model(1000 rollouts) beats the
             raw served model >= 65% over 100 games

service-3 and service-4 load models/desk.pt and the data/ corpora, and
service-4 launches the `tengen` CLI, so both packages must be installed.
The match in service-4 runs for well over an hour on a single core.
"""

import json
import pathlib
import random
import time

import numpy as np
import pytest

from eval_service import arena, evaluate, net, server, sgfio, train
from eval_service.goban import BLACK, PASS, Goban

PKG = pathlib.Path(__file__).resolve().parents[1]
REPORT = PKG / "acceptance_report.txt"
DATA = PKG / "data"
MODELS = PKG / "models"


@pytest.fixture(scope="module", autouse=True)
def _fresh_report():
    REPORT.write_text("")
    yield


def record(line):
    print(line)
    with REPORT.open("a") as fh:
        fh.write(line + "\n")


def _single_move_corpus(count, size=9, seed=5):
    """Distinct midgame positions, each recorded as setup stones plus the
    one move a fixed random line plays next.  Black to move in all of
    them so the pool and the evaluator see the same perspective."""
    rng = random.Random(seed)
    games = []
    for _ in range(count):
        board = Goban(size)
        plies = 2 * rng.randrange(5, 21)  # even, so black is to move
        for _ in range(plies):
            cells = [m for m in board.legal_moves() if m != PASS]
            board.play(rng.choice(cells))
        target = rng.choice([m for m in board.legal_moves() if m != PASS])
        blacks = [i for i, v in enumerate(board.grid) if v == 1]
        whites = [i for i, v in enumerate(board.grid) if v == 2]
        games.append(sgfio.Game(size, setup_black=blacks, setup_white=whites,
                                moves=[(BLACK, target)]))
    return games


def test_service_1_overfit():
    t0 = time.time()
    games = _single_move_corpus(100)
    net_cfg = net.NetConfig(depth=2, width=32, steps=1)
    train_cfg = train.TrainConfig(batch_size=128, pool_size=100,
                                  minibatches=2000, augment=False, seed=3)
    model, history = train.train(games, net_cfg, train_cfg)
    acc = evaluate.evaluate_accuracy(model, games)
    dt = time.time() - t0
    ok = acc["top1"] >= 0.99
    record("service-1 overfit: %s - d2/w32 net reaches %.1f%% training "
           "Top-1 on 100 fixed positions after 2000 steps of batch-128 SGD "
           "(needs >=99%%); final loss %.4f; %.0fs"
           % ("PASS" if ok else "FAIL", 100 * acc["top1"],
              history[-1]["loss"][0], dt))
    assert acc["top1"] >= 0.99


def test_service_2_gradient_signal():
    t0 = time.time()
    games = sgfio.load_games(DATA / "train")[:150]
    cfg3 = net.NetConfig(depth=4, width=64, steps=3)
    cfg1 = net.NetConfig(depth=4, width=64, steps=1)
    norms3 = train.trunk_gradient_norms(games, cfg3, target_steps=3, seed=0)
    norms1 = train.trunk_gradient_norms(games, cfg1, target_steps=3, seed=0)
    ratio = norms3 / norms1
    dt = time.time() - t0
    ok = ratio[-1] > ratio[0]
    record("service-2 gradient-signal: %s - 3-step/1-step gradient-norm "
           "ratio per trunk conv %s rises from %.2f (conv1) to %.2f (top) "
           "on identical batches, d4/w64, 40 minibatches; %.0fs"
           % ("PASS" if ok else "FAIL",
              np.array2string(ratio, precision=2), ratio[0], ratio[-1], dt))
    assert ratio[-1] > ratio[0]


def test_service_3_heldout_accuracy():
    t0 = time.time()
    model = net.load_model(MODELS / "desk.pt")
    games = sgfio.load_games(DATA / "heldout")
    floor = json.loads((MODELS / "desk_floor.json").read_text())
    acc = evaluate.evaluate_accuracy(model, games)
    uni = evaluate.uniform_baseline(games)
    dt = time.time() - t0
    ok = acc["top1"] >= floor["top1_floor"] and acc["top1"] >= 20 * uni["top1"]
    record("service-3 held-out: %s - desk model Top-1 %.1f%% / Top-5 %.1f%% "
           "over %d positions of %d held-out games (floor %.1f%%); uniform "
           "baseline %.2f%%, 20x bar %.1f%%; %.0fs"
           % ("PASS" if ok else "FAIL", 100 * acc["top1"], 100 * acc["top5"],
              acc["positions"], len(games), 100 * floor["top1_floor"],
              100 * uni["top1"], 2000 * uni["top1"], dt))
    assert acc["top1"] >= floor["top1_floor"]
    assert acc["top1"] >= 20 * uni["top1"]


def test_service_4_live_match(tmp_path):
    t0 = time.time()
    model = net.load_model(MODELS / "desk.pt")
    with server.PolicyServer(model) as srv:
        argv = ["tengen", "--rollouts", "1000", "--threads", "2",
                "--komi", "7.5",
                "--evaluator", "tcp://127.0.0.1:%d" % srv.port]
        client = arena.WireClient("127.0.0.1", srv.port)
        try:
            # completion gate: one full refereed game, replayed from SGF
            won, game, detail = arena.play_game(
                argv + ["--seed", "99"], client, engine_is_black=True,
                size=9, komi=7.5, rng=random.Random(99))
            assert detail != "move cap"
            replay = sgfio.parse(sgfio.serialize(game))
            board = Goban(9)
            for color, move in replay.moves:
                board.to_move = color
                board.play(move)  # raises on any illegal record
            assert len(replay.moves) >= 10
        finally:
            client.close()
        wins, results = arena.run_match(
            argv, "127.0.0.1", srv.port, games=100, size=9, komi=7.5,
            seed=4, out_dir=tmp_path)
    rate = wins / 100.0
    dt = time.time() - t0
    ok = rate >= 0.65
    record("service-4 live-match: %s - one wire game completed legally "
           "(%d moves, %s) and engine+model(1000 rollouts) beat the raw "
           "served model %d/100 (%.0f%%, needs >=65%%); %.0fs"
           % ("PASS" if ok else "FAIL", len(game.moves), detail,
              wins, 100 * rate, dt))
    assert rate >= 0.65
