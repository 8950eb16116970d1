"""Shared test helpers: corpus location and one-time kernel warmup."""

import pathlib

import numpy as np
import pytest

_CORPUS_DIR = pathlib.Path(__file__).parent / "data" / "corpus"


def corpus_paths():
    return sorted(_CORPUS_DIR.glob("*.sgf"))


@pytest.fixture(scope="session", autouse=True)
def kernel_warmup():
    """Compile the playout kernel up front (cached on disk afterwards) so
    individual test durations measure work, not JIT."""
    from tengen.board import Position
    from tengen.fastboard import FastBoard, make_rng, run_trials, replay_path, OPT_ALL
    from tengen import patterns

    match, _ = patterns.tables()
    size = 9
    fb = FastBoard(size)
    rng = make_rng(0)
    margins = np.zeros(1)
    bc = np.zeros(size * size, dtype=np.int64)
    wc = np.zeros(size * size, dtype=np.int64)
    run_trials(fb.S, Position.empty(size).grid, 1, 0, 0, 0, 0, 0, 1, match,
               rng, 40, OPT_ALL, 7.5, margins, bc, wc)
    fb.eval_logits()
    replay_path(fb.S, np.array([0], dtype=np.int64), 1)
    yield
