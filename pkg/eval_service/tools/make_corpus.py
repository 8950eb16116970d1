"""Build the committed train/heldout corpora from engine self-play.

Runs the engine's match CLI (policy self-play, 9x9, komi 7.5) into
scratch directories, then copies the raw SGF files into data/train and
data/heldout.  The self-play player is deterministic after each side's
sampled first move, so a big batch contains occasional exact-duplicate
games; we overgenerate, drop every game whose move sequence was already
kept (train first, so heldout never shares a game with train), and stop
at the requested counts.

Usage: python3 tools/make_corpus.py [--train 1000] [--heldout 200]
"""

import argparse
import pathlib
import shutil
import subprocess
import sys
import tempfile

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))
from eval_service import sgfio  # noqa: E402

PKG = pathlib.Path(__file__).resolve().parents[1]
PLAYER = '{"kind":"policy","name":"%s"}'


def generate(out_dir, groups, games, seed):
    cmd = ["tengen-match", "--a", PLAYER % "pa", "--b", PLAYER % "pb",
           "--groups", str(groups), "--games", str(games),
           "--size", "9", "--komi", "7.5", "--seed", str(seed),
           "--out", str(out_dir)]
    print("+", " ".join(cmd))
    subprocess.run(cmd, check=True)
    return sorted(out_dir.glob("*.sgf"))


def take_unique(paths, want, seen, dest, min_moves=10):
    dest.mkdir(parents=True, exist_ok=True)
    kept = 0
    for path in paths:
        if kept >= want:
            break
        game = sgfio.parse(path.read_text())
        key = tuple(game.moves)
        if len(game.moves) < min_moves or key in seen:
            continue
        seen.add(key)
        shutil.copy(path, dest / ("%04d.sgf" % kept))
        kept += 1
    return kept


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--train", type=int, default=1000)
    ap.add_argument("--heldout", type=int, default=200)
    args = ap.parse_args()

    seen = set()
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        raw_train = generate(tmp / "train", 11, 100, seed=1)
        raw_held = generate(tmp / "heldout", 3, 100, seed=2)
        n_train = take_unique(raw_train, args.train, seen, PKG / "data" / "train")
        n_held = take_unique(raw_held, args.heldout, seen, PKG / "data" / "heldout")
    print("kept %d train, %d heldout (unique move sequences)" % (n_train, n_held))
    if n_train < args.train or n_held < args.heldout:
        print("WARNING: short of target; raise --groups and rerun")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
