"""Engine-vs-engine match runner and rollout throughput benchmark.

Matches run in groups; the report carries per-group win counts and the
standard deviation computed across group averages, so a 3x100 match
reads as mean +/- std over three 100-game samples.  Deterministic
engines get game diversity from the opening: each player's first move
is sampled from its policy softmax over the top moves instead of played
greedily, with every sample driven by the logged per-game seed.  A
player that raises or produces an illegal move forfeits the game and
the forfeit is flagged in the report.  Every finished game is recorded
as SGF and replayed through the rules kernel before it enters the
report; games that ended by passes or the move cap also have their
result recomputed from the replayed final position.
"""

import argparse
import dataclasses
import json
import math
import os
import random
import sys
import time

from . import mcts, playout, policy, sgf
from .board import BLACK, WHITE, EMPTY, PASS, Position, opponent

SAMPLE_TOP = 300
SCORE_TRIALS = 300


class EngineConfig:
    """One player: a move-selection kind plus search knobs.  `mcts` runs
    the full tree search, `policy` plays the evaluator's top move, and
    `random` picks uniformly among legal moves."""

    KINDS = ("mcts", "policy", "random")

    def __init__(self, kind="mcts", name=None, sample_top=SAMPLE_TOP,
                 **search_kwargs):
        if kind not in self.KINDS:
            raise ValueError("unknown engine kind %r" % (kind,))
        self.kind = kind
        self.name = name or kind
        self.sample_top = sample_top
        self.search_kwargs = dict(search_kwargs)
        mcts.SearchConfig(**self.search_kwargs)  # validate now

    def make_search(self):
        return mcts.SearchConfig(**self.search_kwargs)

    def to_dict(self):
        d = {"kind": self.kind, "name": self.name,
             "sample_top": self.sample_top}
        d.update(self.search_kwargs)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        return cls(kind=d.pop("kind", "mcts"), name=d.pop("name", None),
                   sample_top=d.pop("sample_top", SAMPLE_TOP), **d)


class _Player:
    """In-process player for one game; owns its tree, rng, and evaluator."""

    def __init__(self, spec, komi, game_seed):
        self.spec = spec
        self.cfg = spec.make_search()
        self.cfg.komi = komi
        self.cfg.seed = game_seed
        self.cfg.pondering = False
        self.rng = random.Random(game_seed ^ 0xD1B54A32D192ED03)
        self.evaluator = policy.BuiltinEvaluator()
        self.tree = None
        self.moved = False

    def advance(self, tree_pos_before, move):
        if self.tree is not None:
            mcts.advance_root(self.tree, move)

    def _sample_first(self, pos):
        """Opening diversity: draw from the softmax over the top moves."""
        pr = self.evaluator.evaluate_position(pos)
        entries = pr.entries[:self.spec.sample_top]
        if not entries:
            return PASS
        total = sum(p for _, p in entries)
        x = self.rng.random() * total
        for mv, p in entries:
            x -= p
            if x <= 0:
                return mv
        return entries[-1][0]

    def genmove(self, pos, opponent_passed):
        first = not self.moved
        self.moved = True
        if self.spec.kind == "random":
            legal = [m for m in pos.legal_moves() if m != PASS]
            return self.rng.choice(legal) if legal else PASS
        if first and self.spec.sample_top:
            return self._sample_first(pos)
        if self.spec.kind == "policy":
            return self._policy_move(pos, opponent_passed)
        return self._search_move(pos, opponent_passed)

    def _policy_move(self, pos, opponent_passed):
        if opponent_passed:
            report = playout.estimate_dead_and_score(
                pos, trials=150, komi=self.cfg.komi,
                cfg=self.cfg.playout_cfg, seed=self.cfg.seed + 31)
            if mcts.decide_resign_or_pass(0.5, report, pos.to_move, True) \
                    == mcts.PASS_GAME:
                return PASS
        pr = self.evaluator.evaluate_position(pos)
        for mv, _ in pr.entries:
            # a raw policy player must still not fill its own eyes shut
            if not playout.true_eye(pos, mv, pos.to_move):
                return mv
        return PASS

    def _search_move(self, pos, opponent_passed):
        if self.tree is None:
            self.tree = mcts.SearchTree(pos)
        best, _, rate = mcts.run_search(
            pos, self.cfg, evaluator=self.evaluator, tree=self.tree)
        decision, _ = mcts.decide_move(
            pos, self.cfg, rate, opponent_passed, evaluator=self.evaluator)
        if decision == mcts.RESIGN:
            return "resign"
        if decision == mcts.PASS_GAME:
            return PASS
        return best


def _score_winner(pos, komi, seed):
    """(winner color or EMPTY, black-perspective margin) on the cleaned
    board."""
    report = playout.estimate_dead_and_score(
        pos, trials=SCORE_TRIALS, komi=komi, seed=seed)
    margin = report.score.margin
    if margin > 0:
        return BLACK, margin
    if margin < 0:
        return WHITE, margin
    return EMPTY, 0.0


def play_game(spec_black, spec_white, size, komi, game_seed, move_cap=None):
    """One complete game; dict with winner, reason, moves, margin."""
    cap = move_cap or 3 * size * size
    players = {BLACK: _Player(spec_black, komi, game_seed),
               WHITE: _Player(spec_white, komi, game_seed + 0x9E37)}
    pos = Position.empty(size)
    moves = []
    winner, reason, margin = EMPTY, "cap", None
    while pos.move_number < cap:
        side = pos.to_move
        opponent_passed = pos.last_move == PASS
        try:
            mv = players[side].genmove(pos, opponent_passed)
        except Exception as err:   # engine crash forfeits the game
            winner = opponent(side)
            reason = "forfeit:%s" % ("B" if side == BLACK else "W")
            margin = repr(err)
            break
        if mv == "resign":
            winner, reason = opponent(side), "resign"
            break
        try:
            nxt = pos.play(mv)
        except Exception:
            winner = opponent(side)
            reason = "forfeit:%s" % ("B" if side == BLACK else "W")
            margin = "illegal move %r" % (mv,)
            break
        for pl in players.values():
            pl.advance(pos, mv)
        moves.append(mv)
        pos = nxt
        if pos.pass_streak >= 2:
            reason = "passes"
            break
    if reason in ("cap", "passes"):
        winner, margin = _score_winner(pos, komi, game_seed + 77)
    return {"winner": winner, "reason": reason, "margin": margin,
            "moves": moves, "seed": game_seed, "size": size, "komi": komi}


def _result_string(game):
    if game["reason"] == "resign":
        return ("B" if game["winner"] == BLACK else "W") + "+R"
    if game["reason"].startswith("forfeit"):
        return ("B" if game["winner"] == BLACK else "W") + "+F"
    if game["winner"] == EMPTY:
        return "0"
    return "%s+%g" % ("B" if game["winner"] == BLACK else "W",
                      abs(game["margin"]))


def game_record(game, black_name, white_name):
    rec = sgf.from_game(game["size"], game["moves"], komi=game["komi"],
                        result=_result_string(game))
    return dataclasses.replace(rec, black_player=black_name,
                               white_player=white_name)


def verify_game(game, record):
    """Replay the SGF through the rules kernel; for scored games also
    recompute the result from the final position.  Raises on mismatch."""
    chain = sgf.replay(sgf.parse(sgf.serialize(record)))
    if game["reason"] in ("cap", "passes"):
        winner, margin = _score_winner(chain[-1], game["komi"],
                                       game["seed"] + 77)
        if winner != game["winner"] or margin != game["margin"]:
            raise AssertionError("replayed result mismatch")


class MatchReport:
    """Win counts per group for engine A, plus mean and the standard
    deviation across group averages."""

    def __init__(self, spec_a, spec_b, groups, games_per_group, komi, size,
                 seed):
        self.spec_a = spec_a
        self.spec_b = spec_b
        self.groups = groups
        self.games_per_group = games_per_group
        self.komi = komi
        self.size = size
        self.seed = seed
        self.group_wins = [0.0] * groups
        self.games = []
        self.forfeits = []
        self.sgf_paths = []

    def add_game(self, group, game, a_color):
        win = 0.0
        if game["winner"] == a_color:
            win = 1.0
        elif game["winner"] == EMPTY:
            win = 0.5
        self.group_wins[group] += win
        if game["reason"].startswith("forfeit"):
            self.forfeits.append(len(self.games))
        self.games.append({"group": group, "a_color":
                           "B" if a_color == BLACK else "W",
                           "result": _result_string(game),
                           "reason": game["reason"],
                           "seed": game["seed"],
                           "moves": len(game["moves"])})

    @property
    def group_means(self):
        return [w / self.games_per_group for w in self.group_wins]

    @property
    def mean(self):
        return sum(self.group_means) / self.groups

    @property
    def std(self):
        ms = self.group_means
        mu = self.mean
        return math.sqrt(sum((m - mu) ** 2 for m in ms) / len(ms))

    def to_dict(self):
        return {"engine_a": self.spec_a.to_dict(),
                "engine_b": self.spec_b.to_dict(),
                "groups": self.groups,
                "games_per_group": self.games_per_group,
                "komi": self.komi, "size": self.size, "seed": self.seed,
                "group_wins": self.group_wins,
                "group_means": self.group_means,
                "mean": self.mean, "std": self.std,
                "forfeits": self.forfeits,
                "games": self.games,
                "sgf": self.sgf_paths}


def _game_seed(master, index):
    return (master * 0x9E3779B97F4A7C15 + index * 0xBF58476D1CE4E5B9 + 1) \
        % (1 << 62)


def run_match(spec_a, spec_b, groups, games_per_group, komi=7.5, size=9,
              alternate_colors=True, seed=0, out_dir=None, move_cap=None):
    """Play the full schedule and return a MatchReport."""
    master = seed or random.SystemRandom().randrange(1 << 31)
    report = MatchReport(spec_a, spec_b, groups, games_per_group, komi,
                         size, master)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    index = 0
    for g in range(groups):
        for i in range(games_per_group):
            a_black = (index % 2 == 0) if alternate_colors else True
            black, white = (spec_a, spec_b) if a_black else (spec_b, spec_a)
            game = play_game(black, white, size, komi,
                             _game_seed(master, index), move_cap)
            rec = game_record(game, black.name, white.name)
            verify_game(game, rec)
            report.add_game(g, game, BLACK if a_black else WHITE)
            if out_dir:
                path = os.path.join(out_dir, "g%d_%03d.sgf" % (g, i))
                with open(path, "w") as f:
                    f.write(sgf.serialize(rec) + "\n")
                report.sgf_paths.append(path)
            index += 1
    return report


# -- throughput benchmark ---------------------------------------------------

def bench_position(size=19, plies=80, seed=0):
    """Deterministic mid-game position: softmax-sampled self-play."""
    ev = policy.BuiltinEvaluator()
    rng = random.Random(seed)
    pos = Position.empty(size)
    for _ in range(plies):
        entries = ev.evaluate_position(pos).entries[:SAMPLE_TOP]
        if not entries:
            break
        total = sum(p for _, p in entries)
        x = rng.random() * total
        for mv, p in entries:
            x -= p
            if x <= 0:
                break
        pos = pos.play(mv)
    return pos


def bench_rollouts(threads=1, seconds=2.0, pos=None):
    """Full search cycles per second on a 19x19 mid-game position, with a
    tree-free playout baseline measured alongside."""
    pos = pos or bench_position()
    chunk = 500
    done = 0
    t0 = time.perf_counter()
    while time.perf_counter() - t0 < seconds:
        cfg = mcts.SearchConfig(rollouts=chunk, threads=threads,
                                seed=done + 1)
        mcts.run_search(pos, cfg)
        done += chunk
    search_rate = done / (time.perf_counter() - t0)

    pcfg = playout.PlayoutConfig(seed=1)
    rng = playout.worker_rng(1, 0)
    trials = 0
    t0 = time.perf_counter()
    while time.perf_counter() - t0 < seconds / 2:
        for _ in range(50):
            playout.run_playout(pos, pcfg, rng)
        trials += 50
    playout_rate = trials / (time.perf_counter() - t0)
    return {"threads": threads, "seconds": seconds,
            "rollouts_per_s": search_rate,
            "playout_only_per_s": playout_rate,
            "stones": int((pos.grid != EMPTY).sum()),
            "size": pos.size}


# -- command line -----------------------------------------------------------

def _load_spec(text):
    """Inline JSON object or a path to a JSON file."""
    if text.strip().startswith("{"):
        return EngineConfig.from_dict(json.loads(text))
    with open(text) as f:
        return EngineConfig.from_dict(json.load(f))


def build_parser():
    p = argparse.ArgumentParser(
        prog="tengen-match",
        description="Play engine-vs-engine matches and write a report.")
    p.add_argument("--a", required=True,
                   help="engine A config: JSON object or file path")
    p.add_argument("--b", required=True,
                   help="engine B config: JSON object or file path")
    p.add_argument("--groups", type=int, default=3)
    p.add_argument("--games", type=int, default=100,
                   help="games per group")
    p.add_argument("--size", type=int, default=9)
    p.add_argument("--komi", type=float, default=7.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None,
                   help="directory for report.json and game SGF files")
    p.add_argument("--no-alternate", action="store_true",
                   help="keep engine A on black every game")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        spec_a = _load_spec(args.a)
        spec_b = _load_spec(args.b)
    except (ValueError, OSError) as err:
        print("tengen-match: %s" % (err,), file=sys.stderr)
        return 2
    report = run_match(spec_a, spec_b, args.groups, args.games,
                       komi=args.komi, size=args.size,
                       alternate_colors=not args.no_alternate,
                       seed=args.seed, out_dir=args.out)
    payload = json.dumps(report.to_dict(), indent=2)
    if args.out:
        with open(os.path.join(args.out, "report.json"), "w") as f:
            f.write(payload + "\n")
    print("%s vs %s: mean %.3f std %.3f over %d groups of %d" % (
        report.spec_a.name, report.spec_b.name, report.mean, report.std,
        report.groups, report.games_per_group))
    if not args.out:
        print(payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
