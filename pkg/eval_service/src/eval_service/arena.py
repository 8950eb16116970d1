"""Referee for matches between the GTP engine and the served model.

The engine runs as a subprocess speaking GTP with its evaluator pointed
at a model server; the raw-model player queries the same server over the
wire and plays the strongest legal reply.  The referee keeps its own
board, relays moves, enforces legality, adjudicates by area score after
two passes (or a move cap), and can hand back the game as SGF.  Only
public surfaces are touched: GTP, the wire protocol, SGF.
"""

import base64
import json
import socket
import subprocess

from . import feats, sgfio
from .goban import BLACK, WHITE, Goban, IllegalMove, PASS, opponent

COLS = "ABCDEFGHJKLMNOPQRSTUVWXYZ"


def to_vertex(move, size):
    if move == PASS:
        return "pass"
    return COLS[move % size] + str(move // size + 1)


def from_vertex(text, size):
    t = text.strip().upper()
    if t == "PASS":
        return PASS
    if t == "RESIGN":
        return "resign"
    col = COLS.index(t[0])
    row = int(t[1:]) - 1
    if not (0 <= col < size and 0 <= row < size):
        raise ValueError("vertex %r off board" % (text,))
    return row * size + col


class GtpSubprocess:
    """Minimal controller for one GTP engine process."""

    def __init__(self, argv):
        self.proc = subprocess.Popen(argv, stdin=subprocess.PIPE,
                                     stdout=subprocess.PIPE, text=True)

    def command(self, cmd):
        self.proc.stdin.write(cmd + "\n")
        self.proc.stdin.flush()
        lines = []
        while True:
            line = self.proc.stdout.readline()
            if line == "":
                raise RuntimeError("engine died on %r" % (cmd,))
            if line == "\n" and lines:
                break
            lines.append(line.rstrip("\n"))
        head = lines[0]
        if not head.startswith("="):
            raise RuntimeError("engine rejected %r: %s" % (cmd, head))
        return head[1:].strip()

    def close(self):
        try:
            self.proc.stdin.write("quit\n")
            self.proc.stdin.flush()
        except (OSError, ValueError):
            pass
        try:
            self.proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self.proc.kill()


class WireClient:
    """Tiny blocking client for the evaluator wire protocol."""

    def __init__(self, host, port, timeout=30.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        self.file = self.sock.makefile("rwb")
        hello = json.loads(self.file.readline())
        if hello.get("proto") != 1:
            raise RuntimeError("unexpected hello %r" % (hello,))
        self.planes = int(hello["planes"])
        self._rid = 0

    def evaluate(self, planes, size, max_moves=0):
        self._rid += 1
        blob = base64.b64encode(planes.astype("<f4").tobytes()).decode("ascii")
        req = {"id": self._rid, "size": size, "set": "extended",
               "planes": blob, "max_moves": max_moves}
        self.file.write((json.dumps(req, separators=(",", ":")) + "\n")
                        .encode("ascii"))
        self.file.flush()
        resp = json.loads(self.file.readline())
        if resp.get("error"):
            raise RuntimeError("service error: %s" % resp["error"])
        return [(int(m["c"]), float(m["p"])) for m in resp["moves"]]

    def close(self):
        try:
            self.sock.close()
        except OSError:
            pass


class ModelPlayer:
    """Plays the served model raw: strongest legal entry, with the first
    move drawn from the softmax for opening variety."""

    def __init__(self, client, rng, sample_top=300):
        self.client = client
        self.rng = rng
        self.sample_top = sample_top
        self.moved = False

    def choose(self, board):
        planes = feats.extract(board, 0, feats.EXTENDED)
        entries = self.client.evaluate(planes, board.size)
        legal = [(m, p) for m, p in entries if board.is_legal(m)]
        if not legal:
            return PASS
        if not self.moved and len(legal) > 1:
            self.moved = True
            top = legal[:self.sample_top]
            total = sum(p for _, p in top)
            x = self.rng.random() * total
            for m, p in top:
                x -= p
                if x <= 0:
                    return m
            return top[-1][0]
        self.moved = True
        return legal[0][0]


def play_game(engine_argv, client, engine_is_black, size=9, komi=7.5,
              rng=None, move_cap=None):
    """One refereed game; returns (winner_is_engine, game, detail)."""
    import random as _random
    rng = rng or _random.Random(0)
    cap = move_cap or size * size * 3
    board = Goban(size)
    model = ModelPlayer(client, rng)
    engine = GtpSubprocess(engine_argv)
    moves = []
    detail = ""
    try:
        engine.command("boardsize %d" % size)
        engine.command("clear_board")
        engine.command("komi %s" % komi)
        engine_color = BLACK if engine_is_black else WHITE
        while True:
            color = board.to_move
            cname = "B" if color == BLACK else "W"
            if color == engine_color:
                answer = engine.command("genmove %s" % cname.lower())
                move = from_vertex(answer, size)
                if move == "resign":
                    detail = "engine resigned"
                    return False, _record(size, komi, moves, detail), detail
                board.play(move)  # raises if the engine broke the rules
                moves.append((color, move))
            else:
                move = model.choose(board)
                board.play(move)
                moves.append((color, move))
                engine.command("play %s %s" % (cname.lower(),
                                               to_vertex(move, size)))
            if board.pass_streak >= 2:
                break
            if len(moves) >= cap:
                detail = "move cap"
                break
        black, white, margin = board.area_score(komi)
        engine_won = (margin > 0) == (engine_color == BLACK)
        detail = detail or ("B+%g" % margin if margin > 0 else "W+%g" % -margin)
        return engine_won, _record(size, komi, moves, detail), detail
    finally:
        engine.close()


def _record(size, komi, moves, result):
    return sgfio.Game(size, komi, moves, result=result)


def run_match(engine_argv_base, host, port, games, size=9, komi=7.5,
              seed=0, out_dir=None, log=None):
    """Engine (with served evaluator) vs raw served model; alternating
    colors.  Returns (engine_wins, results list)."""
    import pathlib
    import random as _random
    wins = 0
    results = []
    client = WireClient(host, port)
    try:
        for g in range(games):
            rng = _random.Random(seed * 1_000_003 + g)
            argv = list(engine_argv_base) + ["--seed", str(rng.randrange(1, 2**31))]
            engine_black = g % 2 == 0
            won, game, detail = play_game(argv, client, engine_black,
                                          size, komi, rng)
            wins += won
            results.append({"game": g, "engine_black": engine_black,
                            "engine_won": won, "detail": detail,
                            "moves": len(game.moves)})
            if out_dir is not None:
                p = pathlib.Path(out_dir)
                p.mkdir(parents=True, exist_ok=True)
                (p / ("game%03d.sgf" % g)).write_text(sgfio.serialize(game))
            if log is not None:
                log(json.dumps(results[-1]))
    finally:
        client.close()
    return wins, results
