"""GTP front end: binds the search engine to a stdio text protocol so
GUIs, referees, and the match harness can drive it.

Command lines carry an optional numeric id, a command name, and
arguments.  Success answers are `=[id] result` and failures
`?[id] message`, each terminated by a blank line.  Vertices use the
standard column letters with I skipped; row 1 is the board edge at row
index 0.  `undo` pops a position history stack and discards the search
tree; a `play` or `genmove` for the side not on the move rebuilds the
position as a setup (the stone layout is kept, ko and repetition
history restart), which is the usual referee behavior of treating
out-of-turn placements as free setup.  With pondering enabled the
search workers keep improving the current tree between commands and
are halted whenever the next command arrives.
"""

import json
import sys

from . import mcts, playout, policy
from .board import (BLACK, WHITE, EMPTY, PASS, IllegalMove, Position,
                    point, opponent)

ENGINE_NAME = "tengen"
ENGINE_VERSION = "0.1.0"
COLS = "ABCDEFGHJKLMNOPQRSTUVWXYZ"


def format_vertex(move, size):
    if move == PASS:
        return "pass"
    col, row = move % size, move // size
    return COLS[col] + str(row + 1)


def parse_vertex(text, size):
    t = text.strip().upper()
    if t == "PASS":
        return PASS
    if not t or t[0] not in COLS or not t[1:].isdigit():
        raise ValueError("bad vertex %r" % (text,))
    col = COLS.index(t[0])
    row = int(t[1:]) - 1
    if not (0 <= col < size and 0 <= row < size):
        raise ValueError("vertex off board %r" % (text,))
    return point(col, row, size)


def parse_color(text):
    t = text.strip().lower()
    if t in ("b", "black"):
        return BLACK
    if t in ("w", "white"):
        return WHITE
    raise ValueError("bad color %r" % (text,))


def format_score(margin):
    if margin == 0:
        return "0"
    side = "B" if margin > 0 else "W"
    return "%s+%g" % (side, abs(margin))


class GtpEngine:
    """One engine instance: position, history stack, search tree, knobs."""

    COMMANDS = ("boardsize", "clear_board", "final_score", "genmove",
                "komi", "list_commands", "name", "play", "protocol_version",
                "quit", "time_left", "time_settings", "undo", "version")

    def __init__(self, cfg=None, evaluator=None, log_path=None):
        self.cfg = cfg or mcts.SearchConfig()
        self.evaluator = evaluator or policy.BuiltinEvaluator()
        self.size = 19
        self.history = []
        self.tree = mcts.SearchTree(Position.empty(self.size))
        self.last_stats = None
        self._log = open(log_path, "a") if log_path else None

    @property
    def pos(self):
        return self.tree.pos

    def close(self):
        if self._log:
            self._log.close()
            self._log = None

    def _fresh(self, pos):
        self.tree = mcts.SearchTree(pos)

    def _ensure_to_move(self, color):
        """Setup-rebuild when asked to move for the side not on turn."""
        if self.pos.to_move == color:
            return
        grid = self.pos.grid
        size = self.pos.size
        self._fresh(Position.from_setup(
            size,
            black_stones=[p for p in range(size * size)
                          if grid[p] == BLACK],
            white_stones=[p for p in range(size * size)
                          if grid[p] == WHITE],
            to_move=color))

    # -- command handlers, each returns the success payload ----------------

    def cmd_protocol_version(self, args):
        return "2"

    def cmd_name(self, args):
        return ENGINE_NAME

    def cmd_version(self, args):
        return ENGINE_VERSION

    def cmd_list_commands(self, args):
        return "\n".join(self.COMMANDS)

    def cmd_boardsize(self, args):
        n = int(args[0])
        if not 2 <= n <= len(COLS):
            raise ValueError("unacceptable size")
        self.size = n
        self.history = []
        self._fresh(Position.empty(n))
        return ""

    def cmd_clear_board(self, args):
        self.history = []
        self._fresh(Position.empty(self.size))
        return ""

    def cmd_komi(self, args):
        self.cfg.komi = float(args[0])
        return ""

    def cmd_play(self, args):
        color = parse_color(args[0])
        move = parse_vertex(args[1], self.size)
        self._ensure_to_move(color)
        prev = self.pos
        try:
            mcts.advance_root(self.tree, move)
        except IllegalMove:
            raise ValueError("illegal move")
        self.history.append(prev)
        return ""

    def cmd_genmove(self, args):
        color = parse_color(args[0])
        self._ensure_to_move(color)
        opponent_passed = self.pos.last_move == PASS
        best, stats, rate = mcts.run_search(
            self.pos, self.cfg, evaluator=self.evaluator, tree=self.tree)
        decision, _ = mcts.decide_move(
            self.pos, self.cfg, rate, opponent_passed,
            evaluator=self.evaluator)
        if decision == mcts.RESIGN:
            answer = "resign"
        else:
            move = PASS if decision == mcts.PASS_GAME else best
            prev = self.pos
            mcts.advance_root(self.tree, move)
            self.history.append(prev)
            answer = format_vertex(move, self.size)
        self.last_stats = stats
        if self._log:
            self._log.write(json.dumps(
                {"color": "b" if color == BLACK else "w",
                 "answer": answer, "decision": decision,
                 "stats": stats}) + "\n")
            self._log.flush()
        return answer

    def cmd_final_score(self, args):
        report = playout.estimate_dead_and_score(
            self.pos, trials=self.cfg.resign_trials, komi=self.cfg.komi,
            cfg=self.cfg.playout_cfg,
            seed=self.cfg.seed + self.pos.move_number)
        return format_score(report.score.margin)

    def cmd_undo(self, args):
        if not self.history:
            raise ValueError("cannot undo")
        self._fresh(self.history.pop())
        return ""

    def cmd_time_settings(self, args):
        return ""

    def cmd_time_left(self, args):
        return ""

    def cmd_quit(self, args):
        return ""

    def dispatch(self, name, args):
        """Run one command; (True, payload) or (False, message)."""
        handler = getattr(self, "cmd_" + name, None) \
            if name in self.COMMANDS else None
        if handler is None:
            return False, "unknown command"
        try:
            return True, handler(args)
        except (ValueError, IndexError) as err:
            msg = str(err) or "syntax error"
            return False, msg
        except policy.EvaluatorUnavailable as err:
            return False, "evaluator unavailable: %s" % (err,)


def _parse_line(raw):
    """Strip comments/controls, split off the optional numeric id.
    Returns (id or None, command, args) or None for blank lines."""
    line = raw.split("#", 1)[0].replace("\t", " ").strip()
    if not line:
        return None
    parts = line.split()
    ident = None
    if parts[0].isdigit():
        ident = parts[0]
        parts = parts[1:]
        if not parts:
            return None
    return ident, parts[0].lower(), parts[1:]


def _respond(out, ok, ident, payload):
    head = ("=" if ok else "?") + (ident or "")
    body = (" " + payload) if payload else ""
    out.write(head + body + "\n\n")
    out.flush()


def serve(instream=None, outstream=None, cfg=None, evaluator=None,
          log_path=None):
    """Blocking command loop; returns when quit arrives or input ends."""
    instream = instream if instream is not None else sys.stdin
    outstream = outstream if outstream is not None else sys.stdout
    engine = GtpEngine(cfg, evaluator, log_path)
    ponderer = mcts.Ponderer() if engine.cfg.pondering else None
    try:
        for raw in instream:
            if ponderer is not None:
                ponderer.stop()
            parsed = _parse_line(raw)
            if parsed is None:
                continue
            ident, name, args = parsed
            ok, payload = engine.dispatch(name, args)
            _respond(outstream, ok, ident, payload)
            if name == "quit" and ok:
                break
            if ponderer is not None:
                ponderer.start(engine.tree, engine.cfg, engine.evaluator)
    finally:
        if ponderer is not None:
            ponderer.stop()
        engine.close()
    return engine
