"""Default playout policy: priority cascade, playout scoring, dead-stone trials.

The move cascade, in priority order, considering only the area around the
opponent's last move for rules 1-4:

  1. capture the opponent group just played if it is in atari
  2. rescue own groups the last move put in atari (extend or counter-capture)
  3. occupy the vital point of a small opponent eyespace next to the last move
  4. a uniformly chosen 3x3-pattern match among the 8 surrounding cells
  5. a uniformly chosen acceptable move anywhere; Pass when none remains

"Acceptable" always excludes filling an own true one-point eye, and (toggle)
self-atari of groups larger than one stone.  Playout legality is
occupied/suicide/simple-ko; positional superko is not enforced inside
playouts (cycles are cut by the max_moves cap instead), while the game record
and search root keep the full rule.

This module holds the readable pure-python form of every rule, used directly
for move generation on Position and as the authority the compiled kernel
(fastboard) is differentially tested against.  Whole-playout operations
delegate to the kernel for speed.
"""

import numpy as np

from .board import (BLACK, WHITE, EMPTY, PASS, Position, ScoreResult,
                    opponent, is_place, point, point_coords)
from . import fastboard
from . import patterns


class PlayoutConfig:
    """Playout knobs: move cap, seed, and heuristic toggles."""

    def __init__(self, max_moves=None, seed=0, patterns=True, atari=True,
                 nakade=True, avoid_self_atari=True):
        if max_moves is not None and max_moves <= 0:
            raise ValueError("max_moves must be positive")
        self.max_moves = max_moves
        self.seed = seed
        self.patterns = patterns
        self.atari = atari
        self.nakade = nakade
        self.avoid_self_atari = avoid_self_atari

    def cap_for(self, size):
        return self.max_moves if self.max_moves is not None else 3 * size * size

    def opts_mask(self):
        m = 0
        if self.atari:
            m |= fastboard.OPT_ATARI
        if self.nakade:
            m |= fastboard.OPT_NAKADE
        if self.patterns:
            m |= fastboard.OPT_PATTERN
        if self.avoid_self_atari:
            m |= fastboard.OPT_NO_SELFATARI
        return m


class DeadStoneReport:
    """Outcome of the N-trial dead-stone estimate."""

    def __init__(self, trials, alive, dead_groups, margins, score):
        self.trials = trials
        self.alive = alive              # group head point -> own-color end rate
        self.dead_groups = dead_groups  # tuple of frozensets of points
        self.margins = margins          # black-perspective, one per trial
        self.score = score              # ScoreResult on the cleaned board

    def all_trials_lose_by(self, color, points=10):
        """True when every trial loses by at least `points` for `color`."""
        sign = 1 if color == BLACK else -1
        return all(sign * m <= -points for m in self.margins)


# -- pure-python rule reference ---------------------------------------------

def _merged_after(pos, pt, color):
    """(liberties, stones, captured_points) of the group created by playing
    pt, ignoring ko bans.  Liberties empty means suicide."""
    empty_nbs = {nb for nb in pos._neighbors(pt) if pos.grid[nb] == EMPTY}
    own_heads = {int(pos.group_id[nb]) for nb in pos._neighbors(pt)
                 if pos.grid[nb] == color}
    captured_heads = pos._captures_for(pt, color)
    stones = {pt}
    libs = set(empty_nbs)
    for h in own_heads:
        stones |= pos._stones[h]
        libs |= pos._libs[h]
    libs.discard(pt)
    captured = set()
    for h in captured_heads:
        captured |= pos._stones[h]
    for cp in captured:
        if any(nb in stones for nb in pos._neighbors(cp)):
            libs.add(cp)
    return libs, stones, captured


def true_eye(pos, pt, color):
    """Empty point whose orthogonal neighbors are all own stones or board
    edge, with fewer than two hostile marks on the diagonals (the edge itself
    counts as one mark)."""
    if pos.grid[pt] != EMPTY:
        return False
    col, row = point_coords(pt, pos.size)
    for nb in pos._neighbors(pt):
        if pos.grid[nb] != color:
            return False
    opp = opponent(color)
    bad = 0
    at_edge = False
    for dc, dr in ((-1, -1), (-1, 1), (1, -1), (1, 1)):
        c, r = col + dc, row + dr
        if not (0 <= c < pos.size and 0 <= r < pos.size):
            at_edge = True
        elif pos.grid[point(c, r, pos.size)] == opp:
            bad += 1
    if at_edge:
        bad += 1
    return bad < 2


def acceptable(pos, pt, color=None, avoid_self_atari=True):
    """Playout move filter (simple-ko legality, eye and self-atari rules)."""
    if color is None:
        color = pos.to_move
    if pos.grid[pt] != EMPTY or pt == pos.ko_point:
        return False
    libs, stones, captured = _merged_after(pos, pt, color)
    if not libs:
        return False
    if avoid_self_atari and len(libs) == 1 and len(stones) > 1:
        return False
    if true_eye(pos, pt, color):
        return False
    return True


def _last_place(pos):
    if pos.last_move is None or not is_place(pos.last_move):
        return None
    return pos.last_move


def capture_candidates(pos, avoid_self_atari=True):
    """Rule 1: the liberty of the opponent group just played, if in atari."""
    last = _last_place(pos)
    if last is None:
        return []
    if len(pos.group_liberties(last)) != 1:
        return []
    (lib,) = pos.group_liberties(last)
    if acceptable(pos, lib, pos.to_move, avoid_self_atari):
        return [lib]
    return []


def escape_candidates(pos, avoid_self_atari=True):
    """Rule 2: extend own atari groups next to the last move at their final
    liberty, or counter-capture an adjacent opponent group in atari."""
    last = _last_place(pos)
    if last is None:
        return []
    color = pos.to_move
    opp = opponent(color)
    out = []
    seen_heads = set()
    for nb in pos._neighbors(last):
        if pos.grid[nb] != color:
            continue
        h = int(pos.group_id[nb])
        if h in seen_heads:
            continue
        seen_heads.add(h)
        if len(pos._libs[h]) != 1:
            continue
        (lib,) = pos._libs[h]
        if acceptable(pos, lib, color, avoid_self_atari) and lib not in out:
            out.append(lib)
        for s in pos._stones[h]:
            for nb2 in pos._neighbors(s):
                if pos.grid[nb2] != opp:
                    continue
                h2 = int(pos.group_id[nb2])
                if len(pos._libs[h2]) == 1:
                    (cap,) = pos._libs[h2]
                    if acceptable(pos, cap, color, avoid_self_atari) and cap not in out:
                        out.append(cap)
    return sorted(out)


def nakade_point(pos, avoid_self_atari=True):
    """Rule 3: the vital point of a small opponent eyespace touching the last
    move, or None.  Eyespace: empty region of at most six points bounded only
    by opponent stones; vital point: its unique cell of maximal in-region
    degree, degree at least two."""
    last = _last_place(pos)
    if last is None:
        return None
    color = pos.to_move
    size = pos.size
    col, row = point_coords(last, size)
    for dc, dr in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        c, r = col + dc, row + dr
        if not (0 <= c < size and 0 <= r < size):
            continue
        start = point(c, r, size)
        if pos.grid[start] != EMPTY:
            continue
        region = {start}
        frontier = [start]
        ok = True
        while frontier and ok:
            p = frontier.pop()
            for nb in pos._neighbors(p):
                v = pos.grid[nb]
                if v == EMPTY and nb not in region:
                    if len(region) >= 6:
                        ok = False
                        break
                    region.add(nb)
                    frontier.append(nb)
                elif v == color:
                    ok = False
                    break
        if not ok or len(region) < 3:
            continue
        degree = {p: sum(1 for nb in pos._neighbors(p) if nb in region)
                  for p in region}
        best_deg = max(degree.values())
        vital = [p for p, d in degree.items() if d == best_deg]
        if len(vital) == 1 and best_deg >= 2:
            if acceptable(pos, vital[0], color, avoid_self_atari):
                return vital[0]
    return None


def pattern_candidates(pos, avoid_self_atari=True):
    """Rule 4: empty cells among the 8 surrounding the last move whose 3x3
    context matches the pattern table."""
    last = _last_place(pos)
    if last is None:
        return []
    match_lut, _ = patterns.tables()
    color = pos.to_move
    size = pos.size
    col, row = point_coords(last, size)
    out = []
    for dc in (-1, 0, 1):
        for dr in (-1, 0, 1):
            if dc == 0 and dr == 0:
                continue
            c, r = col + dc, row + dr
            if not (0 <= c < size and 0 <= r < size):
                continue
            pt = point(c, r, size)
            if pos.grid[pt] != EMPTY:
                continue
            if not match_lut[patterns.code_at(pos.grid, size, pt, color)]:
                continue
            if acceptable(pos, pt, color, avoid_self_atari):
                out.append(pt)
    return sorted(out)


def uniform_candidates(pos, avoid_self_atari=True):
    """Rule 5 support: every acceptable empty point."""
    return [pt for pt in range(pos.size * pos.size)
            if pos.grid[pt] == EMPTY
            and acceptable(pos, pt, pos.to_move, avoid_self_atari)]


def cascade(pos, cfg=None):
    """(rule name, candidate list) the cascade would draw from."""
    cfg = cfg or PlayoutConfig()
    sa = cfg.avoid_self_atari
    if _last_place(pos) is not None:
        if cfg.atari:
            cands = capture_candidates(pos, sa)
            if cands:
                return "capture", cands
            cands = escape_candidates(pos, sa)
            if cands:
                return "escape", cands
        if cfg.nakade:
            vital = nakade_point(pos, sa)
            if vital is not None:
                return "nakade", [vital]
        if cfg.patterns:
            cands = pattern_candidates(pos, sa)
            if cands:
                return "pattern", cands
    return "uniform", uniform_candidates(pos, sa)


def default_policy_move(pos, rng, cfg=None):
    """One cascade move for pos.to_move; PASS when nothing is acceptable.
    rng is a random.Random."""
    rule, cands = cascade(pos, cfg)
    if not cands:
        return PASS
    if len(cands) == 1:
        return cands[0]
    return cands[rng.randrange(len(cands))]


# -- kernel-backed whole-playout operations ---------------------------------

def worker_rng(master_seed, worker_index):
    """Independent kernel RNG stream for one playout worker."""
    return fastboard.make_rng((master_seed * 0x100000001B3) ^ worker_index)


def run_playout(pos, cfg=None, rng=None, komi=7.5):
    """Play the default policy to the end from pos; (winner, margin).
    Margin is black's area lead minus komi; winner EMPTY on a jigo.
    rng is a kernel RNG state (see worker_rng); cfg.seed is used if absent."""
    cfg = cfg or PlayoutConfig()
    if rng is None:
        rng = fastboard.make_rng(cfg.seed)
    match_lut, _ = patterns.tables()
    fb = fastboard.FastBoard(pos.size)
    fb.load_position(pos)
    b, w = fastboard.run_playout(fb.S, match_lut, rng, cfg.cap_for(pos.size),
                                 cfg.opts_mask())
    margin = b - w - komi
    winner = BLACK if margin > 0 else WHITE if margin < 0 else EMPTY
    return winner, margin


def estimate_dead_and_score(pos, trials=1000, komi=7.5, cfg=None, seed=0):
    """Run `trials` playouts from pos; classify each of pos's groups dead when
    its points finish as opponent color or territory in more than half the
    trials; score the board with dead stones removed."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    cfg = cfg or PlayoutConfig()
    match_lut, _ = patterns.tables()
    size = pos.size
    fb = fastboard.FastBoard(size)
    rng = fastboard.make_rng(seed if seed else cfg.seed)
    margins = np.zeros(trials, dtype=np.float64)
    bcount = np.zeros(size * size, dtype=np.int64)
    wcount = np.zeros(size * size, dtype=np.int64)
    ko = fb.pad(pos.ko_point) if pos.ko_point is not None else 0
    fastboard.run_trials(
        fb.S, pos.grid, pos.to_move, ko, fb._enc_move(pos.last_move),
        fb._enc_move(pos.prev_move), pos.pass_streak, pos.move_number,
        trials, match_lut, rng, cfg.cap_for(size), cfg.opts_mask(), komi,
        margins, bcount, wcount)
    alive = {}
    dead_groups = []
    seen = set()
    for pt in range(size * size):
        color = int(pos.grid[pt])
        if color == EMPTY:
            continue
        h = int(pos.group_id[pt])
        if h in seen:
            continue
        seen.add(h)
        stones = pos._stones[h]
        own = bcount if color == BLACK else wcount
        opp = wcount if color == BLACK else bcount
        own_rate = sum(int(own[s]) for s in stones) / (len(stones) * trials)
        opp_rate = sum(int(opp[s]) for s in stones) / (len(stones) * trials)
        alive[h] = own_rate
        if opp_rate > 0.5:
            dead_groups.append(frozenset(stones))
    black_alive = [pt for pt in range(size * size)
                   if pos.grid[pt] == BLACK
                   and not any(pt in g for g in dead_groups)]
    white_alive = [pt for pt in range(size * size)
                   if pos.grid[pt] == WHITE
                   and not any(pt in g for g in dead_groups)]
    if black_alive or white_alive:
        cleaned = Position.from_setup(size, black_stones=black_alive,
                                      white_stones=white_alive,
                                      to_move=pos.to_move)
        score = cleaned.tromp_taylor_score(komi)
    else:
        score = Position.empty(size).tromp_taylor_score(komi)
    return DeadStoneReport(trials, alive, tuple(dead_groups),
                           tuple(float(m) for m in margins), score)
