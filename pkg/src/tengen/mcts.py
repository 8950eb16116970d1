"""Monte-Carlo tree search: policy-ordered expansion, UCT selection with
uniform noise for thread divergence, default-policy playout evaluation,
and win/visit backup.

The tree holds one node per reached position.  A node's m/n statistics
count playout wins from the perspective of the player who moved into the
node (the parent's side to move), so a parent chooses among children by
their m/n directly, no sign flip.  Expansion asks the policy evaluator
for a distribution, keeps the shortest prefix reaching the cumulative
threshold (clipped to the configured child range), then optionally
rewrites it with ladder knowledge: moves that start a losing ladder are
pushed out of the set, ladder captures are forced in, the size cap kept.
Each rollout expands at most one node and always runs exactly one
playout; visit conservation (n = 1 + sum of children's n) therefore
holds at quiescence, the 1 being the node's own expansion playout.

Workers share the tree under one lock but run their playouts and
evaluator round-trips outside it.  Exactly one worker expands a given
node; others arriving at a pending node wait on its event.  Divergence
between threads comes only from the uniform [0, sigma] noise added to
win rates during selection.
"""

import itertools
import math
import random
import threading
import time

from .board import BLACK, WHITE, EMPTY, PASS, opponent
from . import fastboard, features, ladder, patterns, playout, policy

UNEXPANDED = 0
PENDING = 1
EXPANDED = 2

PLAY_BEST = "play-best"
PASS_GAME = "pass"
RESIGN = "resign"

_rid_counter = itertools.count(1)


class SearchConfig:
    """Search knobs; defaults favor a quick desk-scale engine."""

    def __init__(self, rollouts=1000, threads=1, sigma=0.05,
                 cumulative_threshold=0.8, max_children=20, min_children=1,
                 komi=7.5, exploration=1.0, seed=0,
                 move_switch=False, switch_at=140,
                 early_max_children=3, late_max_children=5,
                 ladder_moves=True, ladder_depth=ladder.DEPTH_CAP,
                 ladder_node_depth=1,
                 tree_reuse=True, pondering=False, virtual_loss=False,
                 resign_trials=1000, resign_margin=10.0, resign_winrate=0.1,
                 playout_cfg=None, feature_set=features.EXTENDED):
        if rollouts < 1:
            raise ValueError("rollouts must be positive")
        if not 0.0 <= sigma < 1.0:
            raise ValueError("sigma must be in [0, 1)")
        if max_children < min_children or min_children < 1:
            raise ValueError("need max_children >= min_children >= 1")
        if feature_set not in (features.STANDARD, features.EXTENDED):
            raise ValueError("unknown feature set %r" % (feature_set,))
        self.rollouts = rollouts
        self.threads = threads
        self.sigma = sigma
        self.cumulative_threshold = cumulative_threshold
        self.max_children = max_children
        self.min_children = min_children
        self.komi = komi
        self.exploration = exploration
        self.seed = seed
        self.move_switch = move_switch
        self.switch_at = switch_at
        self.early_max_children = early_max_children
        self.late_max_children = late_max_children
        self.ladder_moves = ladder_moves
        self.ladder_depth = ladder_depth
        self.ladder_node_depth = ladder_node_depth
        self.tree_reuse = tree_reuse
        self.pondering = pondering
        self.virtual_loss = virtual_loss
        self.resign_trials = resign_trials
        self.resign_margin = resign_margin
        self.resign_winrate = resign_winrate
        self.playout_cfg = playout_cfg or playout.PlayoutConfig()
        self.feature_set = feature_set

    def topk_at(self, move_number):
        if not self.move_switch:
            return self.max_children
        if move_number < self.switch_at:
            return self.early_max_children
        return self.late_max_children


class SearchNode:
    __slots__ = ("move", "to_move", "m", "n", "vloss", "children", "state",
                 "event", "pos")

    def __init__(self, move, to_move):
        self.move = move
        self.to_move = to_move
        self.m = 0.0
        self.n = 0
        self.vloss = 0
        self.children = ()
        self.state = UNEXPANDED
        self.event = None
        # position cached at expansion so a child expands with one play
        # from its parent instead of replaying the whole path
        self.pos = None

    def win_rate(self):
        """Playout win rate for the player who moved into this node."""
        return self.m / self.n if self.n else 0.0


class SearchTree:
    """Root node plus the position it stands on; shared across workers and,
    with tree reuse, across consecutive moves."""

    def __init__(self, pos):
        self.pos = pos
        self.root = SearchNode(None, pos.to_move)
        self.lock = threading.Lock()


def advance_root(tree, played):
    """Re-root the tree under the played move, keeping its statistics, or
    start fresh when the move was never expanded."""
    with tree.lock:
        nxt = tree.pos.play(played)
        for child in tree.root.children:
            if child.move == played:
                tree.pos = nxt
                tree.root = child
                return tree
        tree.pos = nxt
        tree.root = SearchNode(None, nxt.to_move)
        return tree


def uct_select(node, exploration, rng, sigma=0.0, virtual_loss=False):
    """Pick a child: unvisited children first in policy order, else argmax
    of win rate + U[0, sigma] + exploration bonus; sigma=0 ties go to the
    lower index."""
    for child in node.children:
        if child.n == 0 and (not virtual_loss or child.vloss == 0):
            return child
    log_n = math.log(max(node.n, 2))
    best, best_score = None, -math.inf
    for child in node.children:
        n = child.n + (child.vloss if virtual_loss else 0)
        score = child.m / n if n else 0.0
        if sigma > 0.0:
            score += rng.uniform(0.0, sigma)
        score += exploration * math.sqrt(log_n / n)
        if score > best_score:
            best, best_score = child, score
    return best


class _Worker:
    """Per-thread search state: kernel board, RNG streams, rollout driver."""

    def __init__(self, tree, cfg, evaluator, index, master_seed, shared):
        self.tree = tree
        self.cfg = cfg
        self.evaluator = evaluator
        self.shared = shared
        self.noise = random.Random((master_seed * 0x9E3779B97F4A7C15
                                    + index) & 0xFFFFFFFFFFFFFFFF)
        self.krng = playout.worker_rng(master_seed, index)
        self.fb = fastboard.FastBoard(tree.pos.size)
        self.match_lut, _ = patterns.tables()
        self.opts = cfg.playout_cfg.opts_mask()
        self.cap = cfg.playout_cfg.cap_for(tree.pos.size)

    def run(self, keep_going):
        while self.shared["abort"] is None and keep_going():
            self.one_rollout()
            with self.shared["lock"]:
                self.shared["done"] += 1

    def one_rollout(self):
        cfg = self.cfg
        tree = self.tree
        self.fb.load_position(tree.pos)
        path = [tree.root]
        played = []
        node = tree.root
        expanding = False
        tree.lock.acquire()
        try:
            while True:
                if node.state == EXPANDED:
                    if not node.children:
                        break
                    child = uct_select(node, cfg.exploration, self.noise,
                                       cfg.sigma, cfg.virtual_loss)
                    if cfg.virtual_loss:
                        child.vloss += 1
                    # tree moves are pre-validated; raw kernel play
                    fastboard.play(self.fb.S, self.fb.pad(child.move),
                                   node.to_move)
                    played.append(child.move)
                    path.append(child)
                    node = child
                elif node.state == UNEXPANDED:
                    node.state = PENDING
                    node.event = threading.Event()
                    expanding = True
                    break
                else:
                    event = node.event
                    tree.lock.release()
                    ok = event.wait(timeout=60.0)
                    tree.lock.acquire()
                    if self.shared["abort"] is not None:
                        self._unwind(path)
                        return
                    if not ok and node.state == PENDING:
                        self.shared["abort"] = policy.EvaluatorUnavailable(
                            "node expansion stalled")
                        self._unwind(path)
                        return
        finally:
            tree.lock.release()

        if expanding:
            try:
                parent = path[-2] if len(path) > 1 else None
                if parent is not None and parent.pos is not None:
                    pos = parent.pos.play(node.move)
                else:
                    pos = tree.pos
                    for mv in played:
                        pos = pos.play(mv)
                pr = self._evaluate(pos)
                moves = expansion_moves(pos, pr, cfg, depth=len(path) - 1)
            except policy.EvaluatorUnavailable as err:
                with tree.lock:
                    self.shared["abort"] = err
                    node.state = UNEXPANDED
                    node.event.set()
                    node.event = None
                    self._unwind(path)
                return
            winner = self._playout()
            with tree.lock:
                node.pos = pos
                node.children = tuple(SearchNode(mv, opponent(node.to_move))
                                      for mv in moves)
                node.state = EXPANDED
                node.event.set()
                node.event = None
                self._backup(path, winner)
        else:
            winner = self._playout()
            with tree.lock:
                self._backup(path, winner)

    def _evaluate(self, pos):
        ev = self.evaluator
        if hasattr(ev, "evaluate_position"):
            return ev.evaluate_position(pos)
        req = policy.request_for(pos, next(_rid_counter), 0,
                                 set_kind=self.cfg.feature_set)
        if hasattr(ev, "evaluate"):
            resp = ev.evaluate(req)
        else:
            (resp,) = ev.evaluate_batch([req])
        # the engine, not the service, owns legality
        legal = set(pos.legal_moves())
        return policy.PolicyResult(
            (m, p) for m, p in resp.entries if m in legal)

    def _playout(self):
        """Default policy to the end from the worker board's current state."""
        b, w = fastboard.run_playout(self.fb.S, self.match_lut, self.krng,
                                     self.cap, self.opts)
        margin = b - w - self.cfg.komi
        return BLACK if margin > 0 else WHITE if margin < 0 else EMPTY

    def _backup(self, path, winner):
        for node in path:
            node.n += 1
            mover = opponent(node.to_move)
            if winner == mover:
                node.m += 1.0
            elif winner == EMPTY:
                node.m += 0.5
            if self.cfg.virtual_loss and node.vloss > 0:
                node.vloss -= 1

    def _unwind(self, path):
        if self.cfg.virtual_loss:
            for node in path:
                if node.vloss > 0:
                    node.vloss -= 1


def expansion_moves(pos, pr, cfg, depth=0):
    """Children for a node: threshold prefix of the policy, then the ladder
    rewrite (losing-ladder moves out, ladder captures in), size cap kept.
    The rewrite runs only near the root (depth < cfg.ladder_node_depth);
    deeper in the tree the playouts resolve ladders statistically."""
    if len(pr) == 0:
        return ()
    topk = cfg.topk_at(pos.move_number)
    base = policy.select_expansion_set(
        pr, cfg.cumulative_threshold, max_moves=topk,
        min_moves=cfg.min_children)
    if not cfg.ladder_moves or depth >= cfg.ladder_node_depth:
        return tuple(base)
    verdict = {}

    def loses(mv):
        if mv not in verdict:
            verdict[mv] = ladder.move_starts_losing_ladder(
                pos, mv, cfg.ladder_depth)
        return verdict[mv]

    kept = [mv for mv in base if not loses(mv)]
    if kept and len(kept) < len(base):
        for mv, _ in pr.entries:
            if len(kept) == len(base):
                break
            if mv in verdict or mv in kept:
                continue
            if not loses(mv):
                kept.append(mv)
    if not kept:
        kept = list(base)
    captures = [mv for mv in ladder.ladder_capture_moves(pos, cfg.ladder_depth)
                if mv not in kept]
    if captures:
        room = max(topk - len(captures), 0)
        kept = kept[:room] + captures[:topk]
    return tuple(kept)


def run_search(root_pos, cfg=None, evaluator=None, rng=None, tree=None):
    """Run exactly cfg.rollouts rollouts; returns (best move, stats dict,
    win rate of the best child).  EvaluatorUnavailable propagates after the
    workers stop."""
    cfg = cfg or SearchConfig()
    evaluator = evaluator or policy.BuiltinEvaluator()
    if tree is None or not cfg.tree_reuse:
        tree = SearchTree(root_pos)
    elif tree.pos.grid_hash != root_pos.grid_hash or \
            tree.pos.to_move != root_pos.to_move:
        tree = SearchTree(root_pos)
    master = cfg.seed if rng is None else rng.randrange(1 << 62)
    start = time.monotonic()
    shared = {"abort": None, "done": 0, "lock": threading.Lock()}
    tickets = iter(range(cfg.rollouts))
    ticket_lock = threading.Lock()

    def keep_going():
        with ticket_lock:
            return next(tickets, None) is not None

    n_workers = max(1, min(cfg.threads, cfg.rollouts))
    if n_workers == 1:
        _Worker(tree, cfg, evaluator, 0, master, shared).run(keep_going)
    else:
        workers = [_Worker(tree, cfg, evaluator, w, master, shared)
                   for w in range(n_workers)]
        threads = [threading.Thread(target=w.run, args=(keep_going,),
                                    daemon=True) for w in workers]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
    if shared["abort"] is not None:
        raise shared["abort"]

    best = best_child(tree.root)
    if best is None:
        root = tree.root
        rate = (root.n - root.m) / root.n if root.n else 0.5
        return PASS, search_stats(tree, cfg, shared["done"],
                                  time.monotonic() - start, rate), rate
    rate = best.win_rate() if best.n else \
        (tree.root.n - tree.root.m) / max(tree.root.n, 1)
    stats = search_stats(tree, cfg, shared["done"],
                         time.monotonic() - start, rate)
    return best.move, stats, rate


def best_child(root):
    """Most-visited child; ties keep the earlier (higher-prior) one."""
    best = None
    for child in root.children:
        if best is None or child.n > best.n:
            best = child
    return best


def search_stats(tree, cfg, rollouts, elapsed, win_rate):
    """Tree summary for logs: per-child move, visits, win rate, prior rank.
    Serializes to one JSON line per move via json.dumps."""
    children = [{"move": c.move, "visits": c.n, "wins": round(c.m, 1),
                 "win_rate": round(c.win_rate(), 4), "rank": i}
                for i, c in enumerate(tree.root.children)]
    return {"rollouts": rollouts,
            "elapsed_s": round(elapsed, 3),
            "rollouts_per_s": round(rollouts / elapsed, 1) if elapsed else 0.0,
            "root_visits": tree.root.n,
            "win_rate": round(win_rate, 4),
            "children": children}


def decide_resign_or_pass(win_rate, report, color, opponent_passed,
                          resign_margin=10.0, resign_winrate=0.1):
    """Post-search decision: resign when every trial loses by the margin and
    the search agrees we are lost; pass to end a game already won once the
    opponent passes; otherwise play the searched move."""
    if report is not None:
        if report.all_trials_lose_by(color, resign_margin) and \
                win_rate < resign_winrate:
            return RESIGN
        if opponent_passed:
            margin = report.score.margin
            if margin != 0 and (margin > 0) == (color == BLACK):
                return PASS_GAME
    return PLAY_BEST


def decide_move(pos, cfg, win_rate, opponent_passed, evaluator=None):
    """Genmove tail: run the dead-stone trials only when they can change the
    outcome (possible resign, or opponent passed), then apply the rule."""
    need_report = opponent_passed or win_rate < cfg.resign_winrate
    report = None
    if need_report:
        report = playout.estimate_dead_and_score(
            pos, trials=cfg.resign_trials, komi=cfg.komi,
            cfg=cfg.playout_cfg, seed=cfg.seed + pos.move_number)
    decision = decide_resign_or_pass(
        win_rate, report, pos.to_move, opponent_passed,
        cfg.resign_margin, cfg.resign_winrate)
    return decision, report


class Ponderer:
    """Background search between moves; runs workers on the shared tree
    until stop() and reports how many rollouts they added."""

    def __init__(self):
        self._threads = []
        self._stop = threading.Event()
        self._shared = None

    def start(self, tree, cfg, evaluator):
        if self._threads:
            raise RuntimeError("already pondering")
        self._stop.clear()
        self._shared = {"abort": None, "done": 0, "lock": threading.Lock()}
        master = cfg.seed + 0x5DEECE66D

        def keep_going():
            return not self._stop.is_set()

        for w in range(max(1, cfg.threads)):
            worker = _Worker(tree, cfg, evaluator, w, master, self._shared)
            t = threading.Thread(target=worker.run, args=(keep_going,),
                                 daemon=True)
            t.start()
            self._threads.append(t)

    def stop(self):
        if not self._threads:
            return 0
        self._stop.set()
        for t in self._threads:
            t.join(timeout=120.0)
        self._threads = []
        done = self._shared["done"] if self._shared else 0
        self._shared = None
        return done
