"""Independent reference implementations used to check the engine's incremental kernels.

Everything here is deliberately naive: flood fills and full-board rescans,
no shared code with the package under test beyond the raw grid encoding
(0 empty, 1 black, 2 white, points indexed row * size + col).
"""

from collections import deque

EMPTY, BLACK, WHITE = 0, 1, 2


def neighbors(pt, size):
    r, c = divmod(pt, size)
    out = []
    if r > 0:
        out.append(pt - size)
    if r < size - 1:
        out.append(pt + size)
    if c > 0:
        out.append(pt - 1)
    if c < size - 1:
        out.append(pt + 1)
    return out


def flood_groups(grid, size):
    """All stone groups by flood fill: list of (color, stones frozenset, liberties frozenset)."""
    seen = set()
    groups = []
    for pt in range(size * size):
        color = grid[pt]
        if color == EMPTY or pt in seen:
            continue
        stones = set()
        libs = set()
        queue = deque([pt])
        seen.add(pt)
        while queue:
            cur = queue.popleft()
            stones.add(cur)
            for nb in neighbors(cur, size):
                if grid[nb] == color and nb not in seen:
                    seen.add(nb)
                    queue.append(nb)
                elif grid[nb] == EMPTY:
                    libs.add(nb)
        groups.append((color, frozenset(stones), frozenset(libs)))
    return groups


def score_by_reach(grid, size):
    """Area score: stones plus empty regions reaching exactly one color.

    Returns (black_points, white_points, neutral_points).
    """
    black = sum(1 for pt in range(size * size) if grid[pt] == BLACK)
    white = sum(1 for pt in range(size * size) if grid[pt] == WHITE)
    neutral = 0
    seen = set()
    for pt in range(size * size):
        if grid[pt] != EMPTY or pt in seen:
            continue
        region = set()
        reach = set()
        queue = deque([pt])
        seen.add(pt)
        while queue:
            cur = queue.popleft()
            region.add(cur)
            for nb in neighbors(cur, size):
                if grid[nb] == EMPTY:
                    if nb not in seen:
                        seen.add(nb)
                        queue.append(nb)
                else:
                    reach.add(grid[nb])
        if reach == {BLACK}:
            black += len(region)
        elif reach == {WHITE}:
            white += len(region)
        else:
            neutral += len(region)
    return black, white, neutral


def apply_move_brute(grid, size, pt, color):
    """Copy the grid, place a stone, remove dead opponent groups, then test own liberties.

    Returns the new grid (a list) or None if the move is suicide or the point
    is occupied.  No ko or repetition knowledge here; callers track that.
    """
    if grid[pt] != EMPTY:
        return None
    new = list(grid)
    new[pt] = color
    opp = BLACK + WHITE - color
    # remove opponent groups with no liberties
    for gcolor, stones, libs in flood_groups(new, size):
        if gcolor == opp and not libs:
            for s in stones:
                new[s] = EMPTY
    # then the placed group itself must have a liberty
    for gcolor, stones, libs in flood_groups(new, size):
        if pt in stones:
            if not libs:
                return None
            break
    return new


class ReplayOracle:
    """Replays a game from scratch with whole-grid history, for legality verdicts.

    Legality = point empty, not suicide (after removals), and the resulting
    grid not equal to any earlier grid (positional superko; simple ko is a
    special case).
    """

    def __init__(self, size):
        self.size = size
        self.grid = [EMPTY] * (size * size)
        self.to_move = BLACK
        self.history = {tuple(self.grid)}

    def result_grid(self, pt):
        return apply_move_brute(self.grid, self.size, pt, self.to_move)

    def is_legal(self, pt):
        new = self.result_grid(pt)
        if new is None:
            return False
        return tuple(new) not in self.history

    def legal_points(self):
        return [pt for pt in range(self.size * self.size) if self.is_legal(pt)]

    def play(self, pt):
        new = self.result_grid(pt)
        assert new is not None and tuple(new) not in self.history
        self.grid = new
        self.history.add(tuple(new))
        self.to_move = BLACK + WHITE - self.to_move

    def play_pass(self):
        self.to_move = BLACK + WHITE - self.to_move


def _group_at(grid, size, pt):
    """(stones, liberties) of the group containing pt, by local flood."""
    color = grid[pt]
    stones = {pt}
    libs = set()
    frontier = [pt]
    while frontier:
        p = frontier.pop()
        for nb in neighbors(p, size):
            v = grid[nb]
            if v == EMPTY:
                libs.add(nb)
            elif v == color and nb not in stones:
                stones.add(nb)
                frontier.append(nb)
    return stones, libs


def ladder_oracle(grid, size, target, depth=64):
    """Exhaustive alternating ladder search on a raw grid.

    The defender (owner of the group holding `target`) may only extend at the
    group's final liberty; the attacker may fill either group liberty, both
    branches explored.  Move legality: not suicide, and never recreating a
    grid already seen along the line (the fresh history also bans simple ko).
    Verdicts: "captured", "escapes", "not-a-ladder".
    """
    grid = [int(v) for v in grid]
    tgt_color = grid[target]
    assert tgt_color in (BLACK, WHITE)
    _, libs = _group_at(grid, size, target)
    if len(libs) not in (1, 2):
        return "not-a-ladder"
    defender_first = len(libs) == 1
    captured = _ladder_chase(grid, size, target, tgt_color, defender_first,
                             depth, frozenset([tuple(grid)]))
    return "captured" if captured else "escapes"


def _ladder_chase(grid, size, target, tgt_color, defender_turn, depth, seen):
    if depth <= 0:
        return False
    _, libs = _group_at(grid, size, target)
    if len(libs) > 2:
        return False
    if defender_turn:
        if len(libs) != 1:
            return False
        (ext,) = libs
        new = apply_move_brute(grid, size, ext, tgt_color)
        if new is None or tuple(new) in seen:
            return True
        return _ladder_chase(new, size, target, tgt_color, False, depth - 1,
                             seen | {tuple(new)})
    attacker = BLACK + WHITE - tgt_color
    for mv in sorted(libs, reverse=True):
        new = apply_move_brute(grid, size, mv, attacker)
        if new is None or tuple(new) in seen:
            continue
        if new[target] == EMPTY:
            return True
        if _ladder_chase(new, size, target, tgt_color, True, depth - 1,
                         seen | {tuple(new)}):
            return True
    return False
