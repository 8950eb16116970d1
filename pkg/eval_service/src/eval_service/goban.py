"""Plain mutable Go board for corpus replay and match refereeing.

Rules: suicide illegal, simple ko point, positional superko over the whole
game, Tromp-Taylor area scoring.  Everything is flood-fill over a flat list;
this is a referee and feature source, not a search board, so clarity wins
over speed.  Move encoding matches the engine wire protocol: a move is
row * size + col, pass is -1.
"""

EMPTY, BLACK, WHITE = 0, 1, 2
PASS = -1


def opponent(color):
    return BLACK + WHITE - color


def neighbors(pt, size):
    col, row = pt % size, pt // size
    out = []
    if col > 0:
        out.append(pt - 1)
    if col + 1 < size:
        out.append(pt + 1)
    if row > 0:
        out.append(pt - size)
    if row + 1 < size:
        out.append(pt + size)
    return out


def group_at(grid, size, pt):
    """(stones, liberties) of the group containing pt, as sets."""
    color = grid[pt]
    stones = {pt}
    libs = set()
    frontier = [pt]
    while frontier:
        cur = frontier.pop()
        for nb in neighbors(cur, size):
            v = grid[nb]
            if v == EMPTY:
                libs.add(nb)
            elif v == color and nb not in stones:
                stones.add(nb)
                frontier.append(nb)
    return stones, libs


class IllegalMove(ValueError):
    def __init__(self, reason, move=None):
        super().__init__(reason)
        self.reason = reason
        self.move = move


class Goban:
    """Mutable position; play() either applies the move or raises and
    leaves the board untouched."""

    def __init__(self, size):
        if not 2 <= size <= 25:
            raise ValueError("size out of range")
        self.size = size
        self.grid = [EMPTY] * (size * size)
        self.to_move = BLACK
        self.ko_point = None
        self.move_number = 0
        # ply the current stone appeared on; -1 for empty cells
        self.age = [-1] * (size * size)
        self.pass_streak = 0
        self.last_move = None
        self._seen = {tuple(self.grid)}

    def copy(self):
        g = Goban.__new__(Goban)
        g.size = self.size
        g.grid = list(self.grid)
        g.to_move = self.to_move
        g.ko_point = self.ko_point
        g.move_number = self.move_number
        g.age = list(self.age)
        g.pass_streak = self.pass_streak
        g.last_move = self.last_move
        g._seen = set(self._seen)
        return g

    # -- rules ------------------------------------------------------------

    def _try_place(self, pt, color):
        """Resulting grid and captured points if color plays pt, or an
        illegality reason.  Does not mutate."""
        if self.grid[pt] != EMPTY:
            return None, None, "occupied"
        if pt == self.ko_point:
            return None, None, "ko"
        grid = list(self.grid)
        grid[pt] = color
        opp = opponent(color)
        captured = []
        for nb in neighbors(pt, self.size):
            if grid[nb] == opp:
                stones, libs = group_at(grid, self.size, nb)
                if not libs:
                    for s in stones:
                        grid[s] = EMPTY
                    captured.extend(stones)
        stones, libs = group_at(grid, self.size, pt)
        if not libs:
            return None, None, "suicide"
        if tuple(grid) in self._seen:
            return None, None, "superko"
        return grid, captured, None

    def is_legal(self, move):
        if move == PASS:
            return True
        if not 0 <= move < self.size * self.size:
            return False
        _, _, reason = self._try_place(move, self.to_move)
        return reason is None

    def legal_moves(self):
        """All legal moves for the side to move, pass included."""
        out = [m for m in range(self.size * self.size) if self.is_legal(m)]
        out.append(PASS)
        return out

    def play(self, move):
        if move == PASS:
            self.to_move = opponent(self.to_move)
            self.move_number += 1
            self.ko_point = None
            self.pass_streak += 1
            self.last_move = PASS
            return
        if not 0 <= move < self.size * self.size:
            raise IllegalMove("off board", move)
        grid, captured, reason = self._try_place(move, self.to_move)
        if reason is not None:
            raise IllegalMove(reason, move)
        self.move_number += 1
        for s in captured:
            self.age[s] = -1
        self.age[move] = self.move_number
        own_stones, own_libs = group_at(grid, self.size, move)
        if len(captured) == 1 and len(own_stones) == 1 and len(own_libs) == 1:
            self.ko_point = captured[0]
        else:
            self.ko_point = None
        self.grid = grid
        self._seen.add(tuple(grid))
        self.to_move = opponent(self.to_move)
        self.pass_streak = 0
        self.last_move = move

    # -- scoring ----------------------------------------------------------

    def area_score(self, komi=7.5):
        """(black, white, margin): stones plus empty regions touching only
        one color; margin = black - white - komi."""
        size = self.size
        grid = self.grid
        black = sum(1 for v in grid if v == BLACK)
        white = sum(1 for v in grid if v == WHITE)
        seen = [False] * (size * size)
        for pt in range(size * size):
            if grid[pt] != EMPTY or seen[pt]:
                continue
            region = [pt]
            seen[pt] = True
            reach = 0
            i = 0
            while i < len(region):
                for nb in neighbors(region[i], size):
                    if grid[nb] == EMPTY:
                        if not seen[nb]:
                            seen[nb] = True
                            region.append(nb)
                    else:
                        reach |= 1 << grid[nb]
                i += 1
            if reach == 1 << BLACK:
                black += len(region)
            elif reach == 1 << WHITE:
                white += len(region)
        return black, white, black - white - komi
