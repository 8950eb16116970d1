"""Go rules kernel: legality, group/liberty maintenance, capture, ko and superko,
incremental position hashing, and Tromp-Taylor scoring.

Points are flat indices ``pt = row * size + col`` with row 0 at the top.  Moves
are plain ints: a point for a placement, or the ``PASS`` / ``RESIGN`` sentinels.
``Position`` is immutable: ``play`` returns a successor and never mutates the
receiver, so positions can be shared freely between search threads.  Group
liberty sets are stored as frozensets and shared structurally between a
position and its successors.
"""

import numpy as np

from . import zobrist

EMPTY, BLACK, WHITE = 0, 1, 2
PASS = -1
RESIGN = -2

COL_LETTERS = "ABCDEFGHJKLMNOPQRST"  # GTP columns, no I


def opponent(color):
    return BLACK + WHITE - color


def is_place(move):
    return move >= 0


class IllegalMove(ValueError):
    """Raised by Position.play; reason is one of occupied/suicide/ko/superko/off_board."""

    def __init__(self, reason, move=None):
        super().__init__(f"illegal move ({reason})" + (f": {move}" if move is not None else ""))
        self.reason = reason
        self.move = move


class ScoreResult:
    """Tromp-Taylor area count. margin = black - white - komi (positive favors black)."""

    __slots__ = ("black_points", "white_points", "neutral_points", "komi", "margin")

    def __init__(self, black_points, white_points, neutral_points, komi):
        self.black_points = black_points
        self.white_points = white_points
        self.neutral_points = neutral_points
        self.komi = komi
        self.margin = black_points - white_points - komi

    @property
    def winner(self):
        if self.margin > 0:
            return BLACK
        if self.margin < 0:
            return WHITE
        return EMPTY

    def __repr__(self):
        return (f"ScoreResult(black={self.black_points}, white={self.white_points}, "
                f"neutral={self.neutral_points}, komi={self.komi}, margin={self.margin})")


def point(col, row, size):
    return row * size + col


def point_coords(pt, size):
    return pt % size, pt // size  # (col, row)


def gtp_vertex(move, size):
    if move == PASS:
        return "pass"
    if move == RESIGN:
        return "resign"
    col, row = point_coords(move, size)
    return f"{COL_LETTERS[col]}{size - row}"


def parse_gtp_vertex(text, size):
    t = text.strip().upper()
    if t == "PASS":
        return PASS
    if t == "RESIGN":
        return RESIGN
    col = COL_LETTERS.find(t[0])
    if col < 0 or col >= size:
        raise ValueError(f"bad vertex {text!r}")
    row = size - int(t[1:])
    if not 0 <= row < size:
        raise ValueError(f"bad vertex {text!r}")
    return point(col, row, size)


class Position:
    """One game state. Construct the root with Position.empty(size), then use play()."""

    __slots__ = (
        "size", "grid", "to_move", "ko_point", "move_number", "age",
        "group_id", "_libs", "_stones", "grid_hash", "hash_history",
        "last_move", "prev_move", "pass_streak",
    )

    @staticmethod
    def empty(size=19):
        pos = Position()
        pos.size = size
        pos.grid = np.zeros(size * size, dtype=np.int8)
        pos.to_move = BLACK
        pos.ko_point = None
        pos.move_number = 0
        pos.age = np.full(size * size, -1, dtype=np.int32)
        pos.group_id = np.full(size * size, -1, dtype=np.int32)
        pos._libs = {}
        pos._stones = {}
        pos.grid_hash = 0
        pos.hash_history = frozenset([0])
        pos.last_move = None
        pos.prev_move = None
        pos.pass_streak = 0
        return pos

    @staticmethod
    def from_setup(size, black_stones=(), white_stones=(), to_move=BLACK):
        """Position with pre-placed stones (handicap / AB+AW records), no move history.

        Setup stones are stamped at move 0, so history-decay features treat them
        as maximally old.  Every setup group must have at least one liberty.
        """
        pos = Position.empty(size)
        grid = pos.grid
        for pt in black_stones:
            grid[pt] = BLACK
        for pt in white_stones:
            if grid[pt] != EMPTY:
                raise ValueError(f"setup stone collision at {pt}")
            grid[pt] = WHITE
        if len(set(black_stones)) != len(black_stones):
            raise ValueError("duplicate setup stone")
        keys, _ = zobrist.tables(size)
        h = 0
        for pt in range(size * size):
            if grid[pt] != EMPTY:
                pos.age[pt] = 0
                h ^= int(keys[grid[pt] - 1, pt])
        # group structure by flood fill (setup is not a hot path)
        seen = set()
        for pt in range(size * size):
            if grid[pt] == EMPTY or pt in seen:
                continue
            color = grid[pt]
            stack, stones, libs = [pt], set(), set()
            seen.add(pt)
            while stack:
                p = stack.pop()
                stones.add(p)
                for nb in pos._neighbors(p):
                    if grid[nb] == color and nb not in seen:
                        seen.add(nb)
                        stack.append(nb)
                    elif grid[nb] == EMPTY:
                        libs.add(nb)
            if not libs:
                raise ValueError("setup group without liberties")
            head = min(stones)
            pos._stones[head] = frozenset(stones)
            pos._libs[head] = frozenset(libs)
            for p in stones:
                pos.group_id[p] = head
        pos.grid_hash = h
        pos.hash_history = frozenset([h])
        pos.to_move = to_move
        return pos

    # -- inspection ---------------------------------------------------------

    def _neighbors(self, pt):
        size = self.size
        r, c = divmod(pt, size)
        if r > 0:
            yield pt - size
        if r < size - 1:
            yield pt + size
        if c > 0:
            yield pt - 1
        if c < size - 1:
            yield pt + 1

    def stone_at(self, pt):
        return int(self.grid[pt])

    def group_liberties(self, pt):
        """Liberty set of the group containing the stone at pt."""
        return self._libs[int(self.group_id[pt])]

    def group_stones(self, pt):
        return self._stones[int(self.group_id[pt])]

    def liberty_count(self, pt):
        return len(self._libs[int(self.group_id[pt])])

    @property
    def position_hash(self):
        """Hash of (grid, to_move). The superko history tracks grid_hash alone."""
        _, turn = zobrist.tables(self.size)
        return self.grid_hash ^ int(turn[self.to_move - 1])

    def game_over(self):
        return self.pass_streak >= 2

    # -- legality -----------------------------------------------------------

    def _captures_for(self, pt, color):
        """Opponent group heads that would die if color plays at pt."""
        opp = opponent(color)
        heads = []
        for nb in self._neighbors(pt):
            if self.grid[nb] == opp:
                head = int(self.group_id[nb])
                if head not in heads and self._libs[head] == frozenset((pt,)):
                    heads.append(head)
        return heads

    def _classify(self, pt):
        """Returns (reason or None, captured heads). reason precedence:
        off_board/occupied, then ko, then suicide, then superko."""
        if not 0 <= pt < self.size * self.size:
            return "off_board", ()
        if self.grid[pt] != EMPTY:
            return "occupied", ()
        if pt == self.ko_point:
            return "ko", ()
        color = self.to_move
        captured = self._captures_for(pt, color)
        if not captured:
            # suicide unless an empty neighbor or a friendly group with a spare liberty
            alive = False
            for nb in self._neighbors(pt):
                if self.grid[nb] == EMPTY:
                    alive = True
                    break
                if self.grid[nb] == color and len(self._libs[int(self.group_id[nb])]) > 1:
                    alive = True
                    break
            if not alive:
                return "suicide", ()
        keys, _ = zobrist.tables(self.size)
        h = self.grid_hash ^ int(keys[color - 1, pt])
        for head in captured:
            opp_row = keys[opponent(color) - 1]
            for s in self._stones[head]:
                h ^= int(opp_row[s])
        if h in self.hash_history:
            return "superko", captured
        return None, captured

    def is_legal(self, move):
        if move == PASS:
            return True
        if move == RESIGN:
            return False
        reason, _ = self._classify(move)
        return reason is None

    def legal_moves(self):
        """All legal placements plus PASS."""
        moves = [pt for pt in range(self.size * self.size)
                 if self.grid[pt] == EMPTY and self.is_legal(pt)]
        moves.append(PASS)
        return moves

    # -- play ---------------------------------------------------------------

    def _successor_shell(self):
        nxt = Position()
        nxt.size = self.size
        nxt.to_move = opponent(self.to_move)
        nxt.move_number = self.move_number + 1
        nxt.prev_move = self.last_move
        return nxt

    def play(self, move):
        """Successor position after move; raises IllegalMove otherwise."""
        if move == PASS:
            nxt = self._successor_shell()
            nxt.grid = self.grid
            nxt.age = self.age
            nxt.group_id = self.group_id
            nxt._libs = self._libs
            nxt._stones = self._stones
            nxt.ko_point = None
            nxt.grid_hash = self.grid_hash
            nxt.hash_history = self.hash_history
            nxt.last_move = PASS
            nxt.pass_streak = self.pass_streak + 1
            return nxt
        reason, captured = self._classify(move)
        if reason is not None:
            raise IllegalMove(reason, move)

        pt = move
        color = self.to_move
        opp = opponent(color)
        keys, _ = zobrist.tables(self.size)

        grid = self.grid.copy()
        age = self.age.copy()
        group_id = self.group_id.copy()
        libs = dict(self._libs)
        stones = dict(self._stones)
        h = self.grid_hash ^ int(keys[color - 1, pt])

        # remove captured opponent groups; freed points become liberties of
        # adjacent own-color groups (same-color neighbors of a captured stone
        # are always part of the same captured group, so only ours gain)
        captured_points = []
        for head in captured:
            opp_row = keys[opp - 1]
            for s in stones[head]:
                grid[s] = EMPTY
                age[s] = -1
                group_id[s] = -1
                h ^= int(opp_row[s])
                captured_points.append(s)
            del libs[head], stones[head]
        for s in captured_points:
            for nb in self._neighbors(s):
                if grid[nb] == color:
                    head = int(group_id[nb])
                    libs[head] = libs[head] | {s}

        # the new stone steals a liberty from surviving opponent neighbors
        for nb in self._neighbors(pt):
            if grid[nb] == opp:
                head = int(group_id[nb])
                libs[head] = libs[head] - {pt}

        # merge own neighboring groups with the new stone
        own_heads = []
        merged_libs = set()
        for nb in self._neighbors(pt):
            if grid[nb] == EMPTY:
                merged_libs.add(nb)
            elif grid[nb] == color:
                head = int(group_id[nb])
                if head not in own_heads:
                    own_heads.append(head)
                    merged_libs |= libs[head]
        merged_libs.discard(pt)
        merged_stones = [pt]
        for head in own_heads:
            merged_stones.extend(stones[head])
            del libs[head], stones[head]
        new_head = min(merged_stones)
        for s in merged_stones:
            group_id[s] = new_head
        libs[new_head] = frozenset(merged_libs)
        stones[new_head] = frozenset(merged_stones)

        grid[pt] = color
        age[pt] = self.move_number + 1

        nxt = self._successor_shell()
        nxt.grid = grid
        nxt.age = age
        nxt.group_id = group_id
        nxt._libs = libs
        nxt._stones = stones
        nxt.grid_hash = h
        nxt.hash_history = self.hash_history | {h}
        nxt.last_move = pt
        nxt.pass_streak = 0
        # simple ko: single stone captured by a lone new stone left in atari
        if (len(captured_points) == 1 and len(merged_stones) == 1
                and len(merged_libs) == 1):
            nxt.ko_point = captured_points[0]
        else:
            nxt.ko_point = None
        return nxt

    # -- scoring ------------------------------------------------------------

    def tromp_taylor_score(self, komi=7.5):
        """Stones plus empty regions reaching exactly one color; others are neutral."""
        size = self.size
        grid = self.grid
        black = int(np.count_nonzero(grid == BLACK))
        white = int(np.count_nonzero(grid == WHITE))
        neutral = 0
        seen = np.zeros(size * size, dtype=bool)
        for pt in range(size * size):
            if grid[pt] != EMPTY or seen[pt]:
                continue
            region = [pt]
            seen[pt] = True
            reach = 0
            i = 0
            while i < len(region):
                cur = region[i]
                i += 1
                for nb in self._neighbors(cur):
                    v = grid[nb]
                    if v == EMPTY:
                        if not seen[nb]:
                            seen[nb] = True
                            region.append(nb)
                    else:
                        reach |= 1 << v
            if reach == 1 << BLACK:
                black += len(region)
            elif reach == 1 << WHITE:
                white += len(region)
            else:
                neutral += len(region)
        return ScoreResult(black, white, neutral, komi)

    # -- debugging ----------------------------------------------------------

    def __str__(self):
        rows = []
        chars = {EMPTY: ".", BLACK: "X", WHITE: "O"}
        for r in range(self.size):
            rows.append(" ".join(chars[int(self.grid[r * self.size + c])]
                                 for c in range(self.size)))
        return "\n".join(rows)


def recompute_hash(pos):
    """From-scratch grid hash, for audits against the incremental one."""
    keys, _ = zobrist.tables(pos.size)
    h = 0
    for pt in range(pos.size * pos.size):
        v = int(pos.grid[pt])
        if v != EMPTY:
            h ^= int(keys[v - 1, pt])
    return h
