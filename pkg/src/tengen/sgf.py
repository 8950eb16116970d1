"""Minimal SGF reader/writer: main line only, FF[4] subset.

Understood properties: B W AB AW SZ KM HA RE BR WR PB PW.  Everything else is
parsed and dropped.  Variations are skipped; only the first child at each fork
is followed.  Both ``[]`` and ``[tt]`` (for sizes up to 19) are accepted as a
pass; serialization always emits ``[]``.
"""

from dataclasses import dataclass, field

from .board import BLACK, WHITE, PASS, Position, IllegalMove


class ParseError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class IllegalMoveInRecord(ValueError):
    def __init__(self, message, move_index):
        super().__init__(f"{message} (move {move_index})")
        self.move_index = move_index


@dataclass(frozen=True)
class GameRecord:
    board_size: int = 19
    komi: float = 7.5
    handicap: int = 0
    setup_black: tuple = ()
    setup_white: tuple = ()
    moves: tuple = ()  # ((color, move), ...) in game order
    result: str = ""
    black_rank: str = ""
    white_rank: str = ""
    black_player: str = ""
    white_player: str = ""


# -- parsing ---------------------------------------------------------------


def _parse_nodes(text):
    """Tokenize the main line: list of nodes, node = list of (prop, value, offset)."""
    i, n = 0, len(text)

    def skip_ws(i):
        while i < n and text[i].isspace():
            i += 1
        return i

    i = skip_ws(i)
    if i >= n or text[i] != "(":
        raise ParseError("expected '('", i)

    nodes = []
    depth_done = False  # set once we leave the main line
    stack = 0
    i += 1
    while i < n:
        i = skip_ws(i)
        if i >= n:
            break
        ch = text[i]
        if ch == ";":
            if not depth_done:
                nodes.append([])
            i += 1
        elif ch == "(":
            # first fork: descend (still main line); later siblings get skipped
            if depth_done:
                i = _skip_subtree(text, i)
            else:
                stack += 1
                i += 1
        elif ch == ")":
            if stack == 0:
                return nodes, i + 1
            stack -= 1
            depth_done = True  # anything after a close is a sibling variation
            i += 1
        elif ch.isalpha() and ch.isupper():
            prop_start = i
            while i < n and text[i].isalpha():
                i += 1
            prop = text[prop_start:i]
            i = skip_ws(i)
            if i >= n or text[i] != "[":
                raise ParseError(f"property {prop} without value", prop_start)
            got_value = False
            while i < n and text[i] == "[":
                val_start = i + 1
                val, i = _read_value(text, i)
                if not depth_done:
                    if not nodes:
                        raise ParseError("property before first node", prop_start)
                    nodes[-1].append((prop, val, val_start))
                got_value = True
                i = skip_ws(i)
            if not got_value:
                raise ParseError(f"property {prop} without value", prop_start)
        else:
            raise ParseError(f"unexpected character {ch!r}", i)
    raise ParseError("unterminated game tree", n)


def _read_value(text, i):
    # i at '['; returns (unescaped value, index after ']')
    assert text[i] == "["
    i += 1
    out = []
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\":
            if i + 1 < n:
                nxt = text[i + 1]
                if nxt != "\n":  # soft line break: backslash-newline vanishes
                    out.append(nxt)
                i += 2
            else:
                raise ParseError("dangling escape", i)
        elif ch == "]":
            return "".join(out), i + 1
        else:
            out.append(ch)
            i += 1
    raise ParseError("unterminated property value", i)


def _skip_subtree(text, i):
    # i at '('; skip the whole subtree, honoring bracket values and escapes
    depth = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "[":
            _, i = _read_value(text, i)
        elif ch == "(":
            depth += 1
            i += 1
        elif ch == ")":
            depth -= 1
            i += 1
            if depth == 0:
                return i
        else:
            i += 1
    raise ParseError("unterminated variation", i)


def _decode_point(val, size, offset):
    if val == "" or (val == "tt" and size <= 19):
        return PASS
    if len(val) != 2:
        raise ParseError(f"bad coordinate {val!r}", offset)
    col = ord(val[0]) - ord("a")
    row = ord(val[1]) - ord("a")
    if not (0 <= col < size and 0 <= row < size):
        raise ParseError(f"coordinate {val!r} outside board", offset)
    return row * size + col


def parse(text):
    """Parse one SGF game into a GameRecord.  Raises ParseError with a byte offset."""
    nodes, _ = _parse_nodes(text)
    if not nodes:
        raise ParseError("no nodes", 0)

    size = 19
    komi = 7.5
    handicap = 0
    setup_b, setup_w = [], []
    result = black_rank = white_rank = black_player = white_player = ""
    moves = []

    root = nodes[0]
    for prop, val, off in root:
        if prop == "SZ":
            try:
                size = int(val)
            except ValueError:
                raise ParseError(f"bad SZ {val!r}", off) from None
            if not 2 <= size <= 19:
                raise ParseError(f"unsupported board size {size}", off)
    for prop, val, off in root:
        if prop == "KM":
            try:
                komi = float(val)
            except ValueError:
                raise ParseError(f"bad KM {val!r}", off) from None
        elif prop == "HA":
            handicap = int(val) if val.strip() else 0
        elif prop == "AB":
            setup_b.append(_decode_point(val, size, off))
        elif prop == "AW":
            setup_w.append(_decode_point(val, size, off))
        elif prop == "RE":
            result = val
        elif prop == "BR":
            black_rank = val
        elif prop == "WR":
            white_rank = val
        elif prop == "PB":
            black_player = val
        elif prop == "PW":
            white_player = val

    for node in nodes:
        for prop, val, off in node:
            if prop == "B":
                moves.append((BLACK, _decode_point(val, size, off)))
            elif prop == "W":
                moves.append((WHITE, _decode_point(val, size, off)))
            elif prop in ("AB", "AW") and node is not root:
                raise ParseError("setup stones outside root node", off)

    return GameRecord(
        board_size=size, komi=komi, handicap=handicap,
        setup_black=tuple(sorted(setup_b)), setup_white=tuple(sorted(setup_w)),
        moves=tuple(moves), result=result,
        black_rank=black_rank, white_rank=white_rank,
        black_player=black_player, white_player=white_player,
    )


# -- serialization ---------------------------------------------------------


def _encode_point(move, size):
    if move == PASS:
        return ""
    row, col = divmod(move, size)
    return chr(ord("a") + col) + chr(ord("a") + row)


def _escape(val):
    return val.replace("\\", "\\\\").replace("]", "\\]")


def _fmt_num(x):
    return f"{x:g}"


def serialize(record):
    """Write a GameRecord as a single-line SGF game tree."""
    size = record.board_size
    parts = [f"(;GM[1]FF[4]SZ[{size}]KM[{_fmt_num(record.komi)}]"]
    if record.handicap:
        parts.append(f"HA[{record.handicap}]")
    for name, prop in ((record.black_player, "PB"), (record.white_player, "PW"),
                       (record.black_rank, "BR"), (record.white_rank, "WR"),
                       (record.result, "RE")):
        if name:
            parts.append(f"{prop}[{_escape(name)}]")
    if record.setup_black:
        parts.append("AB" + "".join(f"[{_encode_point(p, size)}]" for p in record.setup_black))
    if record.setup_white:
        parts.append("AW" + "".join(f"[{_encode_point(p, size)}]" for p in record.setup_white))
    for color, move in record.moves:
        tag = "B" if color == BLACK else "W"
        parts.append(f";{tag}[{_encode_point(move, size)}]")
    parts.append(")")
    return "".join(parts)


# -- replay ----------------------------------------------------------------


def initial_position(record):
    to_move = BLACK
    if record.moves:
        to_move = record.moves[0][0]
    elif record.setup_black and not record.setup_white:
        to_move = WHITE
    return Position.from_setup(record.board_size, record.setup_black,
                               record.setup_white, to_move)


def replay(record):
    """All positions along the record: [initial, after move 1, ...].

    Raises IllegalMoveInRecord if a move is out of turn or illegal under the
    rules kernel (positional superko).
    """
    pos = initial_position(record)
    out = [pos]
    for idx, (color, move) in enumerate(record.moves):
        if color != pos.to_move:
            raise IllegalMoveInRecord("move out of turn", idx)
        try:
            pos = pos.play(move)
        except IllegalMove as err:
            raise IllegalMoveInRecord(f"illegal move: {err.reason}", idx) from err
        out.append(pos)
    return out


def from_game(size, moves, komi=7.5, result="", black_rank="", white_rank=""):
    """Record from a plain move list (game started from an empty board)."""
    colored = tuple((BLACK if i % 2 == 0 else WHITE, mv) for i, mv in enumerate(moves))
    return GameRecord(board_size=size, komi=komi, moves=colored, result=result,
                      black_rank=black_rank, white_rank=white_rank)
