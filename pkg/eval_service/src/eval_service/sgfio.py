"""Minimal SGF reading and writing: one game per file, main line only.

Covers what engine-generated records and common archives use: SZ, KM, RE,
PB/PW, BR/WR, AB/AW setup, B/W moves with [] or [tt] for pass.  Variations
beyond the main line are rejected rather than half-supported.
"""

import re

from .goban import BLACK, WHITE, PASS


class SgfError(ValueError):
    pass


class Game:
    def __init__(self, size, komi=7.5, moves=(), setup_black=(),
                 setup_white=(), result="", black_rank="", white_rank=""):
        self.size = size
        self.komi = komi
        self.moves = list(moves)  # (color, flat move) pairs
        self.setup_black = list(setup_black)
        self.setup_white = list(setup_white)
        self.result = result
        self.black_rank = black_rank
        self.white_rank = white_rank


_PROP = re.compile(r"([A-Z]+)((?:\[(?:\\.|[^\]\\])*\])+)")
_VAL = re.compile(r"\[((?:\\.|[^\]\\])*)\]")


def _decode(val, size):
    if val == "" or (val == "tt" and size <= 19):
        return PASS
    if len(val) != 2:
        raise SgfError("bad coordinate %r" % (val,))
    col = ord(val[0]) - ord("a")
    row = ord(val[1]) - ord("a")
    if not (0 <= col < size and 0 <= row < size):
        raise SgfError("coordinate %r off board" % (val,))
    return row * size + col


def _encode(move, size):
    if move == PASS:
        return ""
    return chr(ord("a") + move % size) + chr(ord("a") + move // size)


def parse(text):
    """Game from SGF text; main line only, first game of a collection."""
    text = text.strip()
    if not text.startswith("("):
        raise SgfError("not an SGF game tree")
    # main line: strip nested subtrees after the first node sequence
    depth = 0
    main = []
    for ch in text:
        if ch == "(":
            depth += 1
            if depth > 1:
                break
            continue
        if ch == ")":
            break
        main.append(ch)
    body = "".join(main)

    size = 19
    komi = 7.5
    game = None
    moves = []
    setup_b, setup_w = [], []
    result = black_rank = white_rank = ""
    for name, raw in _PROP.findall(body):
        vals = [m.group(1).replace("\\]", "]") for m in _VAL.finditer(raw)]
        if name == "SZ":
            size = int(vals[0])
        elif name == "KM":
            komi = float(vals[0]) if vals[0] else 7.5
        elif name == "RE":
            result = vals[0]
        elif name == "BR":
            black_rank = vals[0]
        elif name == "WR":
            white_rank = vals[0]
        elif name == "AB":
            setup_b = [_decode(v, size) for v in vals]
        elif name == "AW":
            setup_w = [_decode(v, size) for v in vals]
        elif name in ("B", "W"):
            color = BLACK if name == "B" else WHITE
            moves.append((color, _decode(vals[0], size)))
    game = Game(size, komi, moves, setup_b, setup_w, result,
                black_rank, white_rank)
    return game


def serialize(game):
    parts = ["(;GM[1]FF[4]SZ[%d]KM[%s]" % (game.size, _num(game.komi))]
    if game.black_rank:
        parts.append("BR[%s]" % game.black_rank)
    if game.white_rank:
        parts.append("WR[%s]" % game.white_rank)
    if game.result:
        parts.append("RE[%s]" % game.result)
    if game.setup_black:
        parts.append("AB" + "".join("[%s]" % _encode(p, game.size)
                                    for p in game.setup_black))
    if game.setup_white:
        parts.append("AW" + "".join("[%s]" % _encode(p, game.size)
                                    for p in game.setup_white))
    for color, move in game.moves:
        parts.append(";%s[%s]" % ("B" if color == BLACK else "W",
                                  _encode(move, game.size)))
    parts.append(")")
    return "".join(parts)


def _num(x):
    return "%g" % x


def rank_level(rank):
    """Rank string to the 0..9 conditioning level: kyu and unknown are 0,
    1d..9d are 1..9, professionals are 9."""
    if not rank:
        return 0
    m = re.match(r"\s*(\d+)\s*([kdp])", rank.lower())
    if not m:
        return 0
    n, kind = int(m.group(1)), m.group(2)
    if kind == "k":
        return 0
    if kind == "p":
        return 9
    return max(1, min(9, n))


def load_games(paths):
    """Parse each SGF file; skips unreadable files rather than failing the
    whole corpus."""
    games = []
    for path in paths:
        try:
            games.append(parse(path.read_text()))
        except (OSError, SgfError):
            continue
    return games
