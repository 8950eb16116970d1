"""Expand the classic 3x3 playout pattern set into src/tengen/data/patterns_3x3.txt.

Source patterns use the traditional compact notation: X = stone of the player
to move, O = opponent stone, . = empty, x = anything but X, o = anything but O,
? = anything, space = board edge.  Expansion covers all 8 dihedral symmetries,
both colorings, and every wildcard assignment; geometrically impossible edge
combinations are dropped.  Output lines are `<8 context chars> <weight>` where
the context runs NW N NE W E SW S SE around an (implicitly empty) center and
uses the alphabet B (mover's stone), W (opponent), . (empty), # (edge).

Deterministic: output is sorted, so re-running reproduces the file exactly.
"""

import pathlib

SOURCES = [
    # (rows, family weight)
    (("XOX", "...", "???"), 1.0),   # hane: enclosing
    (("XO.", "...", "?.?"), 1.0),   # hane: non-cutting
    (("XO?", "X..", "x.?"), 1.0),   # hane: magari
    ((".O.", "X..", "..."), 0.7),   # attachment
    (("XO?", "O.o", "?o?"), 1.2),   # cut1: unprotected cut
    (("XO?", "O.X", "???"), 1.2),   # cut1: peeped cut
    (("?X?", "O.O", "ooo"), 1.1),   # cut2
    (("OX?", "o.O", "???"), 1.0),   # cut: keima
    (("X.?", "O.?", "   "), 1.0),   # side: chase
    (("OX?", "X.O", "   "), 0.9),   # side: block cut
    (("?X?", "x.O", "   "), 0.8),   # side: block connection
    (("?XO", "x.x", "   "), 0.8),   # side: sagari
    (("?OX", "X.O", "   "), 1.0),   # side: cut
]

WILD = {"?": ".XO#", "x": ".O#", "o": ".X#", " ": "#",
        "X": "X", "O": "O", ".": ".", "#": "#"}

# context cell indices (row, col) in NW N NE W E SW S SE order
CONTEXT = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1), (2, 2)]

# the nine possible edge configurations of a 3x3 window on a board
_EDGE_MASKS = []
for cr in ("top", "mid", "bot"):
    for cc in ("left", "mid", "right"):
        mask = frozenset(
            i for i, (r, c) in enumerate(CONTEXT)
            if (cr == "top" and r == 0) or (cr == "bot" and r == 2)
            or (cc == "left" and c == 0) or (cc == "right" and c == 2))
        _EDGE_MASKS.append(mask)
EDGE_MASKS = frozenset(_EDGE_MASKS)


def rot90(rows):
    return (rows[2][0] + rows[1][0] + rows[0][0],
            rows[2][1] + rows[1][1] + rows[0][1],
            rows[2][2] + rows[1][2] + rows[0][2])


def flip(rows):
    return (rows[2], rows[1], rows[0])


def swap_colors(rows):
    tr = str.maketrans("XxOo", "OoXx")
    return tuple(r.translate(tr) for r in rows)


def symmetries(rows):
    out = set()
    for flipped in (rows, flip(rows)):
        p = flipped
        for _ in range(4):
            out.add(p)
            p = rot90(p)
    return out


def expand_wild(ctx):
    outs = [""]
    for ch in ctx:
        outs = [o + t for o in outs for t in WILD[ch]]
    return outs


def main():
    table = {}
    for rows, weight in SOURCES:
        variants = set()
        for colored in (rows, swap_colors(rows)):
            variants |= symmetries(colored)
        for v in variants:
            assert v[1][1] == ".", v
            ctx = "".join(v[r][c] for r, c in CONTEXT)
            for concrete in expand_wild(ctx):
                edge = frozenset(i for i, ch in enumerate(concrete) if ch == "#")
                if edge not in EDGE_MASKS:
                    continue
                mapped = concrete.replace("X", "B").replace("O", "W")
                if table.get(mapped, 0.0) < weight:
                    table[mapped] = weight
    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "tengen" / "data"
    out.mkdir(parents=True, exist_ok=True)
    path = out / "patterns_3x3.txt"
    with open(path, "w") as f:
        f.write("# 3x3 playout patterns: context NW N NE W E SW S SE around an empty center\n")
        f.write("# B = mover's stone, W = opponent stone, . = empty, # = board edge\n")
        for ctx in sorted(table):
            f.write(f"{ctx} {table[ctx]:g}\n")
    print(f"wrote {len(table)} patterns to {path}")


if __name__ == "__main__":
    main()
