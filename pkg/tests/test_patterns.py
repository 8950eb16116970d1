"""Pattern table tests: data file shape, symmetry closure, packing parity."""

import random

import numpy as np

from tengen import fastboard, patterns
from tengen.board import BLACK, WHITE, EMPTY


def rot(off):
    dr, dc = off
    return (dc, -dr)


def refl(off):
    dr, dc = off
    return (dr, -dc)


def permutations_of_offsets():
    """Index permutations of the 8-cell ring under the dihedral group."""
    perms = []
    for use_refl in (False, True):
        cur = list(patterns.OFFSETS)
        if use_refl:
            cur = [refl(o) for o in cur]
        for _ in range(4):
            perms.append(tuple(patterns.OFFSETS.index(o) for o in cur))
            cur = [rot(o) for o in cur]
    return perms


def transform_code(code, perm, swap):
    out = 0
    for i in range(8):
        v = (code >> (2 * i)) & 3
        if swap and v in (1, 2):
            v = 3 - v
        out |= v << (2 * perm[i])
    return out


class TestTableLoad:
    def test_pattern_count(self):
        match, _ = patterns.tables()
        assert int(match.sum()) == 3410

    def test_weights_positive_exactly_on_matches(self):
        match, weight = patterns.tables()
        hits = match == 1
        assert np.all(weight[hits] > 0)
        assert np.all(weight[~hits] == 0)

    def test_tables_read_only_and_cached(self):
        m1, w1 = patterns.tables()
        m2, w2 = patterns.tables()
        assert m1 is m2 and w1 is w2
        assert not m1.flags.writeable and not w1.flags.writeable

    def test_all_empty_ring_is_not_a_pattern(self):
        match, _ = patterns.tables()
        assert match[0] == 0


class TestSymmetryClosure:
    def test_closed_under_dihedral_and_color_swap(self):
        """Every stored pattern stays a pattern under the 8 board symmetries
        and under exchanging the two colors."""
        match, _ = patterns.tables()
        codes = np.nonzero(match)[0]
        for perm in permutations_of_offsets():
            for swap in (False, True):
                for code in codes:
                    assert match[transform_code(int(code), perm, swap)] == 1

    def test_transforms_are_bijections(self):
        perms = permutations_of_offsets()
        assert len(set(perms)) == 8
        rng = random.Random(11)
        for _ in range(50):
            code = rng.randrange(65536)
            for perm in perms:
                back = transform_code(transform_code(code, perm, False),
                                      tuple(np.argsort(perm)), False)
                assert back == code


class TestCodePacking:
    def test_hand_packed_corner(self):
        # 3x3 grid, encode at the NW corner (pt 0): N row and W col are edge
        grid = np.zeros(9, dtype=np.int8)
        grid[1] = BLACK   # E neighbor of pt 0
        grid[3] = WHITE   # S neighbor
        code = patterns.code_at(grid, 3, 0, BLACK)
        # ring order NW N NE W E SW S SE: # # # # B # W .
        expect = 3 | (3 << 2) | (3 << 4) | (3 << 6) | (1 << 8) | (3 << 10) \
            | (2 << 12) | (0 << 14)
        assert code == expect

    def test_mover_relative(self):
        grid = np.zeros(25, dtype=np.int8)
        grid[7] = BLACK
        grid[17] = WHITE
        cb = patterns.code_at(grid, 5, 12, BLACK)
        cw = patterns.code_at(grid, 5, 12, WHITE)
        assert cb != cw
        assert transform_code(cb, tuple(range(8)), True) == cw

    def test_kernel_pattern_code_parity(self):
        rng = random.Random(977)
        for size in (5, 9, 13):
            for _ in range(3):
                grid = np.zeros(size * size, dtype=np.int8)
                for pt in range(size * size):
                    r = rng.random()
                    grid[pt] = BLACK if r < 0.3 else WHITE if r < 0.6 else EMPTY
                fb = fastboard.FastBoard(size)
                empties = [pt for pt in range(size * size) if grid[pt] == EMPTY]
                fastboard.load(fb.S, grid, BLACK, 0, 0, 0, 0, 0)
                for pt in empties:
                    for mover in (BLACK, WHITE):
                        want = patterns.code_at(grid, size, pt, mover)
                        got = int(fastboard.pattern_code(fb.S, fb.pad(pt), mover))
                        assert got == want, (size, pt, mover)
