"""Rules kernel tests: hand cases plus flood-fill/replay oracles over random games."""

import random

import numpy as np
import pytest

from tengen import board as B
from tengen.board import BLACK, WHITE, EMPTY, PASS, Position, IllegalMove

from oracles import ReplayOracle, flood_groups, score_by_reach


def play_seq(pos, moves):
    for mv in moves:
        pos = pos.play(mv)
    return pos


def pt(col, row, size=19):
    return B.point(col, row, size)


def random_game(size, seed, max_moves=None, check_every=None, checker=None):
    """Random legal self-play (oracle-driven choice), returning the final Position."""
    rng = random.Random(seed)
    oracle = ReplayOracle(size)
    pos = Position.empty(size)
    cap = max_moves if max_moves is not None else 3 * size * size
    for n in range(cap):
        legal = oracle.legal_points()
        if not legal:
            break
        mv = rng.choice(legal)
        oracle.play(mv)
        pos = pos.play(mv)
        if checker and check_every and (n + 1) % check_every == 0:
            checker(pos, oracle)
    return pos


def assert_matches_oracle(pos, oracle=None):
    if oracle is not None:
        assert list(pos.grid) == oracle.grid
    groups = flood_groups(pos.grid, pos.size)
    seen_heads = set()
    for color, stones, libs in groups:
        head = int(pos.group_id[next(iter(stones))])
        seen_heads.add(head)
        assert pos._stones[head] == stones
        assert pos._libs[head] == libs
        assert len(libs) > 0  # capture soundness
        for s in stones:
            assert int(pos.group_id[s]) == head
            assert int(pos.grid[s]) == color
    assert seen_heads == set(pos._libs) == set(pos._stones)
    assert B.recompute_hash(pos) == pos.grid_hash


class TestBasics:
    def test_empty_board_legal_moves(self):
        pos = Position.empty(19)
        moves = pos.legal_moves()
        assert len(moves) == 362
        assert PASS in moves

    def test_single_capture(self):
        # black surrounds a lone white stone
        pos = Position.empty(9)
        w = pt(4, 4, 9)
        seq = [pt(4, 3, 9), w, pt(3, 4, 9), pt(0, 0, 9), pt(5, 4, 9), pt(0, 1, 9),
               pt(4, 5, 9)]
        pos = play_seq(pos, seq)
        assert pos.stone_at(w) == EMPTY
        assert pos.stone_at(pt(4, 3, 9)) == BLACK

    def test_multi_stone_capture_group_removed(self):
        pos = Position.empty(9)
        # white two-stone group at (4,4),(5,4); black takes all outside liberties
        seq = [pt(4, 3, 9), pt(4, 4, 9), pt(5, 3, 9), pt(5, 4, 9),
               pt(3, 4, 9), pt(0, 0, 9), pt(6, 4, 9), pt(0, 1, 9),
               pt(4, 5, 9), pt(0, 2, 9), pt(5, 5, 9)]
        pos = play_seq(pos, seq)
        assert pos.stone_at(pt(4, 4, 9)) == EMPTY
        assert pos.stone_at(pt(5, 4, 9)) == EMPTY

    def test_suicide_illegal(self):
        pos = Position.empty(9)
        # black ring around (4,4); white to move cannot play inside
        seq = [pt(4, 3, 9), PASS, pt(3, 4, 9), PASS, pt(5, 4, 9), PASS, pt(4, 5, 9), PASS]
        pos = play_seq(pos, seq)
        assert pos.to_move == BLACK
        pos = pos.play(PASS)
        with pytest.raises(IllegalMove) as err:
            pos.play(pt(4, 4, 9))
        assert err.value.reason == "suicide"

    def test_filling_own_eye_is_legal(self):
        pos = Position.empty(9)
        seq = [pt(4, 3, 9), PASS, pt(3, 4, 9), PASS, pt(5, 4, 9), PASS, pt(4, 5, 9), PASS]
        pos = play_seq(pos, seq)
        assert pos.is_legal(pt(4, 4, 9))  # black filling its own eye: legal, just bad

    def test_zero_liberty_placement_capturing_nothing_illegal(self):
        # brute-force cross-check of the suicide rule on random boards
        rng = random.Random(7)
        for seed in range(5):
            oracle = ReplayOracle(7 if False else 9)
            pos = Position.empty(9)
            for _ in range(40):
                legal = oracle.legal_points()
                if not legal:
                    break
                mv = rng.choice(legal)
                oracle.play(mv)
                pos = pos.play(mv)
            for cand in range(81):
                assert pos.is_legal(cand) == oracle.is_legal(cand), cand


class TestKo:
    def build_ko(self):
        # classic ko shape around (4,4)/(5,4) on 9x9
        pos = Position.empty(9)
        seq = [pt(4, 3, 9), pt(5, 3, 9),
               pt(3, 4, 9), pt(6, 4, 9),
               pt(4, 5, 9), pt(5, 5, 9),
               pt(5, 4, 9), pt(4, 4, 9)]
        # white's last move at (4,4) captured black (5,4)? no: black played (5,4),
        # white (4,4) has liberties... recheck below in test.
        return play_seq(pos, seq)

    def test_simple_ko_forbidden_then_allowed(self):
        pos = Position.empty(9)
        seq = [pt(4, 3, 9), pt(4, 2, 9),
               pt(3, 4, 9), pt(3, 3, 9),
               pt(4, 5, 9), pt(5, 3, 9),
               pt(5, 4, 9), pt(4, 4, 9)]
        pos = play_seq(pos, seq)
        # white at (4,4) captured the black stone at (4,3): single-stone ko
        assert pos.stone_at(pt(4, 3, 9)) == EMPTY
        assert pos.ko_point == pt(4, 3, 9)
        assert not pos.is_legal(pt(4, 3, 9))
        reason, _ = pos._classify(pt(4, 3, 9))
        assert reason == "ko"
        # after a black play elsewhere and a white reply, retaking is legal
        pos = pos.play(pt(0, 0, 9)).play(pt(8, 8, 9))
        assert pos.is_legal(pt(4, 3, 9))
        pos = pos.play(pt(4, 3, 9))
        assert pos.stone_at(pt(4, 4, 9)) == EMPTY

    def test_immediate_recapture_blocked_by_superko_too(self):
        pos = Position.empty(9)
        seq = [pt(4, 3, 9), pt(4, 2, 9),
               pt(3, 4, 9), pt(3, 3, 9),
               pt(4, 5, 9), pt(5, 3, 9),
               pt(5, 4, 9), pt(4, 4, 9)]
        pos = play_seq(pos, seq)
        oracle = ReplayOracle(9)
        for mv in seq:
            oracle.play(mv)
        assert not oracle.is_legal(pt(4, 3, 9))

    def test_ko_point_is_empty_when_set(self):
        pos = self_play_positions(9, seed=3, count=60)
        for p in pos:
            if p.ko_point is not None:
                assert p.stone_at(p.ko_point) == EMPTY


def self_play_positions(size, seed, count):
    rng = random.Random(seed)
    oracle = ReplayOracle(size)
    pos = Position.empty(size)
    out = []
    for _ in range(count):
        legal = oracle.legal_points()
        if not legal:
            break
        mv = rng.choice(legal)
        oracle.play(mv)
        pos = pos.play(mv)
        out.append(pos)
    return out


class TestOracleSuite:
    @pytest.mark.parametrize("size,seed", [(9, 1), (9, 2), (13, 3), (19, 4)])
    def test_incremental_state_matches_flood_fill(self, size, seed):
        random_game(size, seed, max_moves=120, check_every=10,
                    checker=lambda pos, oracle: assert_matches_oracle(pos, oracle))

    def test_legal_move_sets_match_oracle(self):
        rng = random.Random(11)
        oracle = ReplayOracle(9)
        pos = Position.empty(9)
        for n in range(100):
            legal = oracle.legal_points()
            if not legal:
                break
            ours = set(pos.legal_moves()) - {PASS}
            assert ours == set(legal)
            mv = rng.choice(legal)
            oracle.play(mv)
            pos = pos.play(mv)

    def test_superko_never_revisits(self):
        for seed in (21, 22):
            seen = set()
            posns = self_play_positions(9, seed, 150)
            for p in posns:
                assert p.grid_hash not in seen
                seen.add(p.grid_hash)


class TestScoring:
    def test_empty_board(self):
        s = Position.empty(19).tromp_taylor_score(7.5)
        assert (s.black_points, s.white_points) == (0, 0)
        assert s.margin == -7.5
        assert s.neutral_points == 361

    def test_single_black_stone(self):
        pos = Position.empty(19).play(pt(3, 3))
        s = pos.tromp_taylor_score(7.5)
        assert (s.black_points, s.white_points) == (361, 0)
        assert s.margin == 353.5

    def test_matches_reach_oracle_on_random_finals(self):
        for seed in range(8):
            posns = self_play_positions(9, seed + 40, 90)
            p = posns[-1]
            s = p.tromp_taylor_score(7.5)
            b, w, n = score_by_reach(list(p.grid), 9)
            assert (s.black_points, s.white_points, s.neutral_points) == (b, w, n)
            assert b + w + n == 81

    def test_color_symmetry(self):
        posns = self_play_positions(9, 77, 70)
        p = posns[-1]
        swapped = Position.empty(9)
        moves_black = [i for i in range(81) if p.grid[i] == BLACK]
        moves_white = [i for i in range(81) if p.grid[i] == WHITE]
        # rebuild with colors exchanged via direct grid surgery on a fresh position
        grid = np.zeros(81, dtype=np.int8)
        grid[moves_black] = WHITE
        grid[moves_white] = BLACK
        b1, w1, n1 = score_by_reach(list(p.grid), 9)
        b2, w2, n2 = score_by_reach(list(grid), 9)
        assert (b1, w1) == (w2, b2) and n1 == n2


class TestHash:
    def test_order_independence(self):
        a = play_seq(Position.empty(9), [pt(2, 2, 9), pt(6, 6, 9), pt(3, 3, 9)])
        b = play_seq(Position.empty(9), [pt(3, 3, 9), pt(6, 6, 9), pt(2, 2, 9)])
        assert a.grid_hash == b.grid_hash
        assert a.position_hash == b.position_hash

    def test_to_move_matters(self):
        a = Position.empty(9)
        b = Position.empty(9).play(PASS)
        assert a.grid_hash == b.grid_hash
        assert a.position_hash != b.position_hash

    def test_no_collisions_on_random_grids(self):
        # sparse random stone sets; distinct sets should hash distinctly
        from tengen import zobrist
        keys, _ = zobrist.tables(19)
        rng = np.random.default_rng(5)
        n = 200_000
        pts = rng.integers(0, 361, size=(n, 12))
        colors = rng.integers(0, 2, size=(n, 12))
        h = np.bitwise_xor.reduce(keys[colors, pts], axis=1)
        uniq = len(np.unique(h))
        # same multiset of (pt,color) twice is a legitimate duplicate but vanishingly rare
        assert uniq > n - 5

    def test_tables_stable_across_calls(self):
        from tengen import zobrist
        k1, t1 = zobrist.tables(19)
        k2, t2 = zobrist.tables(19)
        assert k1 is k2
        assert int(k1[0, 0]) == int(k2[0, 0])
        assert t1[0] != t1[1]
