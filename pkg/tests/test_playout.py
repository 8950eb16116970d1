"""Playout policy tests.

The pure-python cascade in playout.py is the readable authority; the compiled
kernel must produce identical rule choices and candidate sets, so the central
test here walks real and random game positions comparing the two move for
move.  The rest covers the documented playout behaviors: uniformity of the
fallback rule, never filling true eyes, termination, scoring examples, and
the dead-stone trial estimator.
"""

import random

import numpy as np
import scipy.stats

from tengen import fastboard, playout, sgf
from tengen.board import BLACK, WHITE, EMPTY, PASS, Position, point
from conftest import corpus_paths


def kernel_cascade(pos, opts=fastboard.OPT_ALL):
    fb = fastboard.FastBoard(pos.size)
    fb.load_position(pos)
    return fb.cascade_candidates(opts)


def random_game_positions(size, plies, seed):
    """Positions along one random legal game; the randomness makes tactical
    shapes (ataris, captures, self-ataris) common."""
    rng = random.Random(seed)
    pos = Position.empty(size)
    out = []
    for _ in range(plies):
        moves = [m for m in pos.legal_moves() if m != PASS]
        if not moves:
            break
        pos = pos.play(moves[rng.randrange(len(moves))])
        out.append(pos)
    return out


class TestCascadeParity:
    def test_corpus_positions(self):
        """Kernel and python cascade agree on rule and candidate set across
        corpus game prefixes."""
        hits = {"capture": 0, "escape": 0, "nakade": 0, "pattern": 0,
                "uniform": 0}
        for path in corpus_paths()[:30]:
            rec = sgf.parse(path.read_text())
            positions = sgf.replay(rec)
            for plies in (9, 30, 61, 120):
                if plies >= len(positions):
                    continue
                pos = positions[plies]
                rule, cands = playout.cascade(pos)
                krule, kcands = kernel_cascade(pos)
                assert (rule, cands) == (krule, kcands), (path.name, plies)
                hits[rule] += 1
        assert hits["uniform"] >= 20
        assert hits["pattern"] >= 5

    def test_random_game_positions(self):
        """Same agreement along random games, where self-ataris and captures
        are everywhere."""
        hits = {"capture": 0, "escape": 0, "nakade": 0, "pattern": 0,
                "uniform": 0}
        for size, seed in ((9, 31), (9, 32), (13, 33)):
            for pos in random_game_positions(size, 70, seed):
                rule, cands = playout.cascade(pos)
                krule, kcands = kernel_cascade(pos)
                assert (rule, cands) == (krule, kcands), (size, seed,
                                                          pos.move_number)
                hits[rule] += 1
        assert hits["capture"] >= 2
        assert hits["escape"] >= 1

    def test_parity_with_heuristics_off(self):
        cfg = playout.PlayoutConfig(patterns=False, atari=False, nakade=False)
        for path in corpus_paths()[:5]:
            rec = sgf.parse(path.read_text())
            positions = sgf.replay(rec)
            pos = positions[min(40, len(positions) - 1)]
            rule, cands = playout.cascade(pos, cfg)
            krule, kcands = kernel_cascade(pos, cfg.opts_mask())
            assert rule == krule == "uniform"
            assert cands == kcands

    def test_self_atari_toggle_changes_sets_identically(self):
        cfg = playout.PlayoutConfig(avoid_self_atari=False)
        differed = 0
        for pos in random_game_positions(9, 60, 77):
            loose = playout.cascade(pos, cfg)
            strict = playout.cascade(pos)
            assert loose == kernel_cascade(pos, cfg.opts_mask())
            assert strict == kernel_cascade(pos)
            if loose != strict:
                differed += 1
        assert differed >= 1


class TestConstructedRules:
    def test_capture_rule_fires(self):
        pos = Position.from_setup(
            9, black_stones=[point(2, 3, 9), point(4, 3, 9), point(3, 2, 9)],
            to_move=WHITE)
        pos = pos.play(point(3, 3, 9))
        rule, cands = playout.cascade(pos)
        assert rule == "capture"
        assert cands == [point(3, 4, 9)]
        assert kernel_cascade(pos) == (rule, cands)
        rng = random.Random(0)
        assert playout.default_policy_move(pos, rng) == point(3, 4, 9)

    def test_escape_rule_extends(self):
        pos = Position.from_setup(
            9, black_stones=[point(4, 4, 9)],
            white_stones=[point(4, 3, 9), point(3, 4, 9)], to_move=WHITE)
        pos = pos.play(point(5, 4, 9))
        rule, cands = playout.cascade(pos)
        assert rule == "escape"
        assert cands == [point(4, 5, 9)]
        assert kernel_cascade(pos) == (rule, cands)

    def test_escape_offers_counter_capture(self):
        # the white stone pressing black is itself in atari: candidates are
        # the extension and the counter-capture
        pos = Position.from_setup(
            9,
            black_stones=[point(4, 4, 9), point(4, 2, 9), point(5, 3, 9)],
            white_stones=[point(4, 3, 9), point(3, 4, 9)], to_move=WHITE)
        pos = pos.play(point(4, 5, 9))
        assert len(pos.group_liberties(point(4, 4, 9))) == 1
        assert len(pos.group_liberties(point(4, 3, 9))) == 1
        rule, cands = playout.cascade(pos)
        assert rule == "escape"
        assert cands == sorted([point(5, 4, 9), point(3, 3, 9)])
        assert kernel_cascade(pos) == (rule, cands)

    def test_nakade_rule_takes_vital_point(self):
        boundary = [point(2, 3, 9), point(6, 3, 9),
                    point(3, 2, 9), point(4, 2, 9), point(5, 2, 9),
                    point(3, 4, 9), point(5, 4, 9)]
        pos = Position.from_setup(9, white_stones=boundary, to_move=WHITE)
        pos = pos.play(point(4, 4, 9))
        rule, cands = playout.cascade(pos)
        assert rule == "nakade"
        assert cands == [point(4, 3, 9)]
        assert kernel_cascade(pos) == (rule, cands)

    def test_nakade_skipped_when_own_stone_on_boundary(self):
        boundary = [point(6, 3, 9),
                    point(3, 2, 9), point(4, 2, 9), point(5, 2, 9),
                    point(3, 4, 9), point(5, 4, 9)]
        pos = Position.from_setup(9, white_stones=boundary,
                                  black_stones=[point(2, 3, 9)],
                                  to_move=WHITE)
        pos = pos.play(point(4, 4, 9))
        rule, cands = playout.cascade(pos)
        assert rule != "nakade"
        assert kernel_cascade(pos) == (rule, cands)


class TestUniformity:
    def test_kernel_fallback_rule_is_uniform(self):
        """10000 draws from the empty 9x9 board stay inside chi-square
        bounds for the uniform distribution over all 81 points."""
        fb = fastboard.FastBoard(9)
        fb.load_position(Position.empty(9))
        match_lut, _ = fb._luts()
        rng = fastboard.make_rng(424242)
        counts = np.zeros(81, dtype=np.int64)
        for _ in range(10000):
            pt = fastboard.choose_move(fb.S, match_lut, rng, fastboard.OPT_ALL)
            assert pt >= 0
            counts[fb.unpad(int(pt))] += 1
        assert counts.sum() == 10000
        expected = 10000 / 81.0
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < scipy.stats.chi2.ppf(0.999, 80)

    def test_python_fallback_rule_is_uniform(self):
        pos = Position.empty(9)
        rng = random.Random(3)
        counts = np.zeros(81, dtype=np.int64)
        for _ in range(3000):
            counts[playout.default_policy_move(pos, rng)] += 1
        expected = 3000 / 81.0
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < scipy.stats.chi2.ppf(0.999, 80)


class TestPlayoutRuns:
    def test_python_policy_plays_full_legal_game(self):
        """Drive a whole game through the python cascade on Position: every
        produced move must be legal and never fill an own true eye."""
        rng = random.Random(1234)
        pos = Position.empty(9)
        moves = 0
        while pos.pass_streak < 2 and moves < 400:
            mv = playout.default_policy_move(pos, rng)
            if mv != PASS:
                reason, _ = pos._classify(mv)
                assert reason in (None, "superko")
                if reason == "superko":
                    break
                assert not playout.true_eye(pos, mv, pos.to_move)
            pos = pos.play(mv)
            moves += 1
        assert moves >= 60

    def test_sealed_position_passes_and_scores(self):
        """Only own true eyes remain: both sides pass at once and the side
        owning the board wins by area minus komi, independent of seed."""
        stones = [pt for pt in range(25)
                  if pt not in (point(0, 0, 5), point(4, 4, 5))]
        pos = Position.from_setup(5, black_stones=stones, to_move=BLACK)
        rule, cands = playout.cascade(pos)
        assert (rule, cands) == ("uniform", [])
        for seed in (1, 9, 555):
            winner, margin = playout.run_playout(pos,
                                                 rng=fastboard.make_rng(seed))
            assert winner == BLACK
            assert margin == 25 - 0 - 7.5

    def test_termination_respects_move_cap(self):
        fb = fastboard.FastBoard(19)
        fb.load_position(Position.empty(19))
        match_lut, _ = fb._luts()
        rng = fastboard.make_rng(8)
        fastboard.run_playout(fb.S, match_lut, rng, 25, fastboard.OPT_ALL)
        assert int(fb.st[fastboard._MOVE_COUNT]) <= 25

    def test_run_playout_reproducible(self):
        pos = Position.empty(9)
        cfg = playout.PlayoutConfig(seed=99)
        a = playout.run_playout(pos, cfg)
        b = playout.run_playout(pos, cfg)
        assert a == b

    def test_empty_board_black_winrate_below_half(self):
        """With komi 7.5 and symmetric playouts, black wins fewer than half
        the games from the empty 9x9 board.  The measured rate is also pinned
        to a band as a regression guard."""
        trials = 10000
        pos = Position.empty(9)
        fb = fastboard.FastBoard(9)
        match_lut, _ = fb._luts()
        rng = fastboard.make_rng(2026)
        margins = np.zeros(trials)
        bcount = np.zeros(81, dtype=np.int64)
        wcount = np.zeros(81, dtype=np.int64)
        fastboard.run_trials(fb.S, pos.grid, BLACK, 0, 0, 0, 0, 0, trials,
                             match_lut, rng, 243, fastboard.OPT_ALL, 7.5,
                             margins, bcount, wcount)
        winrate = float((margins > 0).mean())
        assert winrate < 0.5
        assert 0.33 < winrate < 0.49


class TestDeadStoneEstimate:
    def _walled_position(self, lone_black=False):
        """Black alive on two eyes at the top; white holds a double wall and
        a sealed pocket below it."""
        black = [point(c, 1, 9) for c in range(9)]
        black += [point(c, 0, 9) for c in range(9) if c not in (2, 6)]
        white = [point(c, 3, 9) for c in range(9)]
        white += [point(c, 4, 9) for c in range(9)]
        white += [point(c, 8, 9) for c in range(9)]
        if lone_black:
            black.append(point(4, 6, 9))
        return Position.from_setup(9, black_stones=black, white_stones=white,
                                   to_move=WHITE)

    def test_two_eye_group_always_alive(self):
        pos = self._walled_position()
        report = playout.estimate_dead_and_score(pos, trials=300, seed=5)
        head = int(pos.group_id[point(0, 0, 9)])
        assert report.alive[head] == 1.0
        assert all(point(0, 0, 9) not in g for g in report.dead_groups)

    def test_lone_stone_in_enemy_area_is_dead(self):
        pos = self._walled_position(lone_black=True)
        report = playout.estimate_dead_and_score(pos, trials=300, seed=5)
        lone_head = int(pos.group_id[point(4, 6, 9)])
        assert report.alive[lone_head] < 0.05
        assert frozenset([point(4, 6, 9)]) in report.dead_groups
        # cleaned score must not credit the dead stone to black
        assert report.score.black_points < 30

    def test_resign_trigger_perspective(self):
        pos = self._walled_position()
        report = playout.estimate_dead_and_score(pos, trials=200, seed=7)
        assert report.all_trials_lose_by(BLACK, 10)
        assert not report.all_trials_lose_by(WHITE, 10)

    def test_single_trial_reports_one_margin(self):
        report = playout.estimate_dead_and_score(Position.empty(9), trials=1,
                                                 seed=3)
        assert len(report.margins) == 1

    def test_trials_reproducible_and_seed_sensitive(self):
        pos = self._walled_position()
        r1 = playout.estimate_dead_and_score(pos, trials=50, seed=21)
        r2 = playout.estimate_dead_and_score(pos, trials=50, seed=21)
        r3 = playout.estimate_dead_and_score(pos, trials=50, seed=22)
        assert r1.margins == r2.margins
        assert r1.margins != r3.margins

    def test_rejects_zero_trials(self):
        try:
            playout.estimate_dead_and_score(Position.empty(9), trials=0)
            assert False, "expected ValueError"
        except ValueError:
            pass


class TestWorkerRngs:
    def test_streams_distinct_and_reproducible(self):
        pos = Position.empty(9)
        outs = []
        for idx in range(4):
            rng = playout.worker_rng(7, idx)
            outs.append(playout.run_playout(pos, rng=rng))
        assert len(set(outs)) > 1
        again = playout.run_playout(pos, rng=playout.worker_rng(7, 2))
        assert again == outs[2]
