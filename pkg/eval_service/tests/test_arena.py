"""Vertex conversion and referee helpers for the arena runner."""

import pytest

from eval_service import arena
from eval_service.goban import PASS


class TestVertex:
    def test_column_letters_skip_i(self):
        assert arena.to_vertex(0, 9) == "A1"
        assert arena.to_vertex(8, 9) == "J1"      # ninth column is J, not I
        assert arena.to_vertex(80, 9) == "J9"
        assert arena.to_vertex(180, 19) == "K10"

    def test_round_trip(self):
        for size in (5, 9, 13, 19):
            for cell in range(size * size):
                v = arena.to_vertex(cell, size)
                assert arena.from_vertex(v, size) == cell

    def test_pass(self):
        assert arena.to_vertex(PASS, 9) == "pass"
        assert arena.from_vertex("pass", 9) == PASS
        assert arena.from_vertex("PASS", 9) == PASS

    def test_named_points(self):
        assert arena.from_vertex("J9", 9) == 80
        assert arena.from_vertex("a1", 9) == 0
        assert arena.from_vertex("E5", 9) == 40

    def test_bad_vertex(self):
        with pytest.raises(ValueError):
            arena.from_vertex("I5", 9)   # I never appears
        with pytest.raises(ValueError):
            arena.from_vertex("Z3", 9)
        with pytest.raises(ValueError):
            arena.from_vertex("A0", 9)
