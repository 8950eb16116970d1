"""Ladder reading: does a chased group die in a forced liberty race?

A ladder is the forced sequence where one group stays at one or two liberties
while the chaser fills them: the defender always extends from atari at its
sole liberty, the attacker always plays one of the group's liberties (trying
both when there is a choice).  The group is captured by ladder if it reaches
zero liberties this way before ever exceeding two liberties or before the
ply cap runs out; a defender-colored stone on the chase path (a ladder
breaker) typically lets it escape.

The reading deliberately follows this narrow move menu: the defender never
counter-captures and neither side plays elsewhere, so the verdict is a fast
tactical signal, not a life-and-death proof.  Prior ko bans on the input
position are ignored (the read starts from a fresh hypothetical); ko and
suicide arising during the sequence rule moves out for both sides.

Reading never mutates the input position.  Helpers at the bottom translate
verdicts into move advice: moves that would start a losing ladder for the
side to move, and moves that begin a winning ladder capture.
"""

from .board import BLACK, WHITE, EMPTY, PASS, Position, opponent
from .playout import _merged_after

CAPTURED_BY_LADDER = "captured-by-ladder"
ESCAPES = "escapes"
NOT_A_LADDER = "not-a-ladder"

DEPTH_CAP = 64


def read_ladder(pos, target, depth=DEPTH_CAP):
    """Ladder verdict for the group containing the stone at `target`.

    NOT_A_LADDER when the group does not stand at one or two liberties.
    With one liberty the defender moves first; with two the attacker does.
    """
    if pos.grid[target] == EMPTY:
        raise ValueError("target must be an occupied point")
    nlibs = len(pos.group_liberties(target))
    if nlibs not in (1, 2):
        return NOT_A_LADDER
    defender = int(pos.grid[target])
    first = defender if nlibs == 1 else opponent(defender)
    sim = _hypothetical(pos, first)
    return CAPTURED_BY_LADDER if _chase(sim, target, depth) else ESCAPES


def _hypothetical(pos, to_move):
    """Fresh position with pos's stones and the given side to move."""
    blacks = [pt for pt in range(pos.size * pos.size) if pos.grid[pt] == BLACK]
    whites = [pt for pt in range(pos.size * pos.size) if pos.grid[pt] == WHITE]
    return Position.from_setup(pos.size, blacks, whites, to_move=to_move)


def _chase(sim, target, depth):
    """True when the mover-alternating chase captures the target group."""
    if depth <= 0:
        return False
    libs = sim.group_liberties(target)
    if len(libs) > 2:
        return False
    if int(sim.to_move) == int(sim.grid[target]):
        # defender: extend from atari at the sole liberty, or die trying
        if len(libs) != 1:
            return False
        (ext,) = libs
        if not sim.is_legal(ext):
            return True
        return _chase(sim.play(ext), target, depth - 1)
    # attacker: filling either liberty may work; captured if any branch is
    for mv in sorted(libs):
        if not sim.is_legal(mv):
            continue
        nxt = sim.play(mv)
        if nxt.grid[target] == EMPTY:
            return True
        if _chase(nxt, target, depth - 1):
            return True
    return False


def move_starts_losing_ladder(pos, move, depth=DEPTH_CAP):
    """Would this move by the side to move leave its own group caught in a
    ladder?  Used to demote candidates during search."""
    if move == PASS or pos.stone_at(move) != EMPTY:
        return False
    # cheap screen: a played group at 3+ liberties is never a ladder shape,
    # so skip the board copy for the common case
    libs, _, _ = _merged_after(pos, move, pos.to_move)
    if len(libs) > 2:
        return False
    if not pos.is_legal(move):
        return False
    nxt = pos.play(move)
    return read_ladder(nxt, move, depth) == CAPTURED_BY_LADDER


def ladder_capture_moves(pos, depth=DEPTH_CAP):
    """Sorted moves for the side to move that begin a winning ladder against
    an opponent group, including plain captures of groups already in atari.
    Used to force candidates into the expansion set."""
    opp = opponent(pos.to_move)
    out = set()
    seen = set()
    for pt in range(pos.size * pos.size):
        if pos.grid[pt] != opp:
            continue
        head = int(pos.group_id[pt])
        if head in seen:
            continue
        seen.add(head)
        libs = pos.group_liberties(pt)
        if len(libs) == 1:
            (lib,) = libs
            if pos.is_legal(lib):
                out.add(lib)
        elif len(libs) == 2:
            for lib in libs:
                if not pos.is_legal(lib):
                    continue
                nxt = pos.play(lib)
                if nxt.grid[pt] == EMPTY or \
                        read_ladder(nxt, pt, depth) == CAPTURED_BY_LADDER:
                    out.add(lib)
    return sorted(out)
