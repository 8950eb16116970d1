"""Flat-array Go board and playout kernel compiled with numba.

This is the hot path behind rollouts, the default policy, and the builtin
evaluator.  The readable rules authority is board.Position; this kernel is
held to it by differential tests (same legality verdicts, same liberties,
same scores on shared game traces).

Representation: the board is padded with a one-cell border (value 3), so
neighbor arithmetic never needs bounds checks.  Cell values: 0 empty, 1 black,
2 white, 3 border.  Groups are circular linked lists (``nxt``) with a head
stone id per stone (``head``); per-head liberty sets are 7-word bitmaps over
padded indices with maintained exact counts.

Playout legality is occupied/suicide/simple-ko; positional superko is NOT
checked in playouts (cycles are bounded by the move cap; full superko lives in
board.Position, which governs the game record and the search tree).

All state lives in preallocated per-instance arrays bundled in a tuple, so
playouts on different FastBoard instances share nothing and can run on
separate threads with the GIL released.
"""

import numpy as np
from numba import njit

from .board import BLACK, WHITE, PASS, is_place

# state-vector slots
_KO, _TO_MOVE, _LAST, _PREV, _PASS_STREAK, _MOVE_COUNT, _N_EMPTY, _SIZE, _WPAD, _SCAN_HINT = range(10)
_N_SCANS, _N_SCANNED, _N_TRIES = 10, 11, 12  # throwaway perf counters

# aux scratch partitions (int32[1024])
_A_CAND = 0      # rule candidate buffer (<= 32)
_A_HEADS = 32    # seen-heads scratch (<= 16)
_A_REGION = 48   # nakade region cells (<= 8)
_A_FALLBACK = 64  # uniform fallback candidate list (<= 361)
_A_STACK = 512   # flood-fill stack (<= 441)

# playout heuristic toggles (bitmask)
OPT_ATARI = 1     # capture rule + escape rule
OPT_NAKADE = 2
OPT_PATTERN = 4
OPT_NO_SELFATARI = 8
OPT_ALL = OPT_ATARI | OPT_NAKADE | OPT_PATTERN | OPT_NO_SELFATARI

_U0 = np.uint64(0)
_U1 = np.uint64(1)
_U2 = np.uint64(2)
_U4 = np.uint64(4)
_U56 = np.uint64(56)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_XMUL = np.uint64(2685821657736338717)

_NEG_INF = -np.inf


@njit(cache=True, nogil=True, inline="always")
def _popcnt(x):
    x = x - ((x >> _U1) & _M1)
    x = (x & _M2) + ((x >> _U2) & _M2)
    x = (x + (x >> _U4)) & _M4
    return np.int64((x * _H01) >> _U56)


@njit(cache=True, nogil=True, inline="always")
def rng_next(rng):
    x = rng[0]
    x ^= x >> np.uint64(12)
    x ^= x << np.uint64(25)
    x ^= x >> np.uint64(27)
    rng[0] = x
    return x * _XMUL


@njit(cache=True, nogil=True, inline="always")
def rand_below(rng, n):
    # modulo bias is ~n/2^64: irrelevant at board scale
    return np.int64(rng_next(rng) % np.uint64(n))


@njit(cache=True, nogil=True, inline="always")
def _lib_add(libs, libc, h, p):
    w = h * 7 + (p >> 6)
    b = _U1 << np.uint64(p & 63)
    if not libs[w] & b:
        libs[w] |= b
        libc[h] += 1


@njit(cache=True, nogil=True, inline="always")
def _lib_del(libs, libc, h, p):
    w = h * 7 + (p >> 6)
    b = _U1 << np.uint64(p & 63)
    if libs[w] & b:
        libs[w] &= ~b
        libc[h] -= 1


@njit(cache=True, nogil=True, inline="always")
def _first_lib(libs, h):
    for w in range(7):
        x = libs[h * 7 + w]
        if x:
            low = x & (~x + _U1)
            return np.int64(w * 64) + _popcnt(low - _U1)
    return np.int64(-1)


def new_state(size):
    """Allocate the state tuple for one independent board instance."""
    wpad = size + 2
    n = wpad * wpad
    board = np.full(n, 3, dtype=np.int8)
    nxt = np.zeros(n, dtype=np.int32)
    head = np.full(n, -1, dtype=np.int32)
    gsz = np.zeros(n, dtype=np.int32)
    libs = np.zeros(n * 7, dtype=np.uint64)
    libc = np.zeros(n, dtype=np.int32)
    empties = np.zeros(n, dtype=np.int32)
    epos = np.zeros(n, dtype=np.int32)
    st = np.zeros(16, dtype=np.int64)
    aux = np.zeros(1024, dtype=np.int32)
    own = np.zeros(n, dtype=np.int8)
    scr = np.zeros(16, dtype=np.uint64)
    st[_SIZE] = size
    st[_WPAD] = wpad
    st[_SCAN_HINT] = 999
    return (board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr)


@njit(cache=True, nogil=True)
def load(S, grid, to_move, ko, last, prev, pass_streak, move_count):
    """Load an unpadded grid plus game context; rebuilds all group structure."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    size = st[_SIZE]
    wpad = st[_WPAD]
    n = wpad * wpad
    for p in range(n):
        board[p] = 3
        head[p] = -1
    n_empty = 0
    for r in range(size):
        for c in range(size):
            p = (r + 1) * wpad + (c + 1)
            v = grid[r * size + c]
            board[p] = v
            if v == 0:
                empties[n_empty] = p
                epos[p] = n_empty
                n_empty += 1
    # group structure via flood fill
    for r in range(size):
        for c in range(size):
            p = (r + 1) * wpad + (c + 1)
            color = board[p]
            if color == 0 or color == 3 or head[p] >= 0:
                continue
            for w in range(7):
                libs[p * 7 + w] = _U0
            libc[p] = 0
            top = 0
            aux[_A_STACK] = p
            top = 1
            head[p] = p
            count = 0
            prev_stone = np.int64(p)
            first = np.int64(p)
            while top > 0:
                top -= 1
                s = aux[_A_STACK + top]
                count += 1
                if s != first:
                    nxt[prev_stone] = s
                    prev_stone = s
                for d in (-1, 1, -wpad, wpad):
                    t = s + d
                    v = board[t]
                    if v == 0:
                        _lib_add(libs, libc, p, t)
                    elif v == color and head[t] < 0:
                        head[t] = p
                        aux[_A_STACK + top] = t
                        top += 1
            nxt[prev_stone] = first
            gsz[p] = count
    st[_KO] = ko
    st[_TO_MOVE] = to_move
    st[_LAST] = last
    st[_PREV] = prev
    st[_PASS_STREAK] = pass_streak
    st[_MOVE_COUNT] = move_count
    st[_N_EMPTY] = n_empty
    st[_SCAN_HINT] = 999
    return 0


@njit(cache=True, nogil=True)
def probe(S, pt, color):
    """Classify playing at pt without mutating: (legal, libs_after, merged_size,
    captured_stones).  Legality = empty, not simple-ko point, not suicide."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    if board[pt] != 0 or pt == st[_KO]:
        return False, np.int64(0), np.int64(0), np.int64(0)
    wpad = st[_WPAD]
    opp = 3 - color
    # singleton fast paths: with no friendly contact the placed stone is the
    # whole group, so liberties are its empty neighbors plus any point freed
    # by a capture right next to it
    n_e = np.int64(0)
    n_adj_atari = np.int64(0)
    has_own = False
    for d in (-1, 1, -wpad, wpad):
        t = pt + d
        v = board[t]
        if v == 0:
            n_e += 1
        elif v == color:
            has_own = True
        elif v == opp and libc[head[t]] == 1:
            n_adj_atari += 1
    if not has_own:
        if n_adj_atari == 0:
            return n_e > 0, n_e, np.int64(1), np.int64(0)
        # every adjacent atari group's sole liberty is pt, so all die; each
        # adjacent captured stone frees its point as a new liberty.  Count
        # captured stones over distinct heads (a group can touch pt twice).
        g0 = np.int64(-1)
        g1 = np.int64(-1)
        g2 = np.int64(-1)
        g3 = np.int64(-1)
        caps = np.int64(0)
        for d in (-1, 1, -wpad, wpad):
            t = pt + d
            if board[t] == opp and libc[head[t]] == 1:
                h = np.int64(head[t])
                if h != g0 and h != g1 and h != g2 and h != g3:
                    caps += gsz[h]
                    if g0 < 0:
                        g0 = h
                    elif g1 < 0:
                        g1 = h
                    elif g2 < 0:
                        g2 = h
                    else:
                        g3 = h
        return True, n_e + n_adj_atari, np.int64(1), caps
    # scratch liberty bitmap for the merged group
    for w in range(7):
        scr[w] = _U0
    n_own = 0
    n_opp = 0
    merged_size = np.int64(1)
    n_caps = np.int64(0)
    for d in (-1, 1, -wpad, wpad):
        t = pt + d
        v = board[t]
        if v == 0:
            scr[t >> 6] |= _U1 << np.uint64(t & 63)
        elif v == color:
            h = head[t]
            fresh = True
            for i in range(n_own):
                if aux[_A_HEADS + i] == h:
                    fresh = False
                    break
            if fresh:
                aux[_A_HEADS + n_own] = h
                n_own += 1
                merged_size += gsz[h]
                for w in range(7):
                    scr[w] |= libs[h * 7 + w]
        elif v == opp:
            h = head[t]
            fresh = True
            for i in range(n_opp):
                if aux[_A_HEADS + 8 + i] == h:
                    fresh = False
                    break
            if fresh:
                aux[_A_HEADS + 8 + n_opp] = h
                n_opp += 1
                if libc[h] == 1:
                    n_caps += gsz[h]
    # the point itself stops being a liberty
    scr[pt >> 6] &= ~(_U1 << np.uint64(pt & 63))
    if n_caps > 0:
        # freed points adjacent to the merged group become liberties
        for i in range(n_opp):
            h = aux[_A_HEADS + 8 + i]
            if libc[h] != 1:
                continue
            s = np.int64(h)
            while True:
                adjacent = False
                for d in (-1, 1, -wpad, wpad):
                    t = s + d
                    if t == pt:
                        adjacent = True
                        break
                    if board[t] == color:
                        ht = head[t]
                        for j in range(n_own):
                            if aux[_A_HEADS + j] == ht:
                                adjacent = True
                                break
                        if adjacent:
                            break
                if adjacent:
                    scr[s >> 6] |= _U1 << np.uint64(s & 63)
                s = np.int64(nxt[s])
                if s == h:
                    break
    nlibs = np.int64(0)
    for w in range(7):
        nlibs += _popcnt(scr[w])
    return nlibs > 0, nlibs, merged_size, n_caps


@njit(cache=True, nogil=True)
def play(S, pt, color):
    """Place a stone assumed legal (probe first).  Updates all structure."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    wpad = st[_WPAD]
    opp = 3 - color
    n_own = 0
    n_opp = 0
    for d in (-1, 1, -wpad, wpad):
        t = pt + d
        v = board[t]
        if v == color:
            h = head[t]
            fresh = True
            for i in range(n_own):
                if aux[_A_HEADS + i] == h:
                    fresh = False
                    break
            if fresh:
                aux[_A_HEADS + n_own] = h
                n_own += 1
        elif v == opp:
            h = head[t]
            fresh = True
            for i in range(n_opp):
                if aux[_A_HEADS + 8 + i] == h:
                    fresh = False
                    break
            if fresh:
                aux[_A_HEADS + 8 + n_opp] = h
                n_opp += 1
    for i in range(n_opp):
        _lib_del(libs, libc, aux[_A_HEADS + 8 + i], pt)
    for i in range(n_own):
        _lib_del(libs, libc, aux[_A_HEADS + i], pt)
    # place as a fresh singleton
    board[pt] = color
    head[pt] = pt
    nxt[pt] = pt
    gsz[pt] = 1
    for w in range(7):
        libs[pt * 7 + w] = _U0
    libc[pt] = 0
    for d in (-1, 1, -wpad, wpad):
        if board[pt + d] == 0:
            _lib_add(libs, libc, pt, pt + d)
    # merge with adjacent own groups (larger group absorbs)
    H = np.int64(pt)
    for i in range(n_own):
        h = np.int64(aux[_A_HEADS + i])
        a, b = H, h
        if gsz[a] < gsz[b]:
            a, b = b, a
        # relabel the smaller group's stones
        s = b
        while True:
            head[s] = a
            s = np.int64(nxt[s])
            if s == b:
                break
        # splice circular lists and fold liberty bitmaps
        tmp = nxt[a]
        nxt[a] = nxt[b]
        nxt[b] = tmp
        gsz[a] += gsz[b]
        for w in range(7):
            libs[a * 7 + w] |= libs[b * 7 + w]
        H = a
    cnt = np.int64(0)
    for w in range(7):
        cnt += _popcnt(libs[H * 7 + w])
    libc[H] = cnt
    # captures
    total_caps = np.int64(0)
    cap_single = np.int64(0)
    for i in range(n_opp):
        h = aux[_A_HEADS + 8 + i]
        if libc[h] != 0:
            continue
        total_caps += gsz[h]
        cap_single = np.int64(h)
        # pass 1: clear the stones
        s = np.int64(h)
        while True:
            board[s] = 0
            empties[st[_N_EMPTY]] = s
            epos[s] = st[_N_EMPTY]
            st[_N_EMPTY] += 1
            s = np.int64(nxt[s])
            if s == h:
                break
        # pass 2: freed points are liberties of every adjacent group
        s = np.int64(h)
        while True:
            for d in (-1, 1, -wpad, wpad):
                t = s + d
                if board[t] == 1 or board[t] == 2:
                    _lib_add(libs, libc, head[t], s)
            s = np.int64(nxt[s])
            if s == h:
                break
    # the played point leaves the empties list
    i = epos[pt]
    last_e = empties[st[_N_EMPTY] - 1]
    empties[i] = last_e
    epos[last_e] = i
    st[_N_EMPTY] -= 1
    # simple ko: lone stone captured lone stone and sits in atari
    if total_caps == 1 and gsz[H] == 1 and libc[H] == 1:
        st[_KO] = cap_single
    else:
        st[_KO] = 0
    st[_PREV] = st[_LAST]
    st[_LAST] = pt
    st[_TO_MOVE] = opp
    st[_PASS_STREAK] = 0
    st[_MOVE_COUNT] += 1


@njit(cache=True, nogil=True)
def play_pass(S):
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    st[_KO] = 0
    st[_PREV] = st[_LAST]
    st[_LAST] = -1
    st[_TO_MOVE] = 3 - st[_TO_MOVE]
    st[_PASS_STREAK] += 1
    st[_MOVE_COUNT] += 1


@njit(cache=True, nogil=True, inline="always")
def is_true_eye(S, pt, color):
    """Empty point whose orthogonal neighbors are all own/edge and whose
    diagonals carry fewer than two opposing marks (edge counts as one)."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    wpad = st[_WPAD]
    if board[pt] != 0:
        return False
    for d in (-1, 1, -wpad, wpad):
        v = board[pt + d]
        if v != color and v != 3:
            return False
    opp = 3 - color
    bad = 0
    at_edge = False
    for d in (-wpad - 1, -wpad + 1, wpad - 1, wpad + 1):
        v = board[pt + d]
        if v == 3:
            at_edge = True
        elif v == opp:
            bad += 1
    if at_edge:
        bad += 1
    return bad < 2


@njit(cache=True, nogil=True, inline="always")
def acceptable(S, pt, color, opts):
    """Playout move filter: legal, not an own true eye, and (when enabled)
    not a self-atari of a group larger than one stone."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    if board[pt] != 0 or pt == st[_KO]:
        return False
    wpad = st[_WPAD]
    n_e = 0
    has_opp = False
    max_own_libc = 0
    for d in (-1, 1, -wpad, wpad):
        t = pt + d
        v = board[t]
        if v == 0:
            n_e += 1
        elif v == color:
            lc = libc[head[t]]
            if lc > max_own_libc:
                max_own_libc = lc
        elif v != 3:
            has_opp = True
    # two empty orthogonal neighbors settle everything: at least two
    # liberties after the play (no suicide, no self-atari) and not an eye
    if n_e >= 2:
        return True
    # a friendly group keeping >= 2 liberties besides pt settles it too:
    # merging never loses those, so the result has >= 2 liberties
    if max_own_libc >= 3:
        if n_e == 1 or has_opp:
            return True
        return not is_true_eye(S, pt, color)
    if is_true_eye(S, pt, color):
        return False
    legal, nlibs, nsize, ncaps = probe(S, pt, color)
    if not legal:
        return False
    if (opts & OPT_NO_SELFATARI) and nlibs == 1 and nsize > 1:
        return False
    return True


@njit(cache=True, nogil=True, inline="always")
def _rule_capture(S, opts):
    """Capture of the opponent group just played (if in atari): candidates in aux."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    color = st[_TO_MOVE]
    last = st[_LAST]
    n = 0
    h = head[last]
    if libc[h] == 1:
        lib = _first_lib(libs, h)
        if acceptable(S, lib, color, opts):
            aux[_A_CAND] = lib
            n = 1
    return n


@njit(cache=True, nogil=True, inline="always")
def _rule_escape(S, opts):
    """Own groups put in atari by the last move: extend or counter-capture."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    color = st[_TO_MOVE]
    opp = 3 - color
    wpad = st[_WPAD]
    last = st[_LAST]
    # gather distinct own atari heads first: acceptable() reuses the shared
    # head scratch, so dedup state lives in locals (at most 4 neighbors)
    h0 = np.int64(-1)
    h1 = np.int64(-1)
    h2 = np.int64(-1)
    h3 = np.int64(-1)
    n_seen = 0
    for d in (-1, 1, -wpad, wpad):
        t = last + d
        if board[t] != color:
            continue
        h = np.int64(head[t])
        if h == h0 or h == h1 or h == h2 or h == h3:
            continue
        if libc[h] != 1:
            continue
        if n_seen == 0:
            h0 = h
        elif n_seen == 1:
            h1 = h
        elif n_seen == 2:
            h2 = h
        else:
            h3 = h
        n_seen += 1
    n = 0
    for k in range(n_seen):
        if k == 0:
            h = h0
        elif k == 1:
            h = h1
        elif k == 2:
            h = h2
        else:
            h = h3
        # extend at the last liberty
        lib = _first_lib(libs, h)
        if acceptable(S, lib, color, opts):
            dup = False
            for i in range(n):
                if aux[_A_CAND + i] == lib:
                    dup = True
                    break
            if not dup and n < 24:
                aux[_A_CAND + n] = lib
                n += 1
        # counter-capture any adjacent opponent group in atari
        s = h
        while True:
            for d2 in (-1, 1, -wpad, wpad):
                t2 = s + d2
                if board[t2] == opp and libc[head[t2]] == 1:
                    cap = _first_lib(libs, head[t2])
                    if acceptable(S, cap, color, opts):
                        dup = False
                        for i in range(n):
                            if aux[_A_CAND + i] == cap:
                                dup = True
                                break
                        if not dup and n < 24:
                            aux[_A_CAND + n] = cap
                            n += 1
            s = np.int64(nxt[s])
            if s == h:
                break
    return n


@njit(cache=True, nogil=True, inline="always")
def _rule_nakade(S, opts):
    """Vital point of a small opponent eyespace the last move touches, or -1.

    Eyespace: empty region of size <= 6 whose stone boundary is entirely the
    opponent's.  Vital point: the unique cell of maximal in-region degree,
    degree >= 2 (the standard shapes: straight/bent three, pyramid four,
    bulky/cross five, flower six all have one)."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    color = st[_TO_MOVE]
    opp = 3 - color
    wpad = st[_WPAD]
    last = st[_LAST]
    for d0 in (-1, 1, -wpad, wpad):
        start = last + d0
        if board[start] != 0:
            continue
        # flood the empty region, cap 6 cells; own[] doubles as the visited
        # mark (9) so membership tests are O(1); marks are cleared before use
        # elsewhere because score_area rebuilds own[] from scratch
        n_cells = 1
        aux[_A_REGION] = start
        own[start] = 9
        ok = True
        i = 0
        while i < n_cells:
            p = aux[_A_REGION + i]
            i += 1
            for d in (-1, 1, -wpad, wpad):
                t = p + d
                v = board[t]
                if v == 0:
                    if own[t] != 9:
                        if n_cells >= 6:
                            ok = False
                            break
                        aux[_A_REGION + n_cells] = t
                        own[t] = 9
                        n_cells += 1
                elif v == color:
                    ok = False  # our stone on the boundary: not their eyespace
                    break
            if not ok:
                break
        if not ok or n_cells < 3:
            for i in range(n_cells):
                own[aux[_A_REGION + i]] = 0
            continue
        # unique maximal in-region degree
        best = np.int64(-1)
        best_deg = 0
        unique = False
        for i in range(n_cells):
            p = aux[_A_REGION + i]
            deg = 0
            for d in (-1, 1, -wpad, wpad):
                if own[p + d] == 9:
                    deg += 1
            if deg > best_deg:
                best_deg = deg
                best = p
                unique = True
            elif deg == best_deg:
                unique = False
        for i in range(n_cells):
            own[aux[_A_REGION + i]] = 0
        if unique and best_deg >= 2 and acceptable(S, best, color, opts):
            return best
    return np.int64(-1)


@njit(cache=True, nogil=True, inline="always")
def pattern_code(S, pt, color):
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    wpad = st[_WPAD]
    code = 0
    i = 0
    for d in (-wpad - 1, -wpad, -wpad + 1, -1, 1, wpad - 1, wpad, wpad + 1):
        v = board[pt + d]
        if v == 0:
            cell = 0
        elif v == color:
            cell = 1
        elif v == 3:
            cell = 3
        else:
            cell = 2
        code |= cell << (2 * i)
        i += 1
    return code


@njit(cache=True, nogil=True, inline="always")
def _rule_pattern(S, match_lut, opts):
    """Pattern matches on the 8 cells around the last move: candidates in aux."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    color = st[_TO_MOVE]
    wpad = st[_WPAD]
    last = st[_LAST]
    n = 0
    for d in (-wpad - 1, -wpad, -wpad + 1, -1, 1, wpad - 1, wpad, wpad + 1):
        pt = last + d
        if board[pt] != 0:
            continue
        if match_lut[pattern_code(S, pt, color)] == 0:
            continue
        if acceptable(S, pt, color, opts):
            aux[_A_CAND + n] = pt
            n += 1
    return n


@njit(cache=True, nogil=True, inline="always")
def _rule_uniform(S, rng, opts):
    """Uniform over acceptable empty points: rejection sampling with an exact
    full-scan fallback, so the choice is uniform in both paths.  The try count
    adapts to the density the last fallback scan observed; both paths remain
    exactly uniform regardless."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    color = st[_TO_MOVE]
    n_empty = st[_N_EMPTY]
    if n_empty == 0:
        return np.int64(-1)
    tries = 30 if st[_SCAN_HINT] >= 24 else 6
    for k in range(tries):
        pt = empties[rand_below(rng, n_empty)]
        if acceptable(S, pt, color, opts):
            st[_N_TRIES] += k + 1
            return np.int64(pt)
    st[_N_TRIES] += tries
    cnt = 0
    for i in range(n_empty):
        pt = empties[i]
        if acceptable(S, pt, color, opts):
            aux[_A_FALLBACK + cnt] = pt
            cnt += 1
    st[_SCAN_HINT] = cnt
    st[_N_SCANS] += 1
    st[_N_SCANNED] += n_empty
    if cnt == 0:
        return np.int64(-1)
    return np.int64(aux[_A_FALLBACK + rand_below(rng, cnt)])


@njit(cache=True, nogil=True)
def choose_move(S, match_lut, rng, opts):
    """Default-policy move (padded point, or -1 for pass)."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    last = st[_LAST]
    if last > 0:
        if opts & OPT_ATARI:
            n = _rule_capture(S, opts)
            if n > 0:
                return np.int64(aux[_A_CAND + rand_below(rng, n)])
            n = _rule_escape(S, opts)
            if n > 0:
                return np.int64(aux[_A_CAND + rand_below(rng, n)])
        if opts & OPT_NAKADE:
            pt = _rule_nakade(S, opts)
            if pt >= 0:
                return pt
        if opts & OPT_PATTERN:
            n = _rule_pattern(S, match_lut, opts)
            if n > 0:
                return np.int64(aux[_A_CAND + rand_below(rng, n)])
    return _rule_uniform(S, rng, opts)


@njit(cache=True, nogil=True)
def score_area(S):
    """Tromp-Taylor area counts (black_points, white_points) on the current
    board; also fills the ownership map (1 black, 2 white, 0 neutral)."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    wpad = st[_WPAD]
    size = st[_SIZE]
    n = wpad * wpad
    for p in range(n):
        own[p] = board[p]
    for idx in range(st[_N_EMPTY]):
        start = empties[idx]
        if own[start] != 0:
            continue
        # flood this empty region, noting which colors it reaches
        aux[_A_STACK] = start
        top = 1
        own[start] = 4  # visited marker
        reach_black = False
        reach_white = False
        region_n = 0
        while top > 0:
            top -= 1
            p = aux[_A_STACK + top]
            aux[_A_FALLBACK + region_n] = p
            region_n += 1
            for d in (-1, 1, -wpad, wpad):
                t = p + d
                v = board[t]
                if v == 1:
                    reach_black = True
                elif v == 2:
                    reach_white = True
                elif v == 0 and own[t] == 0:
                    own[t] = 4
                    aux[_A_STACK + top] = t
                    top += 1
        owner = np.int8(5)  # neutral sentinel, cleared below
        if reach_black and not reach_white:
            owner = np.int8(1)
        elif reach_white and not reach_black:
            owner = np.int8(2)
        for i in range(region_n):
            own[aux[_A_FALLBACK + i]] = owner
    black = np.int64(0)
    white = np.int64(0)
    for r in range(size):
        base = (r + 1) * wpad
        for c in range(size):
            p = base + c + 1
            v = own[p]
            if v == 1:
                black += 1
            elif v == 2:
                white += 1
            elif v == 5:
                own[p] = 0
    return black, white


@njit(cache=True, nogil=True)
def run_playout(S, match_lut, rng, max_moves, opts):
    """Default policy to the end (two passes or the cap); returns area counts."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    moves = 0
    while st[_PASS_STREAK] < 2 and moves < max_moves:
        mv = choose_move(S, match_lut, rng, opts)
        if mv < 0:
            play_pass(S)
        else:
            play(S, mv, st[_TO_MOVE])
        moves += 1
    return score_area(S)


@njit(cache=True, nogil=True)
def run_trials(S, grid, to_move, ko, last, prev, pass_streak, move_count,
               n_trials, match_lut, rng, max_moves, opts, komi,
               margins, bcount, wcount):
    """n_trials independent playouts from one snapshot.  Fills margins (black
    minus white minus komi) and per-point black/white ownership counts."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    size = st[_SIZE]
    wpad = st[_WPAD]
    for k in range(n_trials):
        load(S, grid, to_move, ko, last, prev, pass_streak, move_count)
        b, w = run_playout(S, match_lut, rng, max_moves, opts)
        margins[k] = b - w - komi
        for r in range(size):
            for c in range(size):
                v = own[(r + 1) * wpad + (c + 1)]
                i = r * size + c
                if v == 1:
                    bcount[i] += 1
                elif v == 2:
                    wcount[i] += 1
    return 0


@njit(cache=True, nogil=True)
def replay_path(S, moves, n_moves):
    """Play a move sequence (unpadded points / PASS).  Returns -1, or the index
    of the first illegal move (state then reflects the moves before it)."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    size = st[_SIZE]
    wpad = st[_WPAD]
    for i in range(n_moves):
        mv = moves[i]
        if mv < 0:
            play_pass(S)
            continue
        pt = (mv // size + 1) * wpad + (mv % size + 1)
        legal, nlibs, nsize, ncaps = probe(S, pt, st[_TO_MOVE])
        if not legal:
            return i
        play(S, pt, st[_TO_MOVE])
    return -1


@njit(cache=True, nogil=True)
def eval_logits(S, weight_lut, out, caps):
    """Builtin evaluator: heuristic logits for every legal move of the side to
    move, -inf elsewhere; caps[i] = stones the move would capture (callers use
    it to screen which moves need the full repetition check).  Fixed
    ingredient weights; see policy.BuiltinEvaluator."""
    board, nxt, head, gsz, libs, libc, empties, epos, st, aux, own, scr = S
    size = st[_SIZE]
    wpad = st[_WPAD]
    color = st[_TO_MOVE]
    prev = st[_PREV]
    last = st[_LAST]
    n_legal = 0
    for i in range(size * size):
        out[i] = _NEG_INF
        caps[i] = 0
    for idx in range(st[_N_EMPTY]):
        pt = empties[idx]
        legal, nlibs, nsize, ncaps = probe(S, pt, color)
        if not legal:
            continue
        caps[(pt // wpad - 1) * size + (pt % wpad - 1)] = ncaps
        score = 0.0
        if ncaps > 0:
            score += 20.0 + 0.3 * ncaps
        if nlibs == 1:
            score -= 12.0
        if is_true_eye(S, pt, color):
            score -= 8.0
        escape = False
        for d in (-1, 1, -wpad, wpad):
            t = pt + d
            if board[t] == color and libc[head[t]] == 1:
                escape = True
                break
        if escape and nlibs >= 2:
            score += 6.0
        if last > 0:
            # pattern credit only in the 8 cells around the opponent's reply
            dr = pt // wpad - last // wpad
            dc = pt % wpad - last % wpad
            if -1 <= dr <= 1 and -1 <= dc <= 1:
                w = weight_lut[pattern_code(S, pt, color)]
                if w > 0.0:
                    score += 3.0 * w
        if prev > 0:
            dr = pt // wpad - prev // wpad
            dc = pt % wpad - prev % wpad
            score += 2.0 * np.exp(-0.25 * (dr * dr + dc * dc))
        out[(pt // wpad - 1) * size + (pt % wpad - 1)] = score
        n_legal += 1
    return n_legal


# -- python wrapper ---------------------------------------------------------


class FastBoard:
    """One independent kernel board.  Not thread-shared; make one per worker."""

    def __init__(self, size=19):
        self.size = size
        self.wpad = size + 2
        self.S = new_state(size)
        self._match, self._weight = None, None

    def _luts(self):
        if self._match is None:
            from . import patterns
            self._match, self._weight = patterns.tables()
        return self._match, self._weight

    def pad(self, pt):
        return (pt // self.size + 1) * self.wpad + (pt % self.size + 1)

    def unpad(self, p):
        return (p // self.wpad - 1) * self.size + (p % self.wpad - 1)

    def load_position(self, pos):
        """Mirror a board.Position into kernel state."""
        ko = self.pad(pos.ko_point) if pos.ko_point is not None else 0
        last = self._enc_move(pos.last_move)
        prev = self._enc_move(pos.prev_move)
        load(self.S, pos.grid, pos.to_move, ko, last, prev,
             pos.pass_streak, pos.move_number)

    def _enc_move(self, mv):
        if mv is None:
            return 0
        if mv == PASS:
            return -1
        return self.pad(mv)

    # thin wrappers (tests and non-hot callers)

    @property
    def st(self):
        return self.S[8]

    @property
    def to_move(self):
        return int(self.st[_TO_MOVE])

    def grid(self):
        board = self.S[0]
        g = np.zeros(self.size * self.size, dtype=np.int8)
        for r in range(self.size):
            row = (r + 1) * self.wpad + 1
            g[r * self.size:(r + 1) * self.size] = board[row:row + self.size]
        return g

    def probe(self, pt, color=None):
        c = self.to_move if color is None else color
        return probe(self.S, self.pad(pt), c)

    def is_legal(self, pt):
        return bool(self.probe(pt)[0])

    def play(self, mv):
        if mv == PASS:
            play_pass(self.S)
            return
        legal, _, _, _ = probe(self.S, self.pad(mv), self.to_move)
        if not legal:
            raise ValueError(f"illegal kernel move {mv}")
        play(self.S, self.pad(mv), self.to_move)

    def is_true_eye(self, pt, color):
        return bool(is_true_eye(self.S, self.pad(pt), color))

    def acceptable(self, pt, color=None, opts=OPT_ALL):
        c = self.to_move if color is None else color
        return bool(acceptable(self.S, self.pad(pt), c, opts))

    def choose_move(self, rng_state, opts=OPT_ALL):
        match, _ = self._luts()
        mv = choose_move(self.S, match, rng_state, opts)
        return PASS if mv < 0 else self.unpad(mv)

    def cascade_candidates(self, opts=OPT_ALL):
        """(rule name, candidate points) the cascade would sample from; for
        differential tests against the pure-python default policy."""
        match, _ = self._luts()
        aux = self.S[9]
        st = self.st
        color = int(st[_TO_MOVE])
        if st[_LAST] > 0:
            if opts & OPT_ATARI:
                n = _rule_capture(self.S, opts)
                if n:
                    return "capture", sorted(self.unpad(int(aux[_A_CAND + i])) for i in range(n))
                n = _rule_escape(self.S, opts)
                if n:
                    return "escape", sorted(self.unpad(int(aux[_A_CAND + i])) for i in range(n))
            if opts & OPT_NAKADE:
                pt = _rule_nakade(self.S, opts)
                if pt >= 0:
                    return "nakade", [self.unpad(int(pt))]
            if opts & OPT_PATTERN:
                n = _rule_pattern(self.S, match, opts)
                if n:
                    return "pattern", sorted(self.unpad(int(aux[_A_CAND + i])) for i in range(n))
        pts = [self.unpad(int(self.S[6][i])) for i in range(int(st[_N_EMPTY]))]
        ok = sorted(p for p in pts if self.acceptable(p, color, opts))
        return "uniform", ok

    def score(self, komi=7.5):
        b, w = score_area(self.S)
        return int(b), int(w), float(b - w - komi)

    def eval_logits(self):
        out, n, _ = self.eval_logits_caps()
        return out, n

    def eval_logits_caps(self):
        """(logits, legal count, per-point capture counts)."""
        _, weight = self._luts()
        n_pts = self.size * self.size
        out = np.zeros(n_pts, dtype=np.float64)
        caps = np.zeros(n_pts, dtype=np.int32)
        n = eval_logits(self.S, weight, out, caps)
        return out, int(n), caps

    def run_playout(self, rng_state, max_moves=None, opts=OPT_ALL):
        match, _ = self._luts()
        cap = 3 * self.size * self.size if max_moves is None else max_moves
        b, w = run_playout(self.S, match, rng_state, cap, opts)
        return int(b), int(w)


def make_rng(seed):
    """xorshift64* state from a seed (any int); distinct per worker."""
    from .zobrist import _splitmix64
    _, z = _splitmix64(seed & 0xFFFFFFFFFFFFFFFF)
    return np.array([np.uint64(z | 1)], dtype=np.uint64)
