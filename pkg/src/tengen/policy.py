"""Move prediction for the search: evaluator contract, builtin baseline,
and the TCP batch client for an external policy service.

A policy result is the full probability distribution over legal place moves
(never Pass), highest first.  Evaluators answer batches of requests carrying
a serialized feature tensor and return the top entries per request, matched
by id.  The builtin evaluator turns fixed board heuristics (captures,
atari escapes, local 3x3 patterns, closeness to the mover's previous stone)
into a softmax, making the whole engine runnable and testable without any
neural dependency; a remote service speaks newline-delimited JSON over TCP
and is expected to answer within a timeout, else EvaluatorUnavailable.

Probabilities order moves and bound the expansion set; they carry no weight
inside the tree search formula itself.
"""

import base64
import json
import socket
import threading
import time

import numpy as np

from .board import BLACK, WHITE
from . import fastboard, features, zobrist

PROTO_VERSION = 1
DEFAULT_TIMEOUT = 5.0
BATCH_WINDOW = 0.002
BATCH_CAP = 128


class EvaluatorUnavailable(Exception):
    """The policy service cannot be reached or did not answer in time."""


class PolicyResult:
    """Distribution over legal place moves, descending probability, ties
    broken by move index."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        self.entries = tuple((int(m), float(p)) for m, p in entries)

    def moves(self):
        return [m for m, _ in self.entries]

    def probability(self, move):
        for m, p in self.entries:
            if m == move:
                return p
        return 0.0

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


class EvaluatorRequest:
    __slots__ = ("id", "size", "feature_set", "planes", "max_moves")

    def __init__(self, rid, size, feature_set, planes, max_moves):
        self.id = int(rid)
        self.size = int(size)
        self.feature_set = feature_set
        self.planes = np.ascontiguousarray(planes, dtype=np.float32)
        self.max_moves = int(max_moves)


class EvaluatorResponse:
    __slots__ = ("id", "entries")

    def __init__(self, rid, entries):
        self.id = int(rid)
        self.entries = tuple((int(m), float(p)) for m, p in entries)


def request_for(pos, rid, max_moves, set_kind=features.EXTENDED,
                opponent_rank=0):
    """Build the wire request for evaluating pos for its side to move."""
    tensor = features.extract(pos, set_kind=set_kind,
                              opponent_rank=opponent_rank)
    return EvaluatorRequest(rid, pos.size, set_kind, tensor.planes, max_moves)


def select_expansion_set(pr, cumulative_threshold=0.8, max_moves=None,
                         min_moves=1):
    """Shortest prefix of the policy whose cumulative probability reaches the
    threshold (boundary included), clipped to [min_moves, max_moves]."""
    entries = getattr(pr, "entries", None)
    if entries is None:
        entries = tuple(pr)
    if not entries:
        raise ValueError("policy result is empty")
    if not 0.0 < cumulative_threshold <= 1.0:
        raise ValueError("cumulative_threshold must be in (0, 1]")
    if max_moves is None or max_moves < min_moves or min_moves < 1:
        raise ValueError("need max_moves >= min_moves >= 1")
    n = 0
    acc = 0.0
    for _, p in entries:
        n += 1
        acc += p
        if acc >= cumulative_threshold - 1e-12:
            break
    n = max(min_moves, min(n, max_moves))
    n = min(n, len(entries))
    return [m for m, _ in entries[:n]]


def _softmax_entries(logits):
    """Masked softmax over the finite logits, temperature 1; entries sorted
    by descending probability then move index."""
    idx = np.nonzero(np.isfinite(logits))[0]
    if idx.size == 0:
        return ()
    z = logits[idx] - logits[idx].max()
    e = np.exp(z)
    p = e / e.sum()
    order = np.lexsort((idx, -p))
    return tuple(zip(idx[order].tolist(), p[order].tolist()))


class BuiltinEvaluator:
    """Deterministic heuristic policy; the in-process stand-in for the
    neural service.  Results depend only on the input, so instances are
    safe to share between threads (boards are per-thread)."""

    def __init__(self):
        self._local = threading.local()

    def _board(self, size):
        fb = getattr(self._local, "fb", None)
        if fb is None or fb.size != size:
            fb = fastboard.FastBoard(size)
            self._local.fb = fb
        return fb

    def evaluate_position(self, pos, max_moves=0):
        """Full PolicyResult for pos (exact legality, superko included)."""
        fb = self._board(pos.size)
        fb.load_position(pos)
        logits, n, caps = fb.eval_logits_caps()
        if n == 0:
            return PolicyResult(())
        # The kernel knows the one-move ko only.  Whole-game repetition:
        # a quiet move adds one stone, so its grid hash is one xor away
        # and an O(1) history lookup settles it; only capturing moves pay
        # for the full legality check.  A fresh position (history holds
        # just the current grid) cannot repeat anything.
        if len(pos.hash_history) > 1:
            keys, _ = zobrist.tables(pos.size)
            ktab = keys[pos.to_move - 1]
            gh = pos.grid_hash
            hist = pos.hash_history
            for m in np.nonzero(np.isfinite(logits))[0]:
                m = int(m)
                if caps[m]:
                    if not pos.is_legal(m):
                        logits[m] = -np.inf
                elif (gh ^ int(ktab[m])) in hist:
                    logits[m] = -np.inf
        entries = _softmax_entries(logits)
        if max_moves and max_moves > 0:
            entries = entries[:max_moves]
        return PolicyResult(entries)

    def evaluate_batch(self, requests):
        if not requests:
            raise ValueError("batch must hold at least one request")
        out = []
        for req in requests:
            logits = self._logits_from_planes(req.planes)
            entries = _softmax_entries(logits)
            if req.max_moves > 0:
                entries = entries[:req.max_moves]
            out.append(EvaluatorResponse(req.id, entries))
        return out

    def _logits_from_planes(self, planes):
        """Recover board state from the tensor (the mover is always 'our')
        and score it.  History argmaxes name the latest surviving stone per
        side, standing in for the last/previous move points."""
        size = planes.shape[-1]
        grid = np.zeros(size * size, dtype=np.int8)
        grid[planes[features.OUR_STONES].ravel() > 0.5] = BLACK
        grid[planes[features.OPP_STONES].ravel() > 0.5] = WHITE
        fb = self._board(size)
        ko = 0
        kp = planes[features.KO].ravel()
        if kp.max() > 0.5:
            ko = fb.pad(int(kp.argmax()))
        last = 0
        oh = planes[features.OPP_HISTORY].ravel()
        if oh.max() > 0.0:
            last = fb.pad(int(oh.argmax()))
        prev = 0
        sh = planes[features.OUR_HISTORY].ravel()
        if sh.max() > 0.0:
            prev = fb.pad(int(sh.argmax()))
        fastboard.load(fb.S, grid, BLACK, ko, last, prev, 0, 0)
        logits, _ = fb.eval_logits()
        return logits


def baseline_policy(pos):
    """Deterministic heuristic distribution over pos's legal place moves."""
    return BuiltinEvaluator().evaluate_position(pos)


# -- wire protocol -----------------------------------------------------------

def encode_request(req):
    blob = base64.b64encode(req.planes.astype("<f4").tobytes()).decode("ascii")
    obj = {"id": req.id, "size": req.size, "set": req.feature_set,
           "planes": blob, "max_moves": req.max_moves}
    return (json.dumps(obj, separators=(",", ":")) + "\n").encode("ascii")


def decode_request(line):
    obj = json.loads(line)
    raw = base64.b64decode(obj["planes"])
    size = int(obj["size"])
    n = len(raw) // (4 * size * size)
    planes = np.frombuffer(raw, dtype="<f4").reshape(n, size, size)
    return EvaluatorRequest(obj["id"], size, obj["set"], planes,
                            obj["max_moves"])


def encode_response(resp, error=None):
    obj = {"id": resp.id,
           "moves": [{"c": m, "p": p} for m, p in resp.entries]}
    if error:
        obj["error"] = str(error)
    return (json.dumps(obj, separators=(",", ":")) + "\n").encode("ascii")


def decode_response(line):
    obj = json.loads(line)
    if obj.get("error"):
        raise EvaluatorUnavailable(f"service error: {obj['error']}")
    entries = [(int(mv["c"]), float(mv["p"])) for mv in obj["moves"]]
    return EvaluatorResponse(obj["id"], entries)


def encode_hello(planes=features.N_EXTENDED):
    return (json.dumps({"proto": PROTO_VERSION, "planes": planes},
                       separators=(",", ":")) + "\n").encode("ascii")


class RemoteEvaluator:
    """Blocking client for the TCP policy service.  One connection, one
    in-flight batch at a time; any wire trouble surfaces as
    EvaluatorUnavailable and drops the connection for a clean retry."""

    def __init__(self, host, port, timeout=DEFAULT_TIMEOUT):
        self.host = host
        self.port = port
        self.timeout = timeout
        self.server_planes = None
        self._sock = None
        self._file = None
        self._lock = threading.Lock()

    def _connect(self):
        try:
            sock = socket.create_connection((self.host, self.port),
                                            timeout=self.timeout)
            sock.settimeout(self.timeout)
            f = sock.makefile("rwb")
            hello = json.loads(f.readline())
        except (OSError, ValueError) as err:
            raise EvaluatorUnavailable(f"connect to {self.host}:{self.port} "
                                       f"failed: {err}") from err
        if hello.get("proto") != PROTO_VERSION:
            sock.close()
            raise EvaluatorUnavailable(f"unsupported protocol: {hello}")
        self.server_planes = int(hello.get("planes", 0))
        self._sock, self._file = sock, f

    def close(self):
        with self._lock:
            if self._sock is not None:
                try:
                    self._sock.close()
                finally:
                    self._sock, self._file = None, None

    def evaluate_batch(self, requests):
        if not requests:
            raise ValueError("batch must hold at least one request")
        with self._lock:
            if self._sock is None:
                self._connect()
            try:
                for req in requests:
                    self._file.write(encode_request(req))
                self._file.flush()
                pending = {req.id: None for req in requests}
                got = 0
                while got < len(requests):
                    line = self._file.readline()
                    if not line:
                        raise EvaluatorUnavailable("connection closed")
                    resp = decode_response(line)
                    if resp.id not in pending or pending[resp.id] is not None:
                        raise EvaluatorUnavailable(
                            f"unexpected response id {resp.id}")
                    pending[resp.id] = resp
                    got += 1
            except EvaluatorUnavailable:
                self._drop()
                raise
            except (OSError, ValueError, KeyError) as err:
                self._drop()
                raise EvaluatorUnavailable(f"wire failure: {err}") from err
            return [pending[req.id] for req in requests]

    def _drop(self):
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        self._sock, self._file = None, None


class _Slot:
    __slots__ = ("request", "response", "error", "event", "born")

    def __init__(self, request):
        self.request = request
        self.response = None
        self.error = None
        self.event = threading.Event()
        self.born = time.monotonic()


class BatchingClient:
    """Front for concurrent search workers: individual evaluate() calls are
    aggregated for up to `window` seconds or `cap` requests, sent as one
    batch, and each caller is woken with its own response."""

    def __init__(self, evaluator, window=BATCH_WINDOW, cap=BATCH_CAP):
        self.evaluator = evaluator
        self.window = window
        self.cap = cap
        self.batches_sent = 0
        self.largest_batch = 0
        self._lock = threading.Lock()
        self._pending = []
        self._stop = False
        self._thread = threading.Thread(target=self._pump, daemon=True)
        self._thread.start()

    def evaluate(self, request, timeout=None):
        """Blocking single evaluation, batched behind the scenes."""
        slot = _Slot(request)
        with self._lock:
            self._pending.append(slot)
        wait = timeout if timeout is not None else \
            getattr(self.evaluator, "timeout", DEFAULT_TIMEOUT) + 10 * self.window + 1.0
        if not slot.event.wait(wait):
            raise EvaluatorUnavailable("batched evaluation timed out")
        if slot.error is not None:
            raise slot.error
        return slot.response

    def evaluate_batch(self, requests):
        return self.evaluator.evaluate_batch(requests)

    def stop(self):
        self._stop = True
        self._thread.join(timeout=1.0)

    def _pump(self):
        while not self._stop:
            batch = None
            with self._lock:
                if self._pending:
                    full = len(self._pending) >= self.cap
                    oldest = self._pending[0].born
                    if full or time.monotonic() - oldest >= self.window:
                        batch = self._pending[:self.cap]
                        self._pending = self._pending[self.cap:]
            if batch is None:
                time.sleep(self.window / 4)
                continue
            try:
                responses = self.evaluator.evaluate_batch(
                    [s.request for s in batch])
                by_id = {r.id: r for r in responses}
                for s in batch:
                    s.response = by_id.get(s.request.id)
                    if s.response is None:
                        s.error = EvaluatorUnavailable(
                            f"no response for id {s.request.id}")
            except Exception as err:
                for s in batch:
                    s.error = err
            self.batches_sent += 1
            self.largest_batch = max(self.largest_batch, len(batch))
            for s in batch:
                s.event.set()
