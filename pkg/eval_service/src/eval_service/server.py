"""TCP inference server for the engine's evaluator protocol.

Newline-delimited JSON over a plain socket.  On connect the server greets
with {"proto": 1, "planes": N}; each request line carries an id, board
size, feature-set name, base64 little-endian float32 planes, and
max_moves; each response repeats the id and lists moves as {"c": cell,
"p": probability}, highest probability first, ties broken by cell index.
Probabilities come from the first prediction head, masked to the empty
intersections of the request's own empty plane and renormalized; final
legality stays the engine's job.  A malformed line gets a response with
an "error" field and the connection stays open.

Requests from all connections funnel into one queue; a single worker
drains it in small time-boxed batches so concurrent clients share one
forward pass.
"""

import base64
import json
import socket
import threading
import time
from collections import deque

import numpy as np
import torch

PROTO_VERSION = 1
EMPTY_PLANE = 9


class _Pending:
    __slots__ = ("conn", "wlock", "rid", "planes", "size", "max_moves")

    def __init__(self, conn, wlock, rid, planes, size, max_moves):
        self.conn = conn
        self.wlock = wlock
        self.rid = rid
        self.planes = planes
        self.size = size
        self.max_moves = max_moves


def _send(conn, wlock, obj):
    data = (json.dumps(obj, separators=(",", ":")) + "\n").encode("ascii")
    try:
        with wlock:
            conn.sendall(data)
    except OSError:
        pass


class PolicyServer:
    def __init__(self, model, host="127.0.0.1", port=0, batch_cap=128,
                 batch_window=0.002):
        torch.set_num_threads(1)  # reproducible probabilities
        self.model = model.eval()
        self.batch_cap = batch_cap
        self.batch_window = batch_window
        self._stop = threading.Event()
        self._cond = threading.Condition()
        self._queue = deque()
        self._listener = socket.create_server((host, port))
        self.host, self.port = self._listener.getsockname()[:2]
        self._threads = []

    # -- lifecycle --------------------------------------------------------

    def start(self):
        for fn in (self._accept_loop, self._worker_loop):
            t = threading.Thread(target=fn, daemon=True)
            t.start()
            self._threads.append(t)
        return self

    def stop(self):
        self._stop.set()
        try:
            self._listener.close()
        except OSError:
            pass
        with self._cond:
            self._cond.notify_all()
        for t in self._threads:
            t.join(timeout=2.0)

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

    # -- socket side ------------------------------------------------------

    def _accept_loop(self):
        while not self._stop.is_set():
            try:
                conn, _ = self._listener.accept()
            except OSError:
                return
            t = threading.Thread(target=self._client_loop, args=(conn,),
                                 daemon=True)
            t.start()

    def _client_loop(self, conn):
        wlock = threading.Lock()
        _send(conn, wlock, {"proto": PROTO_VERSION,
                            "planes": self.model.cfg.planes})
        f = conn.makefile("rb")
        try:
            for line in f:
                if self._stop.is_set():
                    break
                self._handle_line(conn, wlock, line)
        finally:
            try:
                conn.close()
            except OSError:
                pass

    def _handle_line(self, conn, wlock, line):
        rid = 0
        try:
            obj = json.loads(line)
            rid = int(obj.get("id", 0))
            size = int(obj["size"])
            raw = base64.b64decode(obj["planes"])
            if size <= 0 or len(raw) % (4 * size * size):
                raise ValueError("planes blob does not tile the board")
            n = len(raw) // (4 * size * size)
            if n != self.model.cfg.planes:
                raise ValueError("expected %d planes, got %d"
                                 % (self.model.cfg.planes, n))
            planes = np.frombuffer(raw, dtype="<f4").reshape(n, size, size)
            max_moves = int(obj.get("max_moves", 0))
        except (ValueError, KeyError, TypeError) as err:
            _send(conn, wlock, {"id": rid, "moves": [], "error": str(err)})
            return
        item = _Pending(conn, wlock, rid, planes, size, max_moves)
        with self._cond:
            self._queue.append(item)
            self._cond.notify()

    # -- inference side ---------------------------------------------------

    def _worker_loop(self):
        while True:
            with self._cond:
                while not self._queue and not self._stop.is_set():
                    self._cond.wait(0.1)
                if self._stop.is_set() and not self._queue:
                    return
                batch = [self._queue.popleft()]
            deadline = time.monotonic() + self.batch_window
            while len(batch) < self.batch_cap:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                with self._cond:
                    if not self._queue:
                        self._cond.wait(remaining)
                    if self._queue:
                        batch.append(self._queue.popleft())
            self._answer(batch)

    def _answer(self, batch):
        by_size = {}
        for item in batch:
            by_size.setdefault(item.size, []).append(item)
        for items in by_size.values():
            x = torch.from_numpy(np.stack([it.planes for it in items]))
            with torch.no_grad():
                probs = torch.softmax(self.model(x)[0], dim=1).numpy()
            for it, row in zip(items, probs):
                _send(it.conn, it.wlock,
                      {"id": it.rid, "moves": self._entries(it, row)})

    def _entries(self, item, row):
        empty = item.planes[EMPTY_PLANE].reshape(-1) == 1.0
        idx = np.nonzero(empty)[0]
        if idx.size == 0:
            return []
        p = row[idx].astype(np.float64)
        total = p.sum()
        if total > 0:
            p /= total
        else:
            p = np.full(idx.size, 1.0 / idx.size)
        order = np.lexsort((idx, -p))
        if item.max_moves:
            order = order[:item.max_moves]
        return [{"c": int(idx[i]), "p": float(p[i])} for i in order]


def serve_forever(model, host, port):
    srv = PolicyServer(model, host, port).start()
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        pass
    finally:
        srv.stop()
    return srv
