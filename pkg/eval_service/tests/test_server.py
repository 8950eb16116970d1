"""Wire protocol server: handshake, batching, masking, error handling."""

import base64
import json
import socket
import threading

import numpy as np
import pytest
import torch

from eval_service.goban import Goban
from eval_service import feats, net, server


@pytest.fixture(scope="module")
def served():
    model = net.make_model(net.NetConfig(depth=2, width=16, steps=2), seed=7)
    srv = server.PolicyServer(model, port=0).start()
    yield srv
    srv.stop()


class Client:
    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=10)
        self.file = self.sock.makefile("rwb")
        self.hello = json.loads(self.file.readline())

    def send_raw(self, text):
        self.file.write(text.encode("ascii"))
        self.file.flush()

    def request(self, rid, planes, size=9, max_moves=0, send_only=False):
        blob = base64.b64encode(
            np.asarray(planes, dtype="<f4").tobytes()).decode("ascii")
        obj = {"id": rid, "size": size, "set": "extended", "planes": blob,
               "max_moves": max_moves}
        self.send_raw(json.dumps(obj) + "\n")
        if not send_only:
            return self.read()

    def read(self):
        return json.loads(self.file.readline())

    def close(self):
        self.sock.close()


def board_planes(moves=()):
    g = Goban(9)
    for mv in moves:
        g.play(mv)
    return g, feats.extract(g)


class TestProtocol:
    def test_hello(self, served):
        c = Client(served.port)
        assert c.hello == {"proto": 1, "planes": 25}
        c.close()

    def test_basic_response(self, served):
        g, planes = board_planes((40, 41))
        c = Client(served.port)
        resp = c.request(17, planes)
        c.close()
        assert resp["id"] == 17
        moves = resp["moves"]
        assert len(moves) == 79  # all empty cells
        cells = [m["c"] for m in moves]
        assert 40 not in cells and 41 not in cells
        ps = [m["p"] for m in moves]
        assert abs(sum(ps) - 1.0) < 1e-5
        assert all(ps[i] >= ps[i + 1] for i in range(len(ps) - 1))
        # ties broken by ascending cell
        for i in range(len(ps) - 1):
            if ps[i] == ps[i + 1]:
                assert cells[i] < cells[i + 1]

    def test_max_moves(self, served):
        _, planes = board_planes()
        c = Client(served.port)
        resp = c.request(1, planes, max_moves=5)
        c.close()
        assert len(resp["moves"]) == 5

    def test_same_tensor_identical_probabilities(self, served):
        _, planes = board_planes((10, 20, 30))
        c = Client(served.port)
        a = c.request(1, planes)
        b = c.request(2, planes)
        c.close()
        assert a["moves"] == b["moves"]

    def test_malformed_then_valid_on_same_connection(self, served):
        c = Client(served.port)
        c.send_raw("this is not json\n")
        err = c.read()
        assert err.get("error")
        c.send_raw(json.dumps({"id": 3, "size": 9, "set": "extended",
                               "planes": "AAAA", "max_moves": 0}) + "\n")
        err2 = c.read()
        assert err2["id"] == 3 and err2.get("error")
        _, planes = board_planes()
        ok = c.request(4, planes)
        c.close()
        assert ok["id"] == 4 and "error" not in ok

    def test_wrong_plane_count_rejected(self, served):
        c = Client(served.port)
        resp = c.request(9, np.zeros((21, 9, 9)))
        c.close()
        assert "21" in resp["error"]

    def test_hundred_in_flight_ids_match(self, served):
        _, planes = board_planes((2, 12))
        c = Client(served.port)
        for rid in range(100, 200):
            c.request(rid, planes, send_only=True)
        got = {c.read()["id"] for _ in range(100)}
        c.close()
        assert got == set(range(100, 200))

    def test_concurrent_connections(self, served):
        _, planes = board_planes((5,))
        results = {}
        lock = threading.Lock()

        def worker(rid):
            c = Client(served.port)
            resp = c.request(rid, planes)
            c.close()
            with lock:
                results[rid] = resp["id"]

        threads = [threading.Thread(target=worker, args=(i,))
                   for i in range(12)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert results == {i: i for i in range(12)}


class TestMasking:
    def test_probabilities_follow_model_softmax(self, served):
        g, planes = board_planes((40,))
        with torch.no_grad():
            raw = torch.softmax(
                served.model(torch.from_numpy(planes[None]))[0], dim=1)[0]
        raw = raw.numpy().astype(np.float64)
        empty = planes[9].reshape(-1) == 1.0
        want = raw[empty] / raw[empty].sum()
        c = Client(served.port)
        resp = c.request(1, planes)
        c.close()
        got = {m["c"]: m["p"] for m in resp["moves"]}
        idx = np.nonzero(empty)[0]
        for cell, p in zip(idx, want):
            assert got[int(cell)] == pytest.approx(p, rel=1e-6)
