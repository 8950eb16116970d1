"""Fully convolutional move-prediction network.

A shared trunk of ReLU convolutions (5x5 first, 3x3 after, no pooling so
the board geometry survives to the output) feeds one 1x1 softmax head per
prediction step: head i predicts the board cell of the i-th move ahead.
Only convolutions appear, so one checkpoint runs on any board size; the
declared size is just the training default.
"""

import torch
import torch.nn as nn
import torch.nn.functional as tf


class NetConfig:
    def __init__(self, depth=4, width=64, planes=25, steps=3, size=9):
        if depth < 2:
            raise ValueError("depth must be at least 2")
        if steps < 1:
            raise ValueError("steps must be at least 1")
        if planes not in (21, 25):
            raise ValueError("planes must be 21 or 25")
        self.depth = depth
        self.width = width
        self.planes = planes
        self.steps = steps
        self.size = size

    @property
    def feature_set(self):
        return "standard" if self.planes == 21 else "extended"

    def to_dict(self):
        return {"depth": self.depth, "width": self.width,
                "planes": self.planes, "steps": self.steps, "size": self.size}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


class PolicyNet(nn.Module):
    def __init__(self, cfg):
        super().__init__()
        self.cfg = cfg
        convs = [nn.Conv2d(cfg.planes, cfg.width, 5, padding=2)]
        for _ in range(cfg.depth - 1):
            convs.append(nn.Conv2d(cfg.width, cfg.width, 3, padding=1))
        self.convs = nn.ModuleList(convs)
        self.heads = nn.ModuleList(
            nn.Conv2d(cfg.width, 1, 1) for _ in range(cfg.steps))

    def forward(self, x):
        """Logits per step, each (batch, cells)."""
        for conv in self.convs:
            x = tf.relu(conv(x))
        b = x.shape[0]
        return [head(x).reshape(b, -1) for head in self.heads]

    def probabilities(self, x):
        """Per-step softmax over all cells; rows sum to 1."""
        with torch.no_grad():
            return [tf.softmax(lg, dim=1) for lg in self.forward(x)]


def make_model(cfg, seed=None):
    if seed is not None:
        torch.manual_seed(seed)
    return PolicyNet(cfg)


def save_model(model, path):
    torch.save({"config": model.cfg.to_dict(),
                "state": model.state_dict()}, path)


def load_model(path):
    blob = torch.load(path, map_location="cpu", weights_only=True)
    model = PolicyNet(NetConfig.from_dict(blob["config"]))
    model.load_state_dict(blob["state"])
    model.eval()
    return model
