"""Vanilla SGD training loop for the prediction network.

The loss is the sum of the per-step cross entropies, weighted equally.
The learning rate starts high and is divided by a fixed factor whenever
the smoothed loss stops improving.  An epoch is a fixed number of
minibatches (a checkpoint and log boundary, nothing else); diverging to
NaN aborts with a diagnostic instead of training on garbage.
"""

import json
import math
import pathlib
import time

import numpy as np
import torch

from . import net, sampler


class TrainingDiverged(RuntimeError):
    pass


class TrainConfig:
    def __init__(self, batch_size=256, pool_size=300, lr=0.05, lr_factor=5.0,
                 stall_window=200, minibatches=2000, epoch=10_000,
                 augment=True, seed=0):
        values = {"batch_size": batch_size, "pool_size": pool_size,
                  "lr": lr, "lr_factor": lr_factor,
                  "stall_window": stall_window, "minibatches": minibatches,
                  "epoch": epoch}
        for name, value in values.items():
            if value <= 0:
                raise ValueError("%s must be positive" % name)
        self.batch_size = batch_size
        self.pool_size = pool_size
        self.lr = lr
        self.lr_factor = lr_factor
        self.stall_window = stall_window
        self.minibatches = minibatches
        self.epoch = epoch
        self.augment = augment
        self.seed = seed


def _top1(logits, targets):
    return float((logits.argmax(dim=1) == targets).float().mean())


def train(games, net_cfg, train_cfg, out_dir=None, log=None):
    """Train a fresh model on the games; returns (model, history).

    history is a list of per-log-interval dicts: step, lr, loss per head,
    Top-1 of the first head on recent batches.  Checkpoints land in
    out_dir per epoch plus a final model.pt.
    """
    torch.manual_seed(train_cfg.seed)
    torch.set_num_threads(max(1, torch.get_num_threads()))
    model = net.PolicyNet(net_cfg)
    model.train()
    opt = torch.optim.SGD(model.parameters(), lr=train_cfg.lr)
    rng = np.random.default_rng(train_cfg.seed)
    pool = sampler.GamePool(games, net_cfg.steps, train_cfg.pool_size,
                            rng, train_cfg.augment, net_cfg.feature_set)
    if out_dir is not None:
        out_dir = pathlib.Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

    history = []
    recent_loss = []
    recent_top1 = []
    window_means = []
    lr = train_cfg.lr
    t0 = time.monotonic()
    for step in range(1, train_cfg.minibatches + 1):
        x, y = sampler.sample_minibatch(pool, train_cfg.batch_size)
        xt = torch.from_numpy(x)
        yt = torch.from_numpy(y)
        logits = model(xt)
        losses = [torch.nn.functional.cross_entropy(lg, yt[i])
                  for i, lg in enumerate(logits)]
        loss = sum(losses)
        if not math.isfinite(float(loss)):
            raise TrainingDiverged(
                "loss became %r at step %d (lr %g); lower the learning rate"
                % (float(loss), step, lr))
        opt.zero_grad()
        loss.backward()
        opt.step()

        recent_loss.append([float(l) for l in losses])
        recent_top1.append(_top1(logits[0].detach(), yt[0]))
        if step % train_cfg.stall_window == 0:
            window = float(np.mean([sum(r) for r in recent_loss]))
            window_means.append(window)
            # stalled: no improvement over the previous window
            if len(window_means) >= 2 and window >= window_means[-2] - 1e-3:
                lr /= train_cfg.lr_factor
                for pg in opt.param_groups:
                    pg["lr"] = lr
            entry = {"step": step, "lr": lr,
                     "loss": [round(float(np.mean([r[i] for r in recent_loss])), 4)
                              for i in range(net_cfg.steps)],
                     "top1": round(float(np.mean(recent_top1)), 4),
                     "elapsed_s": round(time.monotonic() - t0, 1)}
            history.append(entry)
            if log is not None:
                log(json.dumps(entry))
            recent_loss.clear()
            recent_top1.clear()
        if out_dir is not None and step % train_cfg.epoch == 0:
            net.save_model(model, out_dir / ("epoch-%03d.pt" % (step // train_cfg.epoch)))

    model.eval()
    if out_dir is not None:
        net.save_model(model, out_dir / "model.pt")
        (out_dir / "history.json").write_text(json.dumps(history, indent=1))
    return model, history


def trunk_gradient_norms(games, net_cfg, target_steps=None, steps=40,
                         batch_size=64, seed=0):
    """Mean gradient norm of each trunk convolution over `steps` batches.

    Batches are drawn with `target_steps` recorded moves per sample (at
    least the model's own step count), so configs differing only in head
    count see bit-identical inputs for the same seed and corpus; each
    model consumes the first cfg.steps target rows.  The per-layer norms
    localize where the training signal lands."""
    if target_steps is None:
        target_steps = net_cfg.steps
    if target_steps < net_cfg.steps:
        raise ValueError("target_steps must cover the model's steps")
    rng = np.random.default_rng(seed)
    pool = sampler.GamePool(games, target_steps, 100, rng, True,
                            net_cfg.feature_set)
    batches = [sampler.sample_minibatch(pool, batch_size)
               for _ in range(steps)]

    torch.manual_seed(seed)
    model = net.PolicyNet(net_cfg)
    model.train()
    opt = torch.optim.SGD(model.parameters(), lr=0.02)
    sums = np.zeros(len(model.convs))
    for x, y in batches:
        xt = torch.from_numpy(x)
        yt = torch.from_numpy(y)
        logits = model(xt)
        n = min(net_cfg.steps, yt.shape[0])
        loss = sum(torch.nn.functional.cross_entropy(lg, yt[i])
                   for i, lg in enumerate(logits[:n]))
        opt.zero_grad()
        loss.backward()
        for i, conv in enumerate(model.convs):
            sums[i] += float(conv.weight.grad.norm())
        opt.step()
    return sums / steps
