"""Console entry point: train a model, serve it, or score its accuracy."""

import argparse
import json
import pathlib
import sys

from . import evaluate, net, server, sgfio, train


def _corpus(path):
    games = sgfio.load_games(sorted(pathlib.Path(path).glob("*.sgf")))
    if not games:
        raise SystemExit("no parseable SGF files under %s" % path)
    return games


def cmd_train(args):
    games = _corpus(args.corpus)
    net_cfg = net.NetConfig(depth=args.depth, width=args.width,
                            planes=args.planes, steps=args.steps,
                            size=games[0].size)
    train_cfg = train.TrainConfig(batch_size=args.batch, lr=args.lr,
                                  minibatches=args.minibatches,
                                  epoch=args.epoch, augment=not args.no_augment,
                                  seed=args.seed)
    print("training on %d games" % len(games))
    train.train(games, net_cfg, train_cfg, out_dir=args.out, log=print)
    print("model written to %s" % (pathlib.Path(args.out) / "model.pt"))
    return 0


def cmd_serve(args):
    model = net.load_model(args.model)
    srv = server.PolicyServer(model, args.host, args.port).start()
    print("serving %d-plane model on %s:%d" % (model.cfg.planes,
                                               srv.host, srv.port))
    try:
        import time
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        pass
    finally:
        srv.stop()
    return 0


def cmd_eval(args):
    model = net.load_model(args.model)
    games = _corpus(args.corpus)
    report = evaluate.evaluate_accuracy(model, games, limit=args.limit)
    report["uniform_top1"] = evaluate.uniform_baseline(
        games, limit=args.limit)["top1"]
    print(json.dumps(report, indent=1))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="evalsvc",
                                description="Neural move-prediction service.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a model on an SGF corpus")
    t.add_argument("--corpus", required=True, help="directory of .sgf files")
    t.add_argument("--out", required=True, help="checkpoint directory")
    t.add_argument("--depth", type=int, default=4)
    t.add_argument("--width", type=int, default=64)
    t.add_argument("--steps", type=int, default=3,
                   help="moves ahead to predict")
    t.add_argument("--planes", type=int, default=25, choices=(21, 25))
    t.add_argument("--batch", type=int, default=256)
    t.add_argument("--lr", type=float, default=0.05)
    t.add_argument("--minibatches", type=int, default=2000)
    t.add_argument("--epoch", type=int, default=10_000,
                   help="minibatches per checkpoint")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--no-augment", action="store_true")
    t.set_defaults(fn=cmd_train)

    s = sub.add_parser("serve", help="serve a model over TCP")
    s.add_argument("--model", required=True)
    s.add_argument("--port", type=int, required=True)
    s.add_argument("--host", default="127.0.0.1")
    s.set_defaults(fn=cmd_serve)

    e = sub.add_parser("eval", help="accuracy of a model on an SGF corpus")
    e.add_argument("--model", required=True)
    e.add_argument("--corpus", required=True)
    e.add_argument("--limit", type=int, default=None,
                   help="stop after this many positions")
    e.set_defaults(fn=cmd_eval)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError) as err:
        print("evalsvc: %s" % (err,), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
