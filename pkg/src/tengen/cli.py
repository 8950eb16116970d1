"""Console entry point: parse engine flags, build the search config and
evaluator, and hand stdio to the GTP loop."""

import argparse
import sys
from urllib.parse import urlsplit

from . import features, gtp, mcts, policy


def make_evaluator(spec):
    """`builtin` keeps the in-process baseline; `tcp://host:port` talks to
    a policy service, batched so search threads share the connection."""
    if spec == "builtin":
        return None
    if spec.startswith("tcp://"):
        parts = urlsplit(spec)
        if not parts.hostname or not parts.port:
            raise ValueError("evaluator needs tcp://host:port")
        return policy.BatchingClient(
            policy.RemoteEvaluator(parts.hostname, parts.port))
    raise ValueError("evaluator must be 'builtin' or tcp://host:port")


def build_parser():
    p = argparse.ArgumentParser(
        prog="tengen",
        description="Go engine speaking GTP on stdin/stdout.")
    p.add_argument("--rollouts", type=int, default=1000,
                   help="playouts per genmove (default 1000)")
    p.add_argument("--threads", type=int, default=1,
                   help="search worker threads (default 1)")
    p.add_argument("--sigma", type=float, default=0.05,
                   help="selection noise range (default 0.05)")
    p.add_argument("--topk", type=int, default=20,
                   help="max children per expansion (default 20)")
    p.add_argument("--min-moves", type=int, default=1,
                   help="min children per expansion (default 1)")
    p.add_argument("--threshold", type=float, default=0.8,
                   help="cumulative probability kept at expansion")
    p.add_argument("--komi", type=float, default=7.5)
    p.add_argument("--evaluator", default="builtin",
                   help="'builtin' or tcp://host:port policy service")
    p.add_argument("--seed", type=int, default=0,
                   help="master seed; 0 draws one at random")
    p.add_argument("--ponder", action="store_true",
                   help="keep searching between commands")
    p.add_argument("--feature-set",
                   choices=(features.STANDARD, features.EXTENDED),
                   default=features.EXTENDED,
                   help="planes sent to a remote evaluator")
    p.add_argument("--log-search", metavar="PATH", default=None,
                   help="append one JSON line of search stats per genmove")
    return p


def config_from_args(args):
    return mcts.SearchConfig(
        rollouts=args.rollouts, threads=args.threads, sigma=args.sigma,
        max_children=args.topk, min_children=args.min_moves,
        cumulative_threshold=args.threshold, komi=args.komi,
        seed=args.seed, pondering=args.ponder,
        feature_set=args.feature_set)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        evaluator = make_evaluator(args.evaluator)
    except ValueError as err:
        print("tengen: %s" % (err,), file=sys.stderr)
        return 2
    try:
        gtp.serve(cfg=cfg, evaluator=evaluator,
                  log_path=args.log_search)
    finally:
        if evaluator is not None:
            evaluator.stop()
            evaluator.evaluator.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
