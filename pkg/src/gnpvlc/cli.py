"""Command-line entry point: ``gnpvlc <command> [options]``.

Commands and their output tables:

heatmap     ``heatmap_<scheme>.csv``: Eve position, Bob's angle, SINRs, rates, secrecy rate.
gap-hist    ``gap_samples.csv`` and ``gap_histogram.csv``.
bob-sweep   ``bob_sweep.csv``: secrecy rate along Bob's x position, four GNP cases and baseline.
ser         ``ser.csv``: Bob and Eve SER per Eve location, power and scheme.
multi-eve   ``multi_eve_<scheme>.csv``: secrecy rate against all eavesdroppers.

Each CSV is accompanied by a JSON manifest with the config echo and content hash.
"""

import argparse
import sys

from .config import ConfigError, ExperimentConfig, load_config
from .experiments import run_bob_sweep, run_gap_histogram, run_heatmap, run_multi_eve, run_ser, write_result

COMMANDS = {
    "heatmap": run_heatmap,
    "gap-hist": run_gap_histogram,
    "bob-sweep": run_bob_sweep,
    "ser": run_ser,
    "multi-eve": run_multi_eve,
}


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="gnpvlc", description="GNP-empowered secure VLC experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--seed", type=_u64)
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--scheme", choices=("gnp", "baseline"))
        p.add_argument("--threads", type=_positive)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        changes = {k: getattr(args, k) for k in ("seed", "scheme", "threads") if getattr(args, k) is not None}
        if changes:
            cfg = cfg.replace(**changes)
        results = COMMANDS[args.command](cfg)
    except (ConfigError, OSError) as exc:
        print(f"gnpvlc: error: {exc}", file=sys.stderr)
        return 2
    if not isinstance(results, tuple):
        results = (results,)
    for r in results:
        csv_path, _ = write_result(r, args.out, cfg, args.command)
        print(csv_path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
