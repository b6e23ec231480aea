"""Command line entry point: ``stratgraph {sample,metrics,cluster-eval,bench}``.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bench
from .graph import ParseError, degrees, load_edge_list
from .io import ensure_writable_dir, write_csv, write_metrics, write_sample
from .metrics import compute_metrics
from .samplers import DEFAULT_FORWARD_PROB, Algorithm, SampleSpec, sample
from .strata import Stratum, silhouette_sweep, stratify_by_degree

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fraction(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("fraction must lie in (0, 1]")
    return v


def _algorithm(text: str) -> Algorithm:
    try:
        return Algorithm.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load(path):
    g = load_edge_list(path)
    if g.node_count == 0:
        raise ValueError(f"{path}: graph is empty")
    return g


def cmd_sample(args) -> int:
    g = _load(args.input)
    spec = SampleSpec(args.algorithm, args.fraction, args.seed, args.ffs_forward_prob)
    res = sample(g, spec)
    edges, meta = write_sample(res, ensure_writable_dir(args.out))
    print(f"{spec.algorithm.value}: {res.subgraph.node_count} nodes, "
          f"{res.subgraph.edge_count} edges -> {edges}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    g = _load(args.input)
    report = compute_metrics(g, args.diameter_mode, seed=args.seed)
    write_metrics(report, ensure_writable_dir(args.out))
    for k, v in report.scalars().items():
        print(f"{k}: {v:.4g}" if isinstance(v, float) else f"{k}: {v}")
    return EXIT_OK


def cmd_cluster_eval(args) -> int:
    if not 2 <= args.k_min <= args.k_max:
        raise UsageError("need 2 <= --k-min <= --k-max")
    g = _load(args.input)
    d = degrees(g)
    out = ensure_writable_dir(args.out)
    sweep = silhouette_sweep(d, range(args.k_min, args.k_max + 1), seed=args.seed)
    write_csv(out / "silhouette.csv", ["k", "avg_silhouette"], sweep)
    strata = stratify_by_degree(d, seed=args.seed)
    sizes = strata.sizes()
    rows = [(s.name.capitalize(), int(sizes[s]), 100.0 * sizes[s] / len(d)) for s in Stratum]
    write_csv(out / "strata.csv", ["stratum", "count", "percent"], rows)
    for k, s in sweep:
        print(f"k={k}: avg silhouette {s:.4f}")
    print("strata (k=3): " + ", ".join(f"{n} {p:.2f}%" for n, _, p in rows))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        cfg = bench.ExperimentConfig.from_file(
            args.config, repetitions=args.reps, output_dir=args.out, seed=args.seed,
            diameter_mode=args.diameter_mode, workers=args.workers)
    except bench.ConfigError as exc:
        raise UsageError(str(exc)) from None
    try:
        outcome = bench.run_bench(cfg)
    except bench.ConfigError as exc:
        raise UsageError(str(exc)) from None
    print(f"{outcome.computed} repetitions run, {outcome.skipped} reused, "
          f"{outcome.failed} failed -> {outcome.experiment_csv}")
    return EXIT_FAILURE if outcome.failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stratgraph", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sample", help="draw one sample and write it as an edge list")
    s.add_argument("--input", required=True, type=Path)
    s.add_argument("--algorithm", required=True, type=_algorithm)
    s.add_argument("--fraction", required=True, type=_fraction)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--ffs-forward-prob", type=float, default=DEFAULT_FORWARD_PROB)
    s.add_argument("--out", required=True, type=Path)
    s.set_defaults(func=cmd_sample)

    m = sub.add_parser("metrics", help="topological statistics of a graph")
    m.add_argument("--input", required=True, type=Path)
    m.add_argument("--diameter-mode", choices=("exact", "auto"), default="auto")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", required=True, type=Path)
    m.set_defaults(func=cmd_metrics)

    c = sub.add_parser("cluster-eval", help="silhouette sweep and k=3 strata proportions")
    c.add_argument("--input", required=True, type=Path)
    c.add_argument("--k-min", type=int, default=2)
    c.add_argument("--k-max", type=int, default=6)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True, type=Path)
    c.set_defaults(func=cmd_cluster_eval)

    b = sub.add_parser("bench", help="run a benchmark grid from a config file")
    b.add_argument("--config", required=True, type=Path)
    b.add_argument("--reps", type=int)
    b.add_argument("--seed", type=int)
    b.add_argument("--out", type=str)
    b.add_argument("--diameter-mode", choices=("exact", "auto"))
    b.add_argument("--workers", type=int)
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"stratgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError, ValueError) as exc:
        print(f"stratgraph: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
