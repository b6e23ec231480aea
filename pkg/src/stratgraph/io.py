"""Writers for edge lists, key-value sidecars and CSV exports."""
from __future__ import annotations

import csv
import os
from pathlib import Path

import numpy as np

from .graph import Graph
from .metrics import MetricsReport, ccdf


def write_edge_list(g: Graph, path, header: str | None = None) -> None:
    """Write ``g`` in SNAP format using original ids, one ``u<TAB>v`` line per edge."""
    e = g.external_edges()
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if header:
            for line in header.splitlines():
                f.write(f"# {line}\n")
        f.write(f"# Nodes: {g.node_count} Edges: {g.edge_count}\n")
        for u, v in e.tolist():
            f.write(f"{u}\t{v}\n")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (list, tuple, np.ndarray)):
        return ",".join(_fmt(x) for x in v)
    return str(v)


def write_kv(path, items: dict) -> None:
    """Flat ``key = value`` text file; lists are comma-joined."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for k, v in items.items():
            f.write(f"{k} = {_fmt(v)}\n")


def read_kv(path) -> dict[str, str]:
    """Parse a ``key = value`` file. ``#`` starts a comment line."""
    out = {}
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def sample_metadata(result) -> dict:
    meta = {
        "algorithm": result.spec.algorithm.value,
        "fraction": result.spec.fraction,
        "seed": result.spec.seed,
        "node_count": result.subgraph.node_count,
        "edge_count": result.subgraph.edge_count,
    }
    if result.spec.algorithm.value == "FFS":
        meta["ffs_forward_prob"] = result.spec.ffs_forward_prob
    for key in ("k", "strata_sizes", "quotas", "taken", "drawn_edges", "fires", "trimmed"):
        if key in result.details:
            meta[key] = result.details[key]
    meta["elapsed_ms"] = round(result.elapsed_ms, 3)
    return meta


def write_sample(result, out_dir, stem: str = "sample") -> tuple[Path, Path]:
    """Edge list plus ``.meta`` sidecar for a sample. Returns both paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    edges_path = out_dir / f"{stem}.txt"
    meta_path = out_dir / f"{stem}.meta"
    spec = result.spec
    write_edge_list(result.subgraph, edges_path,
                    header=f"Sample: {spec.algorithm.value} fraction={spec.fraction} seed={spec.seed}")
    write_kv(meta_path, sample_metadata(result))
    return edges_path, meta_path


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(x) if not isinstance(x, str) else x for x in r])


def write_metrics(report: MetricsReport, out_dir, name: str = "metrics") -> None:
    """``metrics.csv`` (one row), ``metrics.txt`` (key-value) and distribution CSVs."""
    out_dir = Path(out_dir)
    (out_dir / "distributions").mkdir(parents=True, exist_ok=True)
    scalars = report.scalars()
    write_csv(out_dir / f"{name}.csv", list(scalars), [list(scalars.values())])
    write_kv(out_dir / f"{name}.txt", scalars)
    pmf = report.degree_distribution
    write_csv(out_dir / "distributions" / "degree.csv", ["degree", "probability"],
              sorted(pmf.items()))
    write_csv(out_dir / "distributions" / "degree_ccdf.csv", ["degree", "ccdf"],
              sorted(ccdf(pmf).items()))
    edges = report.cc_bin_edges
    write_csv(out_dir / "distributions" / "clustering.csv",
              ["bin_low", "bin_high", "probability"],
              [(edges[i], edges[i + 1], p) for i, p in enumerate(report.cc_distribution)])


def ensure_writable_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise PermissionError(f"output directory {path} is not writable")
    return path
