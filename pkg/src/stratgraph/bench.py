"""Repetition harness: algorithm x fraction x repetition grid written to CSV.

Every repetition gets a seed derived from ``(master seed, algorithm,
fraction, repetition)``, so rows do not depend on which other algorithms or
fractions are in the grid, nor on the number of workers. Rows are appended
to ``experiment.csv`` in grid order; a rerun with the same configuration
skips rows already present. ``summary.csv`` is always rebuilt from
``experiment.csv``.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from ._seeding import derive_seed
from .graph import Graph, degrees, load_edge_list
from .io import ensure_writable_dir, read_kv, write_csv, write_kv
from .metrics import (average_clustering, cc_distribution, degree_distribution, density,
                      diameter, histogram_pmf, ks_statistic, sample_degree_estimates)
from .samplers import DEFAULT_FORWARD_PROB, Algorithm, SampleSpec, sample

log = logging.getLogger(__name__)

DEFAULT_FRACTIONS = (0.05, 0.10, 0.15, 0.20, 0.25)
DEFAULT_REPETITIONS = 200
METRIC_NAMES = ("average_degree", "density", "average_clustering", "diameter",
                "degree_estimates", "ks_degree", "ks_cc")

COLUMNS = [
    "dataset", "algorithm", "fraction", "rep", "seed", "status",
    "node_count", "edge_count", "average_degree", "density", "average_clustering",
    "clustering_error", "diameter", "diameter_exact", "sample_mean_degree",
    "stratified_mean_degree", "ks_degree", "ks_cc", "elapsed_ms", "error",
]
TIMING_COLUMNS = ("elapsed_ms",)
NUMERIC_COLUMNS = [
    "node_count", "edge_count", "average_degree", "density", "average_clustering",
    "clustering_error", "diameter", "sample_mean_degree", "stratified_mean_degree",
    "ks_degree", "ks_cc", "elapsed_ms",
]


class ConfigError(ValueError):
    pass


def _split(value: str) -> list[str]:
    return [x.strip() for x in value.split(",") if x.strip()]


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    algorithms: tuple = tuple(Algorithm)
    fractions: tuple = DEFAULT_FRACTIONS
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = 0
    metrics: tuple = METRIC_NAMES
    diameter_mode: str = "auto"
    output_dir: str = "bench_out"
    ffs_forward_prob: float = DEFAULT_FORWARD_PROB
    workers: int = 1

    def __post_init__(self):
        try:
            algs = tuple(Algorithm.parse(a) for a in self.algorithms)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "algorithms", algs)
        object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))
        object.__setattr__(self, "metrics", tuple(self.metrics))
        if not algs:
            raise ConfigError("at least one algorithm required")
        if not self.fractions or any(not 0 < f <= 1 for f in self.fractions):
            raise ConfigError("fractions must all lie in (0, 1]")
        if int(self.repetitions) < 1:
            raise ConfigError("repetitions must be >= 1")
        unknown = set(self.metrics) - set(METRIC_NAMES)
        if unknown:
            raise ConfigError(f"unknown metrics {sorted(unknown)}")
        if self.diameter_mode not in ("exact", "auto"):
            raise ConfigError("diameter_mode must be exact or auto")
        if not 0 <= self.ffs_forward_prob < 1:
            raise ConfigError("ffs_forward_prob must lie in [0, 1)")
        if int(self.workers) < 1:
            raise ConfigError("workers must be >= 1")

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        """Read a flat ``key = value`` config; list values are comma-separated.

        Relative ``dataset`` and ``output_dir`` paths resolve against the
        config file's directory. Non-None ``overrides`` win over the file.
        """
        try:
            raw = read_kv(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        kw: dict = {}
        base = Path(path).resolve().parent
        try:
            for key, val in raw.items():
                if key in ("algorithms", "metrics"):
                    kw[key] = tuple(_split(val))
                elif key == "fractions":
                    kw[key] = tuple(float(x) for x in _split(val))
                elif key in ("repetitions", "seed", "workers"):
                    kw[key] = int(val)
                elif key == "ffs_forward_prob":
                    kw[key] = float(val)
                elif key in ("dataset", "output_dir"):
                    kw[key] = str(base / val) if not Path(val).is_absolute() else val
                else:
                    kw[key] = val
        except ValueError as exc:
            raise ConfigError(f"bad value in {path}: {exc}") from None
        kw.update({k: v for k, v in overrides.items() if v is not None})
        if "dataset" not in kw:
            raise ConfigError("config needs a dataset")
        return cls(**kw)

    def digest(self) -> str:
        """Hash of everything that affects row contents."""
        d = asdict(self)
        for k in ("output_dir", "workers"):
            d.pop(k)
        d["dataset"] = Path(self.dataset).name
        d["algorithms"] = [a.value for a in self.algorithms]
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    @property
    def dataset_name(self) -> str:
        name = Path(self.dataset).name
        for suffix in (".gz", ".txt"):
            if name.endswith(suffix):
                name = name[: -len(suffix)]
        return name


def fraction_key(f: float) -> str:
    return format(float(f), ".6g")


def rep_seed(master: int, algorithm: Algorithm, fraction: float, rep: int) -> int:
    return derive_seed(master, "bench", Algorithm.parse(algorithm).value,
                       fraction_key(fraction), rep)


@dataclass
class Population:
    """Reference statistics of the full graph used by per-sample errors."""

    degree_pmf: dict
    cc_pmf: dict
    average_clustering: float
    mean_degree: float

    @classmethod
    def of(cls, g: Graph) -> "Population":
        _, cc = cc_distribution(g)
        return cls(degree_distribution(g), histogram_pmf(cc), average_clustering(g),
                   float(degrees(g).mean()))


def run_one(g: Graph, pop: Population, cfg: ExperimentConfig, algorithm: Algorithm,
            fraction: float, rep: int) -> dict:
    seed = rep_seed(cfg.seed, algorithm, fraction, rep)
    row = dict.fromkeys(COLUMNS, "")
    row.update(dataset=cfg.dataset_name, algorithm=algorithm.value,
               fraction=fraction_key(fraction), rep=rep, seed=seed)
    try:
        res = sample(g, SampleSpec(algorithm, fraction, seed, cfg.ffs_forward_prob))
        sub = res.subgraph
        row.update(node_count=sub.node_count, edge_count=sub.edge_count,
                   elapsed_ms=f"{res.elapsed_ms:.4f}")
        on = set(cfg.metrics)
        n = sub.node_count
        if "average_degree" in on and n:
            row["average_degree"] = 2.0 * sub.edge_count / n
        if "density" in on:
            row["density"] = density(sub) if n >= 2 else 0.0
        if "average_clustering" in on:
            cc = average_clustering(sub)
            row["average_clustering"] = cc
            row["clustering_error"] = abs(cc - pop.average_clustering)
        if "diameter" in on and n:
            dm = diameter(sub, cfg.diameter_mode, seed)
            row["diameter"], row["diameter_exact"] = dm.value, dm.exact
        if "degree_estimates" in on and n:
            plain, strat = sample_degree_estimates(g, res)
            row["sample_mean_degree"] = plain
            row["stratified_mean_degree"] = "" if math.isnan(strat) else strat
        if "ks_degree" in on and n:
            row["ks_degree"] = ks_statistic(pop.degree_pmf, degree_distribution(sub))
        if "ks_cc" in on and n:
            _, cc_probs = cc_distribution(sub)
            row["ks_cc"] = ks_statistic(pop.cc_pmf, histogram_pmf(cc_probs))
        row["status"] = "ok"
    except Exception as exc:  # one bad repetition must not abort the grid
        log.warning("repetition failed: %s %s rep %d: %s", algorithm.value,
                    fraction_key(fraction), rep, exc)
        row["status"] = "failed"
        row["error"] = f"{type(exc).__name__}: {exc}"
    return {k: _cell(v) for k, v in row.items()}


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def warm_up(g: Graph, cfg: ExperimentConfig) -> None:
    """One untimed draw per algorithm so one-off costs (compiled kernels
    loading, caches filling) stay out of the recorded timings."""
    for alg in cfg.algorithms:
        try:
            sample(g, SampleSpec(alg, min(cfg.fractions), 0, cfg.ffs_forward_prob))
        except Exception:
            pass


_WORKER: dict = {}


def _init_worker(g, pop, cfg):
    _WORKER.update(g=g, pop=pop, cfg=cfg)
    warm_up(g, cfg)


def _run_task(task):
    alg, frac, rep = task
    return run_one(_WORKER["g"], _WORKER["pop"], _WORKER["cfg"], alg, frac, rep)


def read_rows(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def _row_key(row) -> tuple:
    return row["algorithm"], row["fraction"], int(row["rep"])


@dataclass
class BenchOutcome:
    experiment_csv: Path
    summary_csv: Path
    computed: int
    skipped: int
    failed: int = 0
    summary: list = field(default_factory=list)


def run_bench(cfg: ExperimentConfig, graph: Graph | None = None) -> BenchOutcome:
    """Run the grid described by ``cfg`` and write experiment and summary CSVs."""
    out = ensure_writable_dir(cfg.output_dir)
    exp_path, meta_path, sum_path = out / "experiment.csv", out / "run.meta", out / "summary.csv"
    digest = cfg.digest()
    done: set = set()
    if exp_path.exists():
        prior = read_kv(meta_path).get("config_hash") if meta_path.exists() else None
        if prior != digest:
            raise ConfigError(f"{exp_path} was produced by a different config "
                              f"(hash {prior}, now {digest}); use a fresh output_dir")
        rows = read_rows(exp_path)
        done = {_row_key(r) for r in rows}
    else:
        with open(exp_path, "w", newline="", encoding="utf-8") as f:
            csv.writer(f, lineterminator="\n").writerow(COLUMNS)
    write_kv(meta_path, {"config_hash": digest, "dataset": cfg.dataset,
                         "algorithms": [a.value for a in cfg.algorithms],
                         "fractions": [fraction_key(x) for x in cfg.fractions],
                         "repetitions": cfg.repetitions, "seed": cfg.seed,
                         "metrics": list(cfg.metrics), "diameter_mode": cfg.diameter_mode,
                         "ffs_forward_prob": cfg.ffs_forward_prob})
    tasks = [(a, f, r) for a in cfg.algorithms for f in cfg.fractions
             for r in range(cfg.repetitions)
             if (a.value, fraction_key(f), r) not in done]
    computed = failed = 0
    if tasks:
        g = graph if graph is not None else load_edge_list(cfg.dataset)
        pop = Population.of(g)
        if cfg.workers > 1:
            pool = ProcessPoolExecutor(cfg.workers, initializer=_init_worker,
                                       initargs=(g, pop, cfg))
            results = pool.map(_run_task, tasks, chunksize=8)
        else:
            pool = None
            warm_up(g, cfg)
            results = (run_one(g, pop, cfg, *t) for t in tasks)
        try:
            with open(exp_path, "a", newline="", encoding="utf-8") as f:
                w = csv.DictWriter(f, fieldnames=COLUMNS, lineterminator="\n")
                for row in results:
                    w.writerow(row)
                    computed += 1
                    failed += row["status"] != "ok"
                    if computed % 500 == 0:
                        f.flush()
                        log.info("%d/%d repetitions", computed, len(tasks))
        finally:
            if pool is not None:
                pool.shutdown()
    summary = summarize(read_rows(exp_path))
    header = summary_columns()
    write_csv(sum_path, header, [[s[h] for h in header] for s in summary])
    return BenchOutcome(exp_path, sum_path, computed, len(done), failed, summary)


def summary_columns() -> list[str]:
    cols = ["algorithm", "fraction", "n_ok", "n_failed"]
    for c in NUMERIC_COLUMNS:
        cols += [f"{c}_mean", f"{c}_std", f"{c}_median"]
    return cols


def summarize(rows: list[dict]) -> list[dict]:
    """Mean, standard deviation (ddof=1) and median per ``(algorithm, fraction)``.

    Failed repetitions only count towards ``n_failed``; blank cells are
    ignored, and a column with no values gets blank statistics.
    """
    groups: dict = {}
    for r in rows:
        groups.setdefault((r["algorithm"], r["fraction"]), []).append(r)
    out = []
    for (alg, frac), grp in groups.items():
        ok = [r for r in grp if r["status"] == "ok"]
        s = {"algorithm": alg, "fraction": frac, "n_ok": len(ok),
             "n_failed": len(grp) - len(ok)}
        for c in NUMERIC_COLUMNS:
            vals = np.array([float(r[c]) for r in ok if r[c] != ""])
            if vals.size:
                s[f"{c}_mean"] = repr(float(vals.mean()))
                s[f"{c}_std"] = repr(float(vals.std(ddof=1))) if vals.size > 1 else "0.0"
                s[f"{c}_median"] = repr(float(np.median(vals)))
            else:
                s[f"{c}_mean"] = s[f"{c}_std"] = s[f"{c}_median"] = ""
        out.append(s)
    return out


def strip_timing(path) -> list[list[str]]:
    """Rows of an experiment CSV with timing columns removed (for comparisons)."""
    rows = read_rows(path)
    keep = [c for c in COLUMNS if c not in TIMING_COLUMNS]
    return [keep] + [[r[c] for c in keep] for r in rows]


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
