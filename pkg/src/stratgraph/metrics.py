"""Topological statistics of a graph and sample-quality measures.

Covers average degree, density, clustering coefficients, degree
distribution, diameter, the KS distance between two discrete distributions
and the stratified mean estimator.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from ._seeding import rng_for
from .graph import Graph, bfs_distances, connected_components, degrees, induce_subgraph

CC_BINS = 20
EXACT_DIAMETER_LIMIT = 50_000
DOUBLE_SWEEP_SOURCES = 100


def average_degree(g: Graph) -> float:
    if g.node_count == 0:
        raise ValueError("average degree of an empty graph is undefined")
    return 2.0 * g.edge_count / g.node_count


def density(g: Graph) -> float:
    n = g.node_count
    if n < 2:
        raise ValueError("density needs at least 2 nodes")
    return 2.0 * g.edge_count / (n * (n - 1))


def triangles(g: Graph) -> np.ndarray:
    """Number of triangles through each node."""
    if g.node_count == 0:
        return np.zeros(0, dtype=np.int64)
    A = g.adjacency
    return np.asarray((A @ A).multiply(A).sum(axis=1)).ravel() // 2


def clustering(g: Graph) -> np.ndarray:
    """Local clustering coefficient of every node (0 where degree < 2)."""
    d = degrees(g).astype(float)
    t = triangles(g).astype(float)
    pairs = d * (d - 1) / 2
    out = np.zeros(g.node_count)
    np.divide(t, pairs, out=out, where=pairs > 0)
    return out


def local_clustering(g: Graph, u: int) -> float:
    nbrs = g.neighbors(u)
    d = len(nbrs)
    if d < 2:
        return 0.0
    links = sum(int(np.isin(g.neighbors(v), nbrs, assume_unique=True).sum()) for v in nbrs) // 2
    return links / (d * (d - 1) / 2)


def average_clustering(g: Graph) -> float:
    """Mean local clustering over all nodes, degree < 2 counting as 0."""
    if g.node_count == 0:
        return 0.0
    return float(clustering(g).mean())


def cc_distribution(g: Graph, bins: int = CC_BINS):
    """Histogram of local clustering coefficients on ``bins`` equal bins of [0, 1].

    Returns ``(edges, probabilities)``; the last bin includes 1.
    """
    edges = np.linspace(0.0, 1.0, bins + 1)
    if g.node_count == 0:
        return edges, np.zeros(bins)
    counts, _ = np.histogram(clustering(g), bins=edges)
    return edges, counts / g.node_count


def degree_distribution(g: Graph) -> dict[int, float]:
    """Empirical pmf over observed degrees."""
    if g.node_count == 0:
        raise ValueError("degree distribution of an empty graph is undefined")
    values, counts = np.unique(degrees(g), return_counts=True)
    probs = counts / g.node_count
    return {int(v): float(p) for v, p in zip(values, probs)}


def ccdf(pmf: dict) -> dict:
    """``P(X >= x)`` for every support point of ``pmf``."""
    xs = sorted(pmf)
    tail = np.cumsum([pmf[x] for x in reversed(xs)])[::-1]
    return {x: float(min(t, 1.0)) for x, t in zip(xs, tail)}


class Diameter(NamedTuple):
    value: int
    exact: bool


def _bounded_diameter(g: Graph) -> int:
    """Exact diameter of a connected graph by eccentricity bounding.

    Each BFS from ``v`` bounds every eccentricity by
    ``max(d(v,w), ecc(v) - d(v,w)) <= ecc(w) <= ecc(v) + d(v,w)``; nodes whose
    upper bound cannot beat the best known eccentricity are dropped. Sources
    alternate between the largest upper and smallest lower bound.
    """
    n = g.node_count
    lower = np.zeros(n, dtype=np.int64)
    upper = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    deg = degrees(g)
    best = 0
    pick_upper = True
    while alive.any():
        cand = np.flatnonzero(alive)
        if pick_upper:
            # largest upper bound, ties to higher degree
            v = cand[np.lexsort((-deg[cand], -upper[cand]))[0]]
        else:
            v = cand[np.lexsort((-deg[cand], lower[cand]))[0]]
        pick_upper = not pick_upper
        d = bfs_distances(g, int(v))
        ecc = int(d.max())
        best = max(best, ecc)
        np.maximum(lower, np.maximum(d, ecc - d), out=lower)
        np.minimum(upper, ecc + d, out=upper)
        alive[v] = False
        alive &= upper > best
        alive &= lower < upper
        best = max(best, int(lower.max()))
    return best


def _double_sweep(g: Graph, sources: int, seed: int) -> int:
    rng = rng_for(seed, "diameter", "double-sweep")
    picks = rng.choice(g.node_count, size=min(sources, g.node_count), replace=False)
    best = 0
    for r in picks:
        d1 = bfs_distances(g, int(r))
        far = int(np.argmax(d1))
        d2 = bfs_distances(g, far)
        best = max(best, int(d1.max()), int(d2.max()))
    return best


def diameter(g: Graph, mode: str = "auto", seed: int = 0) -> Diameter:
    """Largest eccentricity within the largest connected component.

    ``exact`` always computes the true value. ``auto`` does the same up to
    50,000 component nodes; beyond that it returns the best double-sweep
    lower bound from 100 seeded sources, flagged inexact.
    """
    if mode not in ("exact", "auto"):
        raise ValueError("mode must be 'exact' or 'auto'")
    if g.node_count == 0:
        raise ValueError("diameter of an empty graph is undefined")
    comp = connected_components(g)[0]
    if len(comp) == 1:
        return Diameter(0, True)
    lcc = g if len(comp) == g.node_count else induce_subgraph(g, comp)
    if mode == "exact" or len(comp) <= EXACT_DIAMETER_LIMIT:
        return Diameter(_bounded_diameter(lcc), True)
    return Diameter(_double_sweep(lcc, DOUBLE_SWEEP_SOURCES, seed), False)


def ks_statistic(p: dict, q: dict) -> float:
    """Largest absolute CDF difference between two pmfs on a common ordered support."""
    if not p or not q:
        raise ValueError("KS statistic needs two non-empty distributions")
    support = sorted(set(p) | set(q))
    cp = np.cumsum([p.get(x, 0.0) for x in support])
    cq = np.cumsum([q.get(x, 0.0) for x in support])
    return float(min(1.0, np.abs(cp - cq).max()))


def histogram_pmf(probs) -> dict:
    """Histogram probabilities as a pmf keyed by bin index."""
    return {i: float(p) for i, p in enumerate(probs)}


@dataclass
class StratifiedEstimate:
    means: np.ndarray
    weights: np.ndarray
    estimate: float


def stratified_mean_estimate(means, sizes) -> StratifiedEstimate:
    """Combine per-stratum sample means with weights ``|N_k| / |N|``.

    Empty strata (size 0) get weight 0 and their mean is ignored; it may be
    NaN.
    """
    means = np.asarray(means, dtype=float)
    sizes = np.asarray(sizes, dtype=float)
    if means.shape != sizes.shape or means.ndim != 1 or means.size == 0:
        raise ValueError("means and sizes must be 1-D of equal, nonzero length")
    if np.any(sizes < 0) or sizes.sum() <= 0:
        raise ValueError("sizes must be nonnegative with a positive total")
    if np.any(np.isnan(means[sizes > 0])):
        raise ValueError("a non-empty stratum needs a sample mean")
    w = sizes / sizes.sum()
    est = float(np.sum(w[sizes > 0] * means[sizes > 0]))
    return StratifiedEstimate(means, w, est)


def sample_degree_estimates(g: Graph, result) -> tuple[float, float]:
    """Plain and stratified estimates of ``g``'s mean degree from a sample.

    Both use the sampled nodes' degrees in ``g``. The stratified value is NaN
    unless the sampler recorded strata; strata that received no draws are
    dropped and the remaining weights renormalized.
    """
    d = degrees(g)
    if result.nodes.size == 0:
        return float("nan"), float("nan")
    plain = float(d[result.nodes].mean())
    strata = result.details.get("strata")
    if strata is None:
        return plain, float("nan")
    lab = strata.labels[result.nodes]
    sizes = strata.sizes().astype(float)
    means = np.full(3, np.nan)
    for k in range(3):
        if np.any(lab == k):
            means[k] = d[result.nodes[lab == k]].mean()
    sizes[np.isnan(means)] = 0
    return plain, stratified_mean_estimate(means, sizes).estimate


@dataclass
class MetricsReport:
    node_count: int
    edge_count: int
    average_degree: float
    density: float
    average_clustering: float
    diameter: int
    diameter_exact: bool
    degree_distribution: dict = field(repr=False)
    cc_distribution: np.ndarray = field(repr=False)
    cc_bin_edges: np.ndarray = field(repr=False)

    SCALARS = ("node_count", "edge_count", "average_degree", "density",
               "average_clustering", "diameter", "diameter_exact")

    def scalars(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in self.SCALARS}


def compute_metrics(g: Graph, diameter_mode: str = "auto", cc_bins: int = CC_BINS,
                    seed: int = 0) -> MetricsReport:
    """All statistics of ``g`` in one report. Degenerate sizes report 0."""
    n = g.node_count
    if n == 0:
        raise ValueError("cannot compute metrics of an empty graph")
    diam = diameter(g, diameter_mode, seed)
    edges, cc_probs = cc_distribution(g, cc_bins)
    return MetricsReport(
        node_count=n,
        edge_count=g.edge_count,
        average_degree=average_degree(g),
        density=density(g) if n >= 2 else 0.0,
        average_clustering=average_clustering(g),
        diameter=diam.value,
        diameter_exact=diam.exact,
        degree_distribution=degree_distribution(g),
        cc_distribution=cc_probs,
        cc_bin_edges=edges,
    )
