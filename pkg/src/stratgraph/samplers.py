"""Node, edge and forest-fire samplers, and the degree-stratified NS-d / NS-d+ samplers.

Every sampler takes a :class:`~stratgraph.graph.Graph`, a fraction of nodes
``phi`` in (0, 1] and an integer seed, and returns a :class:`SampleResult`.
Random streams are derived from the seed by label, so e.g. ``es`` and
``es_i`` with the same seed draw the same edges.
"""
from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from ._seeding import derive_seed, rng_for
from .graph import Graph, degrees, edge_subgraph, induce_subgraph
from .strata import Stratum, StratumAssignment, stratify_by_degree

DEFAULT_FORWARD_PROB = 0.7
_EPS = 1e-9


class Algorithm(str, Enum):
    NS = "NS"
    ES = "ES"
    ESI = "ESI"
    FFS = "FFS"
    NSD = "NSD"
    NSDPLUS = "NSDPLUS"

    @classmethod
    def parse(cls, name) -> "Algorithm":
        if isinstance(name, cls):
            return name
        key = str(name).strip().upper().replace("-", "").replace("+", "PLUS")
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown algorithm {name!r}; expected one of "
                             f"{[a.value for a in cls]}") from None


@dataclass(frozen=True)
class SampleSpec:
    algorithm: Algorithm
    fraction: float
    seed: int = 0
    ffs_forward_prob: float = DEFAULT_FORWARD_PROB

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm.parse(self.algorithm))
        _check_fraction(self.fraction)
        if not 0 <= self.ffs_forward_prob < 1:
            raise ValueError("ffs_forward_prob must lie in [0, 1)")


@dataclass
class SampleResult:
    nodes: np.ndarray
    subgraph: Graph
    spec: SampleSpec
    elapsed: float
    details: dict = field(default_factory=dict)

    @property
    def elapsed_ms(self) -> float:
        return self.elapsed * 1e3


def _check_fraction(phi):
    if not (isinstance(phi, (int, float, np.floating)) and 0 < phi <= 1):
        raise ValueError(f"fraction must lie in (0, 1], got {phi!r}")


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5 + _EPS))


def target_size(n: int, phi: float) -> int:
    _check_fraction(phi)
    return min(n, round_half_up(n * phi))


def stratum_quotas(sizes, fraction: float) -> np.ndarray:
    """Per-stratum sample counts: ``round_half_up(size * fraction)`` capped at size."""
    _check_fraction(fraction)
    sizes = np.asarray(sizes, dtype=np.int64)
    if np.any(sizes < 0):
        raise ValueError("stratum sizes must be nonnegative")
    q = np.array([round_half_up(s * fraction) for s in sizes], dtype=np.int64)
    return np.minimum(q, sizes)


def top_count(size: int, fraction: float) -> int:
    """High-stratum take for NS-d+: ``floor(size * fraction)``."""
    _check_fraction(fraction)
    return min(size, int(math.floor(size * fraction + _EPS)))


def counting_sort_desc(nodes, degree_table) -> np.ndarray:
    """Stable counting sort of ``nodes`` by descending degree.

    Runs in O(n + d_max); nodes of equal degree keep their input order.
    """
    nodes = np.asarray(nodes, dtype=np.int64)
    keys = np.asarray(degree_table, dtype=np.int64)[nodes]
    if keys.size and keys.min() < 0:
        raise ValueError("degrees must be nonnegative")
    return _kernels.counting_sort_desc(nodes, keys)


def _finish(g, nodes, spec, t0, edges=None, **details) -> SampleResult:
    nodes = np.sort(np.asarray(nodes, dtype=np.int64))
    sub = induce_subgraph(g, nodes) if edges is None else edge_subgraph(g, nodes, edges)
    elapsed = time.perf_counter() - t0
    return SampleResult(nodes, sub, spec, elapsed, details)


def ns(g: Graph, fraction: float, seed: int = 0) -> SampleResult:
    """Uniform node sampling without replacement, then full induction."""
    t0 = time.perf_counter()
    spec = SampleSpec(Algorithm.NS, fraction, seed)
    q = target_size(g.node_count, fraction)
    rng = rng_for(seed, "NS", "nodes")
    nodes = rng.choice(g.node_count, size=q, replace=False)
    return _finish(g, nodes, spec, t0)


def _edge_draws(g: Graph, fraction: float, seed: int):
    if g.edge_count == 0:
        raise ValueError("edge sampling needs a graph with at least one edge")
    # at least one edge, even when the node target rounds to zero
    target = max(2, target_size(g.node_count, fraction))
    rng = rng_for(seed, "ES", "edges")
    perm = rng.permutation(g.edge_count)
    drawn = g.edges[perm]
    # position (in draw order) at which each node is first touched
    flat = drawn.ravel()
    first = np.full(g.node_count, len(flat), dtype=np.int64)
    np.minimum.at(first, flat, np.arange(len(flat)))
    first = np.sort(first[first < len(flat)])
    if target > len(first):
        return drawn
    stop = first[target - 1] // 2 + 1
    return drawn[:stop]


def es(g: Graph, fraction: float, seed: int = 0) -> SampleResult:
    """Edge sampling: uniform edge draws until ``round(phi * n)`` nodes are covered.

    The sample holds exactly the drawn edges and their endpoints. The last
    edge may overshoot the node target by one, and at least one edge is
    always drawn.
    """
    t0 = time.perf_counter()
    spec = SampleSpec(Algorithm.ES, fraction, seed)
    drawn = _edge_draws(g, fraction, seed)
    nodes = np.unique(drawn)
    return _finish(g, nodes, spec, t0, edges=drawn, drawn_edges=len(drawn))


def es_i(g: Graph, fraction: float, seed: int = 0) -> SampleResult:
    """Edge sampling followed by induction over the covered node set."""
    t0 = time.perf_counter()
    spec = SampleSpec(Algorithm.ESI, fraction, seed)
    drawn = _edge_draws(g, fraction, seed)
    nodes = np.unique(drawn)
    return _finish(g, nodes, spec, t0, drawn_edges=len(drawn))


def ffs(g: Graph, fraction: float, seed: int = 0,
        forward_prob: float = DEFAULT_FORWARD_PROB) -> SampleResult:
    """Forest fire sampling (forward burning only).

    Each burned node burns ``Geometric`` many (mean ``p/(1-p)``) of its
    unburned neighbors, breadth first. When a fire dies out a new seed is
    drawn uniformly among unburned nodes. Burned edges form the sample;
    nodes burned past the target are discarded with their edges.
    """
    t0 = time.perf_counter()
    spec = SampleSpec(Algorithm.FFS, fraction, seed, forward_prob)
    n = g.node_count
    target = target_size(n, fraction)
    rng = rng_for(seed, "FFS", "burn")
    seeds = rng.permutation(n)
    next_seed = 0
    burned = np.zeros(n, dtype=bool)
    order: list[int] = []
    edges: list[tuple[int, int]] = []
    restarts = 0
    indptr, indices = g.indptr, g.indices
    while len(order) < target:
        while burned[seeds[next_seed]]:
            next_seed += 1
        s = int(seeds[next_seed])
        burned[s] = True
        order.append(s)
        restarts += 1
        queue = deque([s])
        while queue and len(order) < target:
            u = queue.popleft()
            x = int(rng.geometric(1.0 - forward_prob)) - 1
            if x == 0:
                continue
            nbrs = indices[indptr[u]:indptr[u + 1]]
            nbrs = nbrs[~burned[nbrs]]
            if nbrs.size == 0:
                continue
            if x < nbrs.size:
                nbrs = rng.choice(nbrs, size=x, replace=False)
            for w in nbrs.tolist():
                burned[w] = True
                order.append(w)
                edges.append((u, w))
                queue.append(w)
    kept = np.array(order[:target], dtype=np.int64)
    keep = np.zeros(n, dtype=bool)
    keep[kept] = True
    e = np.array(edges, dtype=np.int64).reshape(-1, 2)
    e = e[keep[e[:, 0]] & keep[e[:, 1]]]
    return _finish(g, kept, spec, t0, edges=e, fires=restarts,
                   trimmed=len(order) - len(kept))


def _stratify(g: Graph, seed: int, label: str) -> StratumAssignment:
    d = degrees(g)
    k = min(3, np.count_nonzero(np.bincount(d))) if d.size else 0
    if k == 0:
        return StratumAssignment(np.zeros(0, dtype=np.int64), (0, 0), np.zeros(0), 0)
    return stratify_by_degree(d, seed=derive_seed(seed, label, "strata"), k=k)


def _stratum_rng(seed, label, strata, s):
    # a single stratum is plain node sampling; share the NS stream
    if strata.k == 1:
        return rng_for(seed, "NS", "nodes")
    return rng_for(seed, label, "stratum", s.name)


def _uniform_from(members: np.ndarray, q: int, rng) -> np.ndarray:
    if q == 0:
        return members[:0]
    return rng.choice(members, size=q, replace=False)


def _strata_details(strata, quotas, taken):
    return {
        "k": strata.k,
        "strata_sizes": [int(x) for x in strata.sizes()],
        "quotas": [int(x) for x in quotas],
        "taken": [int(x) for x in taken],
        "strata": strata,
    }


def ns_d(g: Graph, fraction: float, seed: int = 0) -> SampleResult:
    """Degree-stratified node sampling.

    Nodes are split into Low/Medium/High degree strata by k-means (k=3,
    fewer if the graph has fewer distinct degrees); each stratum is sampled
    uniformly at its rounded quota and the union is induced.
    """
    t0 = time.perf_counter()
    spec = SampleSpec(Algorithm.NSD, fraction, seed)
    strata = _stratify(g, seed, "NSD")
    quotas = stratum_quotas(strata.sizes(), fraction)
    nodes = []
    for s in Stratum:
        rng = _stratum_rng(seed, "NSD", strata, s)
        nodes.append(_uniform_from(strata.members(s), int(quotas[s]), rng))
    nodes = np.concatenate(nodes)
    return _finish(g, nodes, spec, t0, **_strata_details(strata, quotas, quotas))


def ns_d_plus(g: Graph, fraction: float, seed: int = 0) -> SampleResult:
    """Like :func:`ns_d`, but the High stratum contributes its top
    ``floor(|High| * phi)`` nodes by degree (stable counting sort) instead of
    a uniform draw."""
    t0 = time.perf_counter()
    spec = SampleSpec(Algorithm.NSDPLUS, fraction, seed)
    d = degrees(g)
    strata = _stratify(g, seed, "NSDPLUS")
    sizes = strata.sizes()
    quotas = stratum_quotas(sizes, fraction)
    taken = quotas.copy()
    taken[Stratum.HIGH] = top_count(int(sizes[Stratum.HIGH]), fraction)
    queue = counting_sort_desc(strata.members(Stratum.HIGH), d)
    nodes = [queue[:taken[Stratum.HIGH]]]
    for s in (Stratum.MEDIUM, Stratum.LOW):
        rng = _stratum_rng(seed, "NSDPLUS", strata, s)
        nodes.append(_uniform_from(strata.members(s), int(quotas[s]), rng))
    return _finish(g, np.concatenate(nodes), spec, t0,
                   **_strata_details(strata, quotas, taken))


SAMPLERS = {
    Algorithm.NS: ns,
    Algorithm.ES: es,
    Algorithm.ESI: es_i,
    Algorithm.FFS: ffs,
    Algorithm.NSD: ns_d,
    Algorithm.NSDPLUS: ns_d_plus,
}


def sample(g: Graph, spec: SampleSpec) -> SampleResult:
    """Run the sampler named by ``spec``."""
    if spec.algorithm is Algorithm.FFS:
        return ffs(g, spec.fraction, spec.seed, spec.ffs_forward_prob)
    return SAMPLERS[spec.algorithm](g, spec.fraction, spec.seed)
