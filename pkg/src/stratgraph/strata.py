"""Degree stratification: k-means, correlation distance and silhouette scores.

Node degrees are clustered with Lloyd's k-means (k-means++ seeding) and the
clusters are relabeled Low/Medium/High by ascending centroid. Stratification
uses squared Euclidean distance on the scalar degree; the correlation
distance is defined only for vector features of dimension two or more.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import _kernels

DISTANCES = ("sqeuclidean", "euclidean", "correlation")
SILHOUETTE_EXACT_LIMIT = 20_000


class DegenerateInputError(ValueError):
    pass


class DegenerateStratificationError(ValueError):
    pass


class Stratum(IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2


def correlation_distance(x, y) -> float:
    """One minus the Pearson correlation of ``x`` and ``y``; lies in [0, 2]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D vectors of equal length")
    if x.size < 2:
        raise DegenerateInputError("correlation distance needs dimension >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    nx_, ny_ = np.sqrt(xc @ xc), np.sqrt(yc @ yc)
    if nx_ == 0 or ny_ == 0:
        raise DegenerateInputError("zero variance vector")
    r = (xc @ yc) / (nx_ * ny_)
    return float(1.0 - np.clip(r, -1.0, 1.0))


def _as_points(features) -> np.ndarray:
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise ValueError("features must be 1-D or 2-D")
    return X


def pairwise_distance(X: np.ndarray, C: np.ndarray, distance: str) -> np.ndarray:
    """``(len(X), len(C))`` matrix of distances between rows."""
    X, C = _as_points(X), _as_points(C)
    if distance in ("sqeuclidean", "euclidean"):
        D = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
        return np.sqrt(D) if distance == "euclidean" else D
    if distance == "correlation":
        if X.shape[1] < 2:
            raise DegenerateInputError("correlation distance needs dimension >= 2")
        Xc = X - X.mean(axis=1, keepdims=True)
        Cc = C - C.mean(axis=1, keepdims=True)
        xn = np.linalg.norm(Xc, axis=1)
        cn = np.linalg.norm(Cc, axis=1)
        if np.any(xn == 0) or np.any(cn == 0):
            raise DegenerateInputError("zero variance vector")
        return 1.0 - np.clip((Xc @ Cc.T) / np.outer(xn, cn), -1.0, 1.0)
    raise ValueError(f"unknown distance {distance!r}; expected one of {DISTANCES}")


@dataclass
class KmeansResult:
    centroids: np.ndarray
    labels: np.ndarray
    iterations: int
    converged: bool
    inertia: float
    # objective after each assignment step
    history: list = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.centroids)


def _batch_distance(X: np.ndarray, C: np.ndarray, distance: str) -> np.ndarray:
    """Distances between points ``X (n, dim)`` and centroids ``C (R, k, dim)`` as ``(R, n, k)``."""
    if distance in ("sqeuclidean", "euclidean"):
        D = ((X[None, :, None, :] - C[:, None, :, :]) ** 2).sum(axis=3)
        return np.sqrt(D) if distance == "euclidean" else D
    Xc = X - X.mean(axis=1, keepdims=True)
    Cc = C - C.mean(axis=2, keepdims=True)
    xn = np.linalg.norm(Xc, axis=1)
    cn = np.linalg.norm(Cc, axis=2)
    if np.any(xn == 0) or np.any(cn == 0):
        raise DegenerateInputError("zero variance vector")
    r = np.einsum("nd,rkd->rnk", Xc, Cc) / (xn[None, :, None] * cn[:, None, :])
    return 1.0 - np.clip(r, -1.0, 1.0)


def _draw(p: np.ndarray, rng) -> np.ndarray:
    """One index per row of the nonnegative weight matrix ``p``."""
    cdf = np.cumsum(p, axis=1)
    u = rng.random((len(p), 1)) * cdf[:, -1:]
    return np.minimum((cdf <= u).sum(axis=1), p.shape[1] - 1)


def _plusplus(X, w, k, distance, rng, restarts) -> np.ndarray:
    """k-means++ seeding for ``restarts`` independent runs at once: ``(R, k, dim)``."""
    R = restarts
    C = np.empty((R, k, X.shape[1]))
    idx = _draw(np.broadcast_to(w, (R, len(X))), rng)
    C[:, 0] = X[idx]
    closest = _batch_distance(X, C[:, :1], distance)[:, :, 0]
    for j in range(1, k):
        p = w[None, :] * closest
        dead = np.cumsum(p, axis=1)[:, -1] <= 0
        # all points coincide with chosen centers: fall back to the weights
        p[dead] = w
        idx = _draw(p, rng)
        C[:, j] = X[idx]
        closest = np.minimum(closest, _batch_distance(X, C[:, j:j + 1], distance)[:, :, 0])
    return C


def _reseed_empty(X, D, labels, C, k):
    rows = np.arange(len(X))
    for c in range(k):
        if np.any(labels == c):
            continue
        own = D[rows, labels].copy()
        counts = np.bincount(labels, minlength=k)
        own[counts[labels] <= 1] = -np.inf
        far = int(np.argmax(own))
        labels[far] = c
        C[c] = X[far]
        return True
    return False


def _lloyd(X, w, C, distance, max_iter):
    """Batched Lloyd iterations; each restart stops changing at its fixpoint."""
    R, k, _ = C.shape
    n = len(X)
    labels = np.full((R, n), -1)
    iterations = np.zeros(R, dtype=np.int64)
    converged = np.zeros(R, dtype=bool)
    trace = []
    offsets = (np.arange(R) * k)[:, None]
    wt = np.broadcast_to(w, (R, n)).ravel()
    wx = [np.tile(w * X[:, j], R) for j in range(X.shape[1])]
    for it in range(1, max_iter + 1):
        D = _batch_distance(X, C, distance)
        new = D.argmin(axis=2)
        counts = np.bincount((new + offsets).ravel(), minlength=R * k).reshape(R, k)
        for r in np.flatnonzero((counts == 0).any(axis=1)):
            while _reseed_empty(X, D[r], new[r], C[r], k):
                D[r] = _batch_distance(X, C[r:r + 1], distance)[0]
        trace.append(np.take_along_axis(D, new[:, :, None], axis=2)[:, :, 0] @ w)
        iterations[~converged] = it
        converged |= np.all(new == labels, axis=1)
        if converged.all():
            break
        labels = new
        flat = (labels + offsets).ravel()
        ws = np.bincount(flat, weights=wt, minlength=R * k).reshape(R, k)
        for j in range(X.shape[1]):
            sums = np.bincount(flat, weights=wx[j], minlength=R * k)
            C[:, :, j] = sums.reshape(R, k) / ws
    D = _batch_distance(X, C, distance)
    inertia = np.take_along_axis(D, labels[:, :, None], axis=2)[:, :, 0] @ w
    return C, labels, iterations, converged, inertia, _histories(trace, iterations)


def _prefix_sums(x, w):
    # rows: w, w*x, w*x^2
    P = np.zeros((3, len(x) + 1))
    np.cumsum(w, out=P[0, 1:])
    np.cumsum(w * x, out=P[1, 1:])
    np.cumsum(w * x * x, out=P[2, 1:])
    return P


def _finish_1d(P, C, bounds, iterations, converged, objective):
    S = P[:, bounds[:, 1:]] - P[:, bounds[:, :-1]]
    inertia = (S[2] - 2 * C * S[1] + C * C * S[0]).sum(axis=1)
    return C, bounds, iterations, converged, inertia, _histories(objective, iterations)


def _lloyd_1d(x, w, C, max_iter):
    """Compiled 1-D Lloyd with the semantics of :func:`_lloyd_1d_numpy`."""
    P = _prefix_sums(x, w)
    C, bounds, iterations, converged, trace, ok = _kernels.lloyd_1d(
        np.ascontiguousarray(x, dtype=float), P, np.array(C, dtype=float), max_iter)
    if not ok:
        return None
    return _finish_1d(P, C, bounds, iterations, converged, trace)


def _lloyd_1d_numpy(x, w, C, max_iter):
    """Batched Lloyd for scalar points under squared Euclidean distance.

    ``x`` must be sorted. Clusters are contiguous runs, so assignment is a
    search for the centroid midpoints and updates use prefix sums. Cluster
    ids follow ascending centroid order; a point on a midpoint joins the
    lower cluster. Cluster ``j`` of restart ``r`` is ``x[bounds[r, j]:bounds[r, j + 1]]``.
    Returns None if some restart would need empty-cluster
    handling; the caller then uses the generic loop.
    """
    R, k = C.shape
    m = len(x)
    C = np.sort(C, axis=1)
    P = _prefix_sums(x, w)
    bounds = np.zeros((R, k + 1), dtype=np.int64)
    bounds[:, -1] = m
    iterations = np.zeros(R, dtype=np.int64)
    converged = np.zeros(R, dtype=bool)
    trace = []
    prev = None
    for it in range(1, max_iter + 1):
        bounds[:, 1:-1] = np.searchsorted(x, ((C[:, 1:] + C[:, :-1]) / 2).ravel(),
                                          side="right").reshape(R, k - 1)
        S = P[:, bounds[:, 1:]] - P[:, bounds[:, :-1]]
        if not S[0].all():
            return None
        trace.append((C, S))
        iterations[~converged] = it
        if prev is not None:
            converged |= (bounds == prev).all(axis=1)
            if converged.all():
                break
        prev = bounds.copy()
        C = S[1] / S[0]
    objective = [(S[2] - 2 * Ct * S[1] + Ct * Ct * S[0]).sum(axis=1) for Ct, S in trace]
    return _finish_1d(P, C, prev, iterations, converged, objective)


def _histories(trace, iterations):
    T = np.array(trace)
    return [T[:n, r].tolist() for r, n in enumerate(iterations)]


def _standardize(X):
    Xc = X - X.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(Xc, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise DegenerateInputError("zero variance vector")
    return Xc / norms


def kmeans(features, k: int, distance: str = "sqeuclidean", seed: int = 0,
           max_iter: int = 100, weights=None, n_init: int = 1) -> KmeansResult:
    """Lloyd's k-means from k-means++ seeding.

    ``weights`` gives a multiplicity per point, so clustering the distinct
    values of a multiset with their counts is the same problem as clustering
    the multiset itself. With ``n_init > 1`` independent restarts run side by
    side and the lowest-inertia one is returned. The result is a pure
    function of the inputs and ``seed``.

    Euclidean and squared Euclidean produce the same assignments; both
    minimize (and report) the sum of squared distances, which is what a
    mean update can guarantee to decrease. Under correlation distance the
    points are first centered and scaled to unit norm, where the member
    mean is the optimal centroid, so ``centroids`` live in that space.
    """
    X = _as_points(features)
    n = len(X)
    if n == 0:
        raise ValueError("kmeans needs at least one point")
    if k < 1 or n < k:
        raise ValueError(f"need 1 <= k <= number of points (k={k}, n={n})")
    if max_iter < 1 or n_init < 1:
        raise ValueError("max_iter and n_init must be >= 1")
    if distance not in DISTANCES:
        raise ValueError(f"unknown distance {distance!r}")
    if distance == "correlation" and X.shape[1] < 2:
        raise DegenerateInputError("correlation distance needs dimension >= 2")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w <= 0):
        raise ValueError("weights must be positive, one per point")
    if distance == "euclidean":
        distance = "sqeuclidean"
    elif distance == "correlation":
        X = _standardize(X)
    rng = np.random.default_rng(seed)
    out = None
    if X.shape[1] == 1 and distance == "sqeuclidean":
        # same draws as _plusplus, compiled
        C = _kernels.plusplus_1d(X[:, 0].copy(), w, rng.random((k, n_init)))[:, :, None]
    else:
        C = _plusplus(X, w, k, distance, rng, n_init)
    if X.shape[1] == 1 and distance == "sqeuclidean" and k > 1:
        order = np.argsort(X[:, 0], kind="stable")
        out = _lloyd_1d(X[order, 0], w[order], C[:, :, 0].copy(), max_iter)
    if out is not None:
        C1, bounds, iters, conv, inertia, hist = out
        r = int(np.argmin(inertia))
        best = np.empty(n, dtype=np.int64)
        best[order] = np.repeat(np.arange(k), np.diff(bounds[r]))
        C = C1[:, :, None]
    else:
        C, labels, iters, conv, inertia, hist = _lloyd(X, w, C, distance, max_iter)
        r = int(np.argmin(inertia))
        best = labels[r]
    cent = C[r, :, 0] if np.ndim(features) == 1 else C[r]
    return KmeansResult(cent, best, int(iters[r]), bool(conv[r]), float(inertia[r]), hist[r])


@dataclass
class StratumAssignment:
    """Per-node stratum labels.

    ``boundaries`` are the cut ranks in ascending degree order: the first
    ``boundaries[0]`` nodes are Low, the next up to ``boundaries[1]`` are
    Medium and the rest High. ``k`` records how many strata exist (fewer
    than three only for the degenerate fallback, see :func:`stratify_by_degree`).
    """

    labels: np.ndarray
    boundaries: tuple
    centroids: np.ndarray
    k: int = 3

    def members(self, stratum) -> np.ndarray:
        return np.flatnonzero(self.labels == int(stratum))

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=3)

    def proportions(self) -> np.ndarray:
        return self.sizes() / len(self.labels)


def relabel_by_centroid(labels: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Map cluster ids so that cluster order follows ascending centroid."""
    order = np.argsort(np.asarray(centroids, dtype=float), kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rank[labels]


def stratify_by_degree(degrees, seed: int = 0, k: int = 3, n_init: int = 10,
                       max_iter: int = 100) -> StratumAssignment:
    """Split nodes into Low/Medium/High degree strata with 1-D k-means.

    Clustering runs on the distinct degree values weighted by their counts.
    With ``k=2`` the clusters become Low and High; with ``k=1`` every node
    is Low.
    """
    d = np.asarray(degrees, dtype=np.int64)
    if d.size and d.min() < 0:
        raise ValueError("degrees must be nonnegative")
    tally = np.bincount(d)
    values = np.flatnonzero(tally)
    counts = tally[values]
    lookup = np.zeros(len(tally), dtype=np.int64)
    lookup[values] = np.arange(len(values))
    inverse = lookup[d]
    if len(values) < k:
        raise DegenerateStratificationError(
            f"{len(values)} distinct degree values, need {k}")
    res = kmeans(values.astype(float), k, "sqeuclidean", seed=seed, max_iter=max_iter,
                 weights=counts, n_init=n_init)
    ranks = relabel_by_centroid(res.labels, res.centroids)
    names = {3: [Stratum.LOW, Stratum.MEDIUM, Stratum.HIGH],
             2: [Stratum.LOW, Stratum.HIGH],
             1: [Stratum.LOW]}[k]
    to_stratum = np.array([int(names[r]) for r in ranks], dtype=np.int64)
    labels = to_stratum[inverse]
    sizes = np.bincount(labels, minlength=3)
    boundaries = (int(sizes[0]), int(sizes[0] + sizes[1]))
    return StratumAssignment(labels, boundaries, np.sort(res.centroids), k)


@dataclass
class SilhouetteReport:
    per_point: np.ndarray
    average: float
    k: int
    # indices of the evaluated points when a subsample was used, else None
    sample: np.ndarray | None = None


def _silhouette_1d(x: np.ndarray, labels: np.ndarray, clusters: np.ndarray) -> np.ndarray:
    n = len(x)
    mean_to = np.empty((n, len(clusters)))
    sizes = np.empty(len(clusters), dtype=np.int64)
    for j, c in enumerate(clusters):
        vals = np.sort(x[labels == c])
        pref = np.concatenate([[0.0], np.cumsum(vals)])
        m = len(vals)
        pos = np.searchsorted(vals, x, side="right")
        below = x * pos - pref[pos]
        above = (pref[m] - pref[pos]) - x * (m - pos)
        mean_to[:, j] = below + above
        sizes[j] = m
    return _combine(mean_to, sizes, labels, clusters)


def _combine(sums, sizes, labels, clusters):
    own = np.searchsorted(clusters, labels)
    idx = np.arange(len(labels))
    own_size = sizes[own]
    with np.errstate(invalid="ignore", divide="ignore"):
        a = sums[idx, own] / (own_size - 1)
        means = sums / sizes[None, :]
    means[idx, own] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(denom > 0, (b - a) / denom, 0.0)
    s[own_size == 1] = 0.0
    return s


def silhouette(features, labels, distance: str = "euclidean", seed: int = 0,
               exact_limit: int = SILHOUETTE_EXACT_LIMIT) -> SilhouetteReport:
    """Per-point silhouette ``(b - a) / max(a, b)`` and its average.

    Members of singleton clusters score 0. Scalar features under Euclidean
    distance are scored exactly in O(n log n); other inputs use pairwise
    distances and, above ``exact_limit`` points, a seeded uniform subsample
    of that many points (recorded in ``SilhouetteReport.sample``).
    """
    X = _as_points(features)
    labels = np.asarray(labels)
    if len(labels) != len(X):
        raise ValueError("one label per point required")
    clusters = np.unique(labels)
    k = len(clusters)
    if k < 2:
        raise ValueError("silhouette needs at least 2 non-empty clusters")
    if X.shape[1] == 1 and distance == "euclidean":
        s = _silhouette_1d(X[:, 0], labels, clusters)
        return SilhouetteReport(s, float(s.mean()), k)
    sample = None
    rows = np.arange(len(X))
    if len(X) > exact_limit:
        rng = np.random.default_rng(seed)
        sample = np.sort(rng.choice(len(X), exact_limit, replace=False))
        rows = sample
    Xe, le = X[rows], labels[rows]
    sizes = np.array([np.sum(le == c) for c in clusters])
    sums = np.zeros((len(rows), k))
    for start in range(0, len(rows), 2048):
        D = pairwise_distance(Xe[start:start + 2048], Xe, distance)
        for j, c in enumerate(clusters):
            sums[start:start + 2048, j] = D[:, le == c].sum(axis=1)
    s = _combine(sums, sizes, le, clusters)
    return SilhouetteReport(s, float(s.mean()), k, sample)


def silhouette_sweep(features, k_range, distance: str = "euclidean", seed: int = 0,
                     n_init: int = 10) -> list[tuple[int, float]]:
    """Average silhouette for each k in ``k_range`` (k-means fit per k).

    Scalar features are clustered on their distinct values weighted by
    multiplicity.
    """
    X = _as_points(features)
    out = []
    for k in k_range:
        if not 2 <= k <= len(X):
            raise ValueError(f"k={k} outside [2, {len(X)}]")
        if X.shape[1] == 1:
            values, inverse, counts = np.unique(X[:, 0], return_inverse=True,
                                                return_counts=True)
            if k > len(values):
                raise DegenerateInputError(
                    f"k={k} exceeds the {len(values)} distinct feature values")
            res = kmeans(values, k, distance, seed=seed, weights=counts, n_init=n_init)
            labels = res.labels[inverse]
        else:
            labels = kmeans(X, k, distance, seed=seed, n_init=n_init).labels
        out.append((int(k), silhouette(X, labels, distance, seed=seed).average))
    return out
