import numpy as np
from numba import njit


@njit(cache=True)
def lloyd_1d(x, P, C, max_iter):
    """Compiled twin of ``strata._lloyd_1d_numpy``; same arithmetic, same results.

    Returns ``(C, bounds, iterations, converged, trace, ok)``. ``ok`` is
    False when a cluster went empty; outputs are then meaningless.
    """
    R, k = C.shape
    m = x.shape[0]
    bounds = np.zeros((R, k + 1), dtype=np.int64)
    iterations = np.zeros(R, dtype=np.int64)
    converged = np.zeros(R, dtype=np.bool_)
    trace = np.zeros((max_iter, R))
    b = np.zeros(k + 1, dtype=np.int64)
    prev = np.zeros(k + 1, dtype=np.int64)
    s = np.zeros((3, k))
    for r in range(R):
        c = np.sort(C[r])
        for it in range(1, max_iter + 1):
            b[0] = 0
            b[k] = m
            for j in range(k - 1):
                b[j + 1] = np.searchsorted(x, (c[j + 1] + c[j]) / 2, side="right")
            obj = 0.0
            for j in range(k):
                for t in range(3):
                    s[t, j] = P[t, b[j + 1]] - P[t, b[j]]
                if s[0, j] == 0:
                    return C, bounds, iterations, converged, trace, False
                obj += s[2, j] - 2 * c[j] * s[1, j] + c[j] * c[j] * s[0, j]
            trace[it - 1, r] = obj
            iterations[r] = it
            if it > 1:
                same = True
                for j in range(k + 1):
                    if b[j] != prev[j]:
                        same = False
                if same:
                    converged[r] = True
                    break
            prev[:] = b
            for j in range(k):
                c[j] = s[1, j] / s[0, j]
        C[r] = c
        bounds[r] = prev
    return C, bounds, iterations, converged, trace, True


@njit(cache=True)
def counting_sort_desc(nodes, keys):
    if nodes.shape[0] == 0:
        return nodes.copy()
    dmax = keys.max()
    counts = np.zeros(dmax + 2, dtype=np.int64)
    for d in keys:
        counts[dmax - d + 1] += 1
    # counts[r] becomes the first output slot for reversed key r
    for r in range(1, dmax + 2):
        counts[r] += counts[r - 1]
    out = np.empty_like(nodes)
    for i in range(nodes.shape[0]):
        r = dmax - keys[i]
        out[counts[r]] = nodes[i]
        counts[r] += 1
    return out


@njit(cache=True)
def plusplus_1d(x, w, u):
    """k-means++ centers for scalar points, one restart per column of ``u``.

    ``u[j, r]`` is the uniform variate consumed for center ``j`` of restart
    ``r``; the draws match ``strata._plusplus`` exactly.
    """
    k, R = u.shape
    n = x.shape[0]
    C = np.empty((R, k))
    closest = np.empty(n)
    cdf = np.empty(n)
    for r in range(R):
        for j in range(k):
            acc = 0.0
            for i in range(n):
                if j == 0:
                    acc += w[i]
                else:
                    acc += w[i] * closest[i]
                cdf[i] = acc
            if j > 0 and acc <= 0:
                # every point sits on a chosen center: fall back to the weights
                acc = 0.0
                for i in range(n):
                    acc += w[i]
                    cdf[i] = acc
            t = u[j, r] * acc
            idx = 0
            while idx < n - 1 and cdf[idx] <= t:
                idx += 1
            c = x[idx]
            C[r, j] = c
            for i in range(n):
                dd = (x[i] - c) ** 2
                if j == 0 or dd < closest[i]:
                    closest[i] = dd
    return C
