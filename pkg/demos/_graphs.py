"""Shared input for the demos: a real edge list if given, else a synthetic one."""
import sys

import numpy as np

from stratgraph import Graph, load_edge_list


def chung_lu(n=4000, exponent=2.3, mean_degree=20, seed=7):
    # expected degrees follow a power law; edge (u, v) kept with prob w_u w_v / sum(w)
    rng = np.random.default_rng(seed)
    w = (1 - rng.random(n)) ** (-1 / (exponent - 1))
    w *= mean_degree / w.mean()
    m = int(w.sum() / 2)
    p = w / w.sum()
    src = rng.choice(n, size=m, p=p)
    dst = rng.choice(n, size=m, p=p)
    return Graph.from_edges(n, src, dst)


def demo_graph():
    if len(sys.argv) > 1:
        print(f"loading {sys.argv[1]}")
        return load_edge_list(sys.argv[1])
    g = chung_lu()
    print("synthetic power-law graph (pass a SNAP edge list to use real data)")
    return g
