"""Full metric report for a graph and for one NS-d sample of it."""
from _graphs import demo_graph
from stratgraph import compute_metrics, ks_statistic, ns_d

g = demo_graph()
full = compute_metrics(g)
part = compute_metrics(ns_d(g, 0.2, seed=1).subgraph)

print(f"{'':<20} {'graph':>10} {'sample':>10}")
for key, value in full.scalars().items():
    other = part.scalars()[key]
    fmt = (lambda v: f"{v:>10.4f}") if isinstance(value, float) else (lambda v: f"{v!s:>10}")
    print(f"{key:<20} {fmt(value)} {fmt(other)}")

print(f"\nKS distance between degree distributions: "
      f"{ks_statistic(full.degree_distribution, part.degree_distribution):.4f}")
