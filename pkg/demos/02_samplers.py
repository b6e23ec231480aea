"""One draw from every sampler at the same fraction, side by side."""
from _graphs import demo_graph
from stratgraph import Algorithm, SampleSpec, sample
from stratgraph.metrics import average_clustering, sample_degree_estimates

g = demo_graph()
phi = 0.15
true_mean = 2 * g.edge_count / g.node_count
print(f"phi={phi}, population mean degree {true_mean:.2f}, "
      f"average clustering {average_clustering(g):.4f}\n")
print(f"{'sampler':<8} {'nodes':>6} {'edges':>7} {'cc':>7} {'mean deg':>9} {'stratified':>10} {'ms':>7}")
for alg in Algorithm:
    sample(g, SampleSpec(alg, phi, seed=0))  # untimed: loads compiled kernels
    res = sample(g, SampleSpec(alg, phi, seed=3))
    sub = res.subgraph
    plain, strat = sample_degree_estimates(g, res)
    print(f"{alg.value:<8} {sub.node_count:>6} {sub.edge_count:>7} "
          f"{average_clustering(sub):>7.4f} {plain:>9.2f} {strat:>10.2f} {res.elapsed_ms:>7.2f}")

res = sample(g, SampleSpec("NSD+", phi, seed=3))
print("\nNS-d+ quotas per stratum", res.details["quotas"], "taken", res.details["taken"])
