"""Small benchmark grid written to CSV, then rerun to show resumption."""
import tempfile
from pathlib import Path

from _graphs import demo_graph
from stratgraph.bench import ExperimentConfig, run_bench

g = demo_graph()
with tempfile.TemporaryDirectory() as tmp:
    cfg = ExperimentConfig(dataset="synthetic.txt", fractions=(0.05, 0.15, 0.25),
                           repetitions=10, output_dir=tmp)
    out = run_bench(cfg, graph=g)
    print(f"computed {out.computed} repetitions -> {Path(out.experiment_csv).name}")
    print(f"\n{'algorithm':<8} {'phi':>5} {'ks_degree':>10} {'cc error':>9} {'ms':>7}")
    for s in out.summary:
        print(f"{s['algorithm']:<8} {s['fraction']:>5} {float(s['ks_degree_median']):>10.4f} "
              f"{float(s['clustering_error_median']):>9.4f} {float(s['elapsed_ms_mean']):>7.2f}")
    again = run_bench(cfg, graph=g)
    print(f"\nrerun: {again.computed} computed, {again.skipped} already on disk")
