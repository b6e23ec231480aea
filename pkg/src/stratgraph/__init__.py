"""Degree-stratified graph sampling (NS-d, NS-d+) with baseline samplers and metrics."""
from .graph import (Graph, ParseError, bfs_distances, connected_components, degrees,
                    induce_subgraph, load_edge_list)
from .metrics import MetricsReport, compute_metrics, diameter, ks_statistic
from .samplers import (Algorithm, SampleResult, SampleSpec, counting_sort_desc, es, es_i,
                       ffs, ns, ns_d, ns_d_plus, sample, stratum_quotas)
from .strata import (Stratum, StratumAssignment, correlation_distance, kmeans, silhouette,
                     silhouette_sweep, stratify_by_degree)

__version__ = "0.1.0"
