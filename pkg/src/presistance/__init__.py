"""Effective p-resistance toolkit.

Computes exact and pseudoinverse-approximated p-resistances on weighted
undirected graphs, the associated metric, two-sided approximation bounds,
and distance-matrix clustering on top of them.
"""

from . import errors
from .clustering import (
    ClusterResult,
    Evaluation,
    error_rate,
    farthest_first,
    k_medoids,
    sc2_baseline,
)
from .graph import (
    Graph,
    build_graph,
    generate,
    incidence,
    is_tree,
    laplacian,
    read_edge_list,
    write_edge_list,
)
from .numerics import (
    ApproximationBound,
    LaplacianPinv,
    PNormEstimate,
    approximation_bound,
    conjugate_exponent,
    graph_p_seminorm,
    laplacian_pinv,
    load_laplacian_pinv,
    matrix_op_pnorm,
    save_laplacian_pinv,
    weighted_p_norm,
)
from .pipeline import (
    BenchResult,
    FeatureDataset,
    GraphBuildParams,
    bench_grid,
    knn_gaussian_graph,
    load_features,
    ratio_sweep,
)
from .resistance import (
    DistanceMatrix,
    PairQuery,
    SolverConfig,
    SolverReport,
    approx_metric,
    approx_presistance,
    distance_matrix,
    exact_presistance,
    export_distance_csv,
    load_distance_matrix,
    mincut,
    p_energy,
    p_energy_gradient,
    save_distance_matrix,
    shortest_path,
    ssl_solve,
)

__version__ = "0.1.0"

__all__ = [
    "ApproximationBound",
    "BenchResult",
    "ClusterResult",
    "DistanceMatrix",
    "Evaluation",
    "FeatureDataset",
    "Graph",
    "GraphBuildParams",
    "LaplacianPinv",
    "PNormEstimate",
    "PairQuery",
    "SolverConfig",
    "SolverReport",
    "approx_metric",
    "approx_presistance",
    "approximation_bound",
    "bench_grid",
    "build_graph",
    "conjugate_exponent",
    "distance_matrix",
    "error_rate",
    "errors",
    "exact_presistance",
    "export_distance_csv",
    "farthest_first",
    "generate",
    "graph_p_seminorm",
    "incidence",
    "is_tree",
    "k_medoids",
    "knn_gaussian_graph",
    "laplacian",
    "laplacian_pinv",
    "load_distance_matrix",
    "load_features",
    "load_laplacian_pinv",
    "matrix_op_pnorm",
    "mincut",
    "p_energy",
    "p_energy_gradient",
    "ratio_sweep",
    "read_edge_list",
    "sc2_baseline",
    "save_distance_matrix",
    "save_laplacian_pinv",
    "shortest_path",
    "ssl_solve",
    "weighted_p_norm",
    "write_edge_list",
]
