"""Typed-graphlet spectral clustering for heterogeneous graphs.

Builds motif-weighted adjacency matrices from induced typed-graphlet
occurrences and runs sweep-cut spectral clustering, node embeddings,
vertex orderings, and an evaluation harness on top of them.
"""

from .errors import (
    DegenerateCutError,
    EdgeListFormatError,
    EigenConvergenceError,
    GraphletAbsentError,
    UnknownTypeError,
    ZeroVolumeError,
)
from .graph import (
    HeteroGraph,
    WeightedGraph,
    brute_force_min_weighted_conductance,
    connected_components,
    inverse_permutation,
    load_typed_edge_list,
    permute_graph,
    read_typed_edge_list,
    weighted_conductance,
    weighted_cut,
    weighted_volume,
)
from .graphlets import (
    SKELETON_ORDER,
    SKELETONS,
    GraphletInstance,
    Skeleton,
    TypedGraphletSignature,
    brute_force_all_instances,
    brute_force_instances,
    census,
    enumerate_all_instances,
    enumerate_instances,
    enumerate_typed_instances,
    format_signature,
    instances_matching,
    parse_signature_spec,
    per_edge_instance_counts,
    resolve_skeleton,
    signature_of,
)
from .motifmatrix import (
    MotifMatrix,
    NormalizedLaplacian,
    brute_force_min_conductance,
    build_motif_matrix,
    build_normalized_laplacian,
    edge_expansion_measure,
    normalized_laplacian,
    typed_conductance,
    typed_cut,
    typed_degree,
    typed_volume,
)
from .spectral import (
    ClusterResult,
    EigenPair,
    MotifRank,
    OrderingResult,
    PartitionResult,
    RankResult,
    SweepResult,
    cluster,
    rank_typed_graphlets,
    recursive_bipartition,
    smallest_eigenpairs,
    spectral_embedding,
    spectral_ordering,
    sweep_cut,
)
from .evaluation import (
    EDGE_OPERATORS,
    EdgeDataset,
    LinkPredResult,
    MetricsReport,
    compressed_size_estimate,
    compute_metrics,
    edge_embed,
    external_conductance,
    link_prediction_eval,
    planted_partition,
    predict_scores,
    split_edges,
    summarize_trials,
    train_linear_classifier,
)

__version__ = "0.1.0"
