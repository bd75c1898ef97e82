"""Closed-curve reconstruction from unordered samples on meshes, in R^d and in SE(3)."""

from ._kernels import BACKEND
from .errors import (
    CurveReconError,
    DisconnectedError,
    InvalidInputError,
    MeshFormatError,
    NonManifoldError,
    ReconstructionError,
    UndefinedFeatureSizeError,
    UnsatisfiableSamplingError,
)
from .geodesic import (
    VoronoiPartition,
    distance_field,
    dual_voronoi_graph,
    multi_source_propagate,
    pairwise_distances,
    shortest_vertex_path,
)
from .graphs import ProximityGraph, bridge_components, nearest_neighbor_distances, sig_graph, sigdv_graph
from .mesh import TriMesh, ValidationReport, edge_graph, load_mesh, save_mesh, validate_manifold
from .metrics import (
    EuclideanPointSet,
    MetricPointSet,
    RigidMotionSample,
    SE3PointSet,
    canonicalize,
    embed_se3_r7,
    se3_distance,
    so3_distance,
    witness_dual_voronoi,
)
from .pipeline import (
    ReconstructionOptions,
    ReconstructionResult,
    extract_isoline_samples,
    mst_chain_baseline,
    reconstruct,
    reconstruct_motion,
    reconstruct_multi,
    reconstruct_points,
)
from .sampling import (
    DiscreteCurve,
    MedialAxisApprox,
    SamplingReport,
    approximate_medial_axis,
    check_rho_sampling,
    check_uniform_sampling,
    local_feature_size,
    local_feature_sizes,
    nonuniformity_ratios,
    subsample_curve,
)
from .tsp import Tour, minimum_spanning_tree, preorder_tour, solve_tsp, two_opt_refine

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
