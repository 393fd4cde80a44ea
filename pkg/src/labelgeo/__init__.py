"""labelgeo: metric label-space prediction via the Frechet mean.

Adapts any classifier's per-class probability vector to a large label space
whose classes are related by a graph metric, and computes the loci and locus
covers that govern which unobserved classes are reachable.
"""

from .active import (
    SelectionState,
    Trajectory,
    gibbs_sample_classes,
    initial_state,
    metric_centroid,
    next_class_active,
    next_class_passive,
    run_selection,
    tree_locus,
)
from .errors import BudgetExceededError, ValidationError
from .evaluate import (
    CalibrationReport,
    EvalReport,
    PolicyRoundSummary,
    SimplexRegionGrid,
    SweepResult,
    compare_policies,
    evaluate,
    expected_calibration_error,
    relative_improvement,
    simplex_regions,
    temperature_sweep,
)
from .frechet import (
    DistanceAdaptor,
    Prediction,
    adaptor_predict,
    beta_predict,
    build_adaptor,
    frechet_mean,
    frechet_variance,
    predict_batch,
    softmax_with_temperature,
)
from .graphs import (
    DistanceMatrix,
    LabelGraph,
    LabelSpace,
    PathOracle,
    all_pairs_distances,
    generate_random,
    load_edge_list,
    load_embeddings_csv,
    load_names,
    make_complete,
    make_grid,
    metric_from_embeddings,
    save_edge_list,
    space_from_embeddings,
    summarize_graph,
)
from .locus import (
    CoverReport,
    Locus,
    check_pairwise_decomposable,
    default_resolution,
    identifying_cover_grid,
    is_locus_cover,
    locus_general,
    locus_pairwise,
    min_cover_grid,
    min_cover_tree,
    phylo_cover,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "CalibrationReport",
    "CoverReport",
    "DistanceAdaptor",
    "DistanceMatrix",
    "EvalReport",
    "LabelGraph",
    "LabelSpace",
    "Locus",
    "PathOracle",
    "PolicyRoundSummary",
    "Prediction",
    "SelectionState",
    "SimplexRegionGrid",
    "SweepResult",
    "Trajectory",
    "ValidationError",
    "adaptor_predict",
    "all_pairs_distances",
    "beta_predict",
    "build_adaptor",
    "check_pairwise_decomposable",
    "compare_policies",
    "default_resolution",
    "evaluate",
    "expected_calibration_error",
    "frechet_mean",
    "frechet_variance",
    "generate_random",
    "gibbs_sample_classes",
    "identifying_cover_grid",
    "initial_state",
    "is_locus_cover",
    "load_edge_list",
    "load_embeddings_csv",
    "load_names",
    "locus_general",
    "locus_pairwise",
    "make_complete",
    "make_grid",
    "metric_centroid",
    "metric_from_embeddings",
    "min_cover_grid",
    "min_cover_tree",
    "next_class_active",
    "next_class_passive",
    "phylo_cover",
    "predict_batch",
    "relative_improvement",
    "run_selection",
    "save_edge_list",
    "simplex_regions",
    "softmax_with_temperature",
    "space_from_embeddings",
    "summarize_graph",
    "temperature_sweep",
    "tree_locus",
]
