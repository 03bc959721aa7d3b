"""Leveled attracting/repelling decompositions of interval maps.

Computes, for continuous piecewise-monotone maps of [0,1], the nested chain
of attracting sets and their dual repelling sets, classifies backward limit
sets against it, detects first-return (renormalization) structure on Lorenz
maps, and builds explicit Lyapunov functions whose level values read the
chain back.  Everything is grounded in a rigorous box outer approximation:
a transition graph over a dyadic interval cover, confirmed across one
refinement doubling.
"""

from .boxgraph import (
    BoxCover,
    TransitionGraph,
    build_graph,
    inv,
    inv_m,
    is_isolating,
    reach,
    recurrent_components,
)
from .cli import RunConfig, emit, main, parse_config, run_pipeline
from .decomposition import (
    AlphaClass,
    ARChain,
    ARLevel,
    alpha_limit_estimate,
    classify_alpha,
    leveled_decomposition,
    maximal_proper_attracting_set,
    repelling_set,
)
from .errors import (
    AmbiguousCriticalPointError,
    AmbiguousLevelError,
    ArdecompError,
    DomainError,
    EmptyPreimageError,
    InconsistencyError,
    MapValidationError,
    OnOverlapError,
    ResolutionTooCoarseError,
    UndefinedDistanceError,
)
from .intervals import (
    IntervalUnion,
    distance_point,
    empty,
    from_pairs,
    full,
    hausdorff,
    normalize,
    point,
    set_algebra,
)
from .lyapunov import (
    LyapunovEvaluator,
    alpha_from_v,
    evaluator_from_chain,
    g_morse,
    g_pair,
    h_value,
    v_value,
    verify_monotone,
)
from .maps import (
    Branch,
    PiecewiseMap,
    doubling_map,
    load_map_file,
    logistic_map,
    map_from_json,
    map_to_json,
    pl_lorenz_map,
    sqrt2_lorenz_map,
    square_map,
)
from .renorm import (
    RenormResult,
    attracting_set_from_renorm,
    detect_renormalization,
    orbit_avoiding_set,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaClass",
    "AmbiguousCriticalPointError",
    "AmbiguousLevelError",
    "ARChain",
    "ARLevel",
    "ArdecompError",
    "BoxCover",
    "Branch",
    "DomainError",
    "EmptyPreimageError",
    "InconsistencyError",
    "IntervalUnion",
    "LyapunovEvaluator",
    "MapValidationError",
    "OnOverlapError",
    "PiecewiseMap",
    "RenormResult",
    "ResolutionTooCoarseError",
    "RunConfig",
    "TransitionGraph",
    "UndefinedDistanceError",
    "alpha_from_v",
    "alpha_limit_estimate",
    "attracting_set_from_renorm",
    "build_graph",
    "classify_alpha",
    "detect_renormalization",
    "distance_point",
    "doubling_map",
    "emit",
    "empty",
    "evaluator_from_chain",
    "from_pairs",
    "full",
    "g_morse",
    "g_pair",
    "h_value",
    "hausdorff",
    "inv",
    "inv_m",
    "is_isolating",
    "leveled_decomposition",
    "load_map_file",
    "logistic_map",
    "main",
    "map_from_json",
    "map_to_json",
    "maximal_proper_attracting_set",
    "normalize",
    "orbit_avoiding_set",
    "parse_config",
    "pl_lorenz_map",
    "point",
    "reach",
    "recurrent_components",
    "repelling_set",
    "run_pipeline",
    "set_algebra",
    "sqrt2_lorenz_map",
    "square_map",
    "v_value",
    "verify_monotone",
]
