"""Triple-patterning layout decomposition.

Assigns layout features (or their stitched segments) to three masks while
minimizing a weighted sum of coloring conflicts and inserted stitches, via an
exact branch-and-bound search and a semidefinite-relaxation pipeline with
optimality-preserving graph reductions.
"""

from .detection import (
    ConstraintClasses,
    InfeasibleWitness,
    find_adjacent_triangles,
    propagate_and_check,
)
from .geometry import (
    Layout,
    LayoutError,
    LayoutGraph,
    ProcessParams,
    Shape,
    build_layout_graph,
    euclidean_gap,
    load_layout,
    project_and_split,
    stitch_candidates,
)
from .graphs import (
    DecompositionGraph,
    MaskAssignment,
    Segment,
    brute_force_optimum,
    connected_components,
    evaluate,
    format_edgelist,
    parse_edgelist,
)
from .ilp import (
    IlpModel,
    SolveReport,
    build_ilp,
    check_encoding,
    decode_bits,
    encode_coloring,
    solve_exact,
    write_lp,
)
from .pipeline import (
    ComponentReport,
    DecomposeConfig,
    DecomposeResult,
    compare_solvers,
    decompose,
    decompose_graph,
)
from .reductions import (
    BridgeCut,
    PeelRecord,
    find_bridges,
    peel_low_degree,
    reinsert_and_color,
    stitch_and_rotate,
)
from .sdp import (
    CostMatrix,
    MappingParams,
    RelaxationSolution,
    SdpConfig,
    build_cost_matrix,
    discrete_vector_objective,
    hyperplane_rounding,
    map_to_masks,
    solve_relaxation,
)

__version__ = "0.1.0"

__all__ = [
    "ConstraintClasses",
    "InfeasibleWitness",
    "find_adjacent_triangles",
    "propagate_and_check",
    "Layout",
    "LayoutError",
    "LayoutGraph",
    "ProcessParams",
    "Shape",
    "build_layout_graph",
    "euclidean_gap",
    "load_layout",
    "project_and_split",
    "stitch_candidates",
    "DecompositionGraph",
    "MaskAssignment",
    "Segment",
    "brute_force_optimum",
    "connected_components",
    "evaluate",
    "format_edgelist",
    "parse_edgelist",
    "IlpModel",
    "SolveReport",
    "build_ilp",
    "check_encoding",
    "decode_bits",
    "encode_coloring",
    "solve_exact",
    "write_lp",
    "ComponentReport",
    "DecomposeConfig",
    "DecomposeResult",
    "compare_solvers",
    "decompose",
    "decompose_graph",
    "BridgeCut",
    "PeelRecord",
    "find_bridges",
    "peel_low_degree",
    "reinsert_and_color",
    "stitch_and_rotate",
    "CostMatrix",
    "MappingParams",
    "RelaxationSolution",
    "SdpConfig",
    "build_cost_matrix",
    "discrete_vector_objective",
    "hyperplane_rounding",
    "map_to_masks",
    "solve_relaxation",
]
