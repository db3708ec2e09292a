"""Necessary conditions for extending a first-order flex of a closed
triangulated polyhedral surface to a continuous flex."""

from .dehn import (
    LengthBasis,
    LengthDecomposition,
    auto_basis,
    decompose_lengths,
    decomposition_from_alpha,
    dehn_equations,
    dehn_expression_values,
    evaluate_dehn,
    per_edge_branch_consistency,
)
from .edges import (
    Policy,
    Variant,
    angle_derivative,
    dihedral_data,
    dihedral_from_points,
    g_vectors,
    pq_vectors,
    rs_vectors,
)
from .errors import *  # noqa: F401,F403
from .flexspace import (
    edge_length_residuals,
    flex_space,
    is_first_order_flex,
    is_nontrivial,
    rigidity_matrix,
    trivial_motions,
)
from .mesh import (
    EdgeFrame,
    Polyhedron,
    build_polyhedron,
    edge_frames,
    is_face_degenerate,
    topology_stats,
)
from .minors import (
    MinorIndex,
    minimal_vanishing_size,
    minor_directional_derivative,
    minor_stationarity_report,
    minor_value,
    rank_profile,
)
from .oracle import (
    Example,
    continue_flex,
    fd_angle_derivative,
    fd_minor_derivative,
    gen_example,
)

__version__ = "0.1.0"
