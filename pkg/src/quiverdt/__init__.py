"""Exact computation of refined DT invariants of quivers via flow trees."""

from .algebra import BiLaurent, BigRat, LaurentPoly, RatFunc, kappa, substitute_power
from .dt import (
    AttractorTable,
    Decomposition,
    FCache,
    assemble_dt,
    dt_integer_value,
    enumerate_decompositions,
    integer_from_rational,
    rational_from_integer,
)
from .flow import (
    BracketContext,
    epsilon_signs,
    flow_tree_map,
    flow_tree_scalar,
    run_flow,
)
from .lattice import (
    AuxLattice,
    OmegaForm,
    Quiver,
    SkewForm,
    build_aux,
    euler_skew,
    is_gamma_generic,
    sample_beta,
    sample_omega,
)
from .scattering import (
    GradedLie,
    Rank2Diagram,
    bch_log_product,
    check_joint_consistency,
    dt_from_rank2,
    path_ordered_product,
    reconstruct_rank2,
)
from .trees import enumerate_trees, filter_eta, render_tree, tree_count

__version__ = "0.1.0"
