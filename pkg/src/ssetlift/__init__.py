"""Truncated simplicial sets, widenings, iso-horns, and lifting checks."""

from .kernel import (
    FiniteCategory,
    Inclusion,
    SimplicialMap,
    SsetError,
    TruncatedSimplicialSet,
    UsageError,
    ValidationError,
    ValidationReport,
    boundary_inclusion,
    coproduct,
    full_subcomplex,
    identity_map,
    make_boundary,
    make_delta,
    make_empty,
    make_horn,
    make_J,
    make_standard,
    make_terminal,
    nerve,
    nondegenerate_simplices,
    product,
    pushout,
    skeleton,
    validate_map,
    validate_sset,
)
from .widening import (
    RetractWitness,
    WidenedInclusion,
    Widening,
    decompose_to_single,
    factor_widened,
    is_narrow,
    partial_projection,
    retract_witness,
    retraction,
    widen,
    widened_inclusion,
    widening_iso,
)
from .isohorn import (
    CellDecomposition,
    IsoHorn,
    Isoplex,
    NotNarrowError,
    decompose_single_narrow,
    isohorn,
    isohorn_as_widened,
    isoplex,
    isoplex_face,
    verify_decomposition,
)
from .lifting import (
    NO_LIFT,
    LiftingProblem,
    RlpReport,
    check_rlp,
    class_A,
    enumerate_maps,
    equivalence_report,
    fibrancy_problem,
    iter_lifts,
    oracle_finds_lift,
    pushout_product,
    solve_lift,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
