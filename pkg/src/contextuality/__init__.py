"""Finite-dimensional contextuality checks: contexts, valuations, KS sets and rotations."""

__version__ = "0.1.0"

from .contexts import (
    CommutationVerdict,
    Context,
    check_unique_commuting_context,
    context_from_basis,
    context_from_operators,
    contexts_commute,
    contexts_equal,
)
from .hilbert import (
    Ket,
    Tolerance,
    coordinates,
    extend_to_orthonormal_basis,
    inner_product,
    is_orthonormal_basis,
    ket,
    norm,
)
from .ndi import (
    Rotation,
    check_vidp,
    check_vinp,
    ndi_witness,
    rotation_between,
    valuation_defined_on,
)
from .operators import (
    HermitianOperator,
    Projector,
    SpectralDecomposition,
    apply_function,
    commutes,
    is_self_adjoint,
    rank1_projector,
    spectral_decompose,
)
from .raysets import (
    RaySet,
    builtin_rayset,
    enumerate_bases,
    load_rayset,
    orthogonality_graph,
    problem_from_rayset,
    save_rayset,
)
from .valuations import (
    ConstraintStyle,
    GlobalValuationProblem,
    LocalValuation,
    SearchResult,
    Status,
    ValuationMode,
    check_compatibility,
    check_func,
    check_value_rule,
    enumerate_local_valuations,
    search_global_valuation,
    to_dimacs,
    verify_witness,
)

__all__ = [name for name in dir() if not name.startswith("_")]
