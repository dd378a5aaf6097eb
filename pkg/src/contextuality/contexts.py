"""Contexts: commutative subalgebras stored by their minimal projectors.

A context generated by pairwise commuting self-adjoint operators is fully
determined by its minimal spectral projectors, which are mutually orthogonal
and sum to the identity.  That finite list is the representation used here.
The context is maximal when every projector has rank one.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    NonCommutingError,
    NotMaximalError,
    NotOrthonormalError,
    OutsideContextError,
)
from .hilbert import Ket, Tolerance, as_tolerance, inner_product, is_orthonormal_basis, norm_squared
from .operators import (
    HermitianOperator,
    Projector,
    _decompose_matrix,
    commutator_norm,
    commutes,
    operators_in,
    rank1_projector,
)

__all__ = [
    "Context",
    "CommutationVerdict",
    "context_from_operators",
    "context_from_basis",
    "contexts_equal",
    "contexts_commute",
    "check_unique_commuting_context",
    "projectors_equal",
    "expand_in_context",
]

_ORDER_DECIMALS = 9
_LEAD_THRESHOLD = 1e-6


def _canonical_key(p: Projector) -> tuple:
    m = p.matrix
    col_norms = np.linalg.norm(m, axis=0)
    j = int(np.argmax(col_norms > _LEAD_THRESHOLD))
    entries = []
    for c in m[:, j]:
        entries.append(-round(float(c.real), _ORDER_DECIMALS) + 0.0)
        entries.append(-round(float(c.imag), _ORDER_DECIMALS) + 0.0)
    return (p.rank, j, tuple(entries))


@dataclass(frozen=True, eq=False)
class Context:
    """Mutually orthogonal projectors summing to the identity, in canonical order.

    Order: rank, then the index of the first non-negligible column, then that
    column's entries in decreasing lexicographic order (so the standard basis
    comes out as e1, e2, ...).  Use :meth:`from_projectors` rather than the
    raw constructor.
    """

    dim: int
    projectors: tuple[Projector, ...]

    @classmethod
    def from_projectors(cls, projectors: Sequence[Projector], tol: Tolerance | float | None = None) -> Context:
        projectors = list(projectors)
        if not projectors:
            raise ValueError("a context needs at least one projector")
        d = projectors[0].dim
        if any(p.dim != d for p in projectors):
            raise DimensionMismatchError("projectors of mixed dimension")
        eps = max(as_tolerance(tol).eps, 1e-10)
        total = sum(p.matrix for p in projectors)
        if np.abs(total - np.eye(d)).max() > 10 * eps:
            raise ValueError("projectors do not sum to the identity")
        for i, p in enumerate(projectors):
            for q in projectors[i + 1 :]:
                if np.abs(p.matrix @ q.matrix).max() > 10 * eps:
                    raise ValueError("projectors are not mutually orthogonal")
        return cls(d, tuple(sorted(projectors, key=_canonical_key)))

    @property
    def maximal(self) -> bool:
        return all(p.rank == 1 for p in self.projectors)

    def __len__(self):
        return len(self.projectors)

    def basis(self) -> list[Ket]:
        """Unit eigenvectors of a maximal context, one per projector."""
        if not self.maximal:
            raise NotMaximalError("only maximal contexts have a distinguished basis")
        return [p.unit_vector() for p in self.projectors]

    def generator(self) -> HermitianOperator:
        """``C = sum_i (i+1) P_i``; every element of the context is a function of C."""
        m = sum((k + 1) * p.matrix for k, p in enumerate(self.projectors))
        return HermitianOperator(m)


@dataclass(frozen=True)
class CommutationVerdict:
    equal: bool
    commute: bool
    theorem_holds: bool


def context_from_operators(
    ops: Sequence[HermitianOperator], tol: Tolerance | float | None = None
) -> Context:
    """Context generated by pairwise commuting operators.

    Decomposes the first operator, then splits each eigenspace by the next
    operator restricted to it, and so on.  The resulting minimal projectors
    generate an algebra containing every input.
    """
    ops = list(ops)
    if not ops:
        raise ValueError("need at least one generating operator")
    d = operators_in(ops)
    eps = as_tolerance(tol).eps
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            if not commutes(ops[i], ops[j], tol):
                raise NonCommutingError(i, j, commutator_norm(ops[i], ops[j]))
    blocks = [np.eye(d, dtype=complex)]
    for op in ops:
        refined = []
        for v in blocks:
            restricted = v.conj().T @ op.matrix @ v
            restricted = (restricted + restricted.conj().T) / 2
            _, sub_bases, _ = _decompose_matrix(restricted, eps)
            refined.extend(v @ w for w in sub_bases)
        blocks = refined
    projectors = []
    for v in blocks:
        p = v @ v.conj().T
        projectors.append(Projector(HermitianOperator((p + p.conj().T) / 2), v.shape[1]))
    return Context.from_projectors(projectors, tol)


def context_from_basis(basis: Sequence[Ket], tol: Tolerance | float | None = None) -> Context:
    """Maximal context of the rank-1 projectors onto an orthonormal basis."""
    basis = list(basis)
    if not is_orthonormal_basis(basis, tol):
        raise NotOrthonormalError("context_from_basis needs an orthonormal basis")
    return Context.from_projectors([rank1_projector(x) for x in basis], tol)


def projectors_equal(p: Projector, q: Projector, tol: Tolerance | float | None = None) -> bool:
    """Phase-blind projector equality.

    Rank-1 projectors are compared through their spanning vectors,
    ``|<x|y>|^2 == <x|x><y|y>`` (exactly when both vectors are exact);
    higher ranks entrywise.
    """
    if p.dim != q.dim or p.rank != q.rank:
        return False
    eps = as_tolerance(tol).eps
    if p.rank == 1:
        x = p.vector if p.vector is not None else p.unit_vector()
        y = q.vector if q.vector is not None else q.unit_vector()
        ov = inner_product(x, y)
        nx, ny = norm_squared(x), norm_squared(y)
        if x.exact is not None and y.exact is not None:
            return ov.abs2() == nx * ny
        return abs(ov) ** 2 >= (1.0 - eps) * float(nx) * float(ny)
    return bool(np.abs(p.matrix - q.matrix).max() <= eps)


def contexts_equal(A: Context, B: Context, tol: Tolerance | float | None = None) -> bool:
    """True iff the two projector multisets match one-to-one."""
    if A.dim != B.dim:
        raise DimensionMismatchError(f"dimension mismatch: {A.dim} vs {B.dim}")
    if len(A) != len(B):
        return False
    unmatched = list(B.projectors)
    for p in A.projectors:
        for k, q in enumerate(unmatched):
            if projectors_equal(p, q, tol):
                del unmatched[k]
                break
        else:
            return False
    return True


def contexts_commute(A: Context, B: Context, tol: Tolerance | float | None = None) -> bool:
    """True iff every projector of ``A`` commutes with every projector of ``B``."""
    if A.dim != B.dim:
        raise DimensionMismatchError(f"dimension mismatch: {A.dim} vs {B.dim}")
    return all(commutes(p.operator, q.operator, tol) for p in A.projectors for q in B.projectors)


def check_unique_commuting_context(
    A: Context, B: Context, tol: Tolerance | float | None = None
) -> CommutationVerdict:
    """Check that a maximal context commuting with ``A`` can only be ``A``.

    Restricted to maximal contexts: two distinct coarse contexts such as
    {P, 1-P} and {Q, 1-Q} with commuting P, Q do commute.
    """
    for name, ctx in (("first", A), ("second", B)):
        if not ctx.maximal:
            raise NotMaximalError(
                f"{name} context is not maximal; distinct non-maximal contexts can commute"
            )
    equal = contexts_equal(A, B, tol)
    commute = contexts_commute(A, B, tol)
    return CommutationVerdict(equal=equal, commute=commute, theorem_holds=(not commute) or equal)


def expand_in_context(
    ctx: Context, A: HermitianOperator, tol: Tolerance | float | None = None
) -> list[float]:
    """Coefficients ``c_i`` with ``A = sum_i c_i P_i``.

    Raises :class:`OutsideContextError` when ``A`` is not in the algebra.
    """
    if A.dim != ctx.dim:
        raise DimensionMismatchError(f"dimension mismatch: {A.dim} vs {ctx.dim}")
    coeffs = [float(np.trace(p.matrix @ A.matrix).real) / p.rank for p in ctx.projectors]
    rebuilt = sum(c * p.matrix for c, p in zip(coeffs, ctx.projectors))
    residual = float(np.abs(rebuilt - A.matrix).max())
    scale = 1.0 + float(np.abs(A.matrix).max())
    if residual > max(as_tolerance(tol).eps, 1e-10) * scale:
        raise OutsideContextError(f"operator is not in the context (residual {residual:.3e})")
    return coeffs
