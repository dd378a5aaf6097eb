"""Rotations, definedness of local valuations, and the no-dynamical-invariance witness.

A local valuation lives on the projectors of one context.  Rotating a vector
``x`` onto a context eigenvector keeps the valuation defined on its rank-1
projector; rotating it onto a superposition of two eigenvectors leaves the
context's algebra and the valuation undefined.  Norms and spectra
(nomological properties) are preserved by every rotation, while definedness
of the valuation (a dynamical property) is not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contexts import Context, projectors_equal
from .errors import DimensionMismatchError, NotMaximalError, NotUnitaryError, ZeroVectorError
from .hilbert import Ket, Tolerance, norm
from .operators import HermitianOperator, random_unitary, rank1_projector
from .valuations import LocalValuation

__all__ = [
    "Rotation",
    "NdiWitness",
    "VinpVerdict",
    "VidpReport",
    "rotation_between",
    "random_rotation",
    "valuation_defined_on",
    "ndi_witness",
    "check_vinp",
    "check_vidp",
]

_UNITARITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Rotation:
    """Unitary matrix; construction fails if ``||U^dagger U - I||_max > 1e-10``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError("rotation must be square")
        res = unitarity_residual(m)
        if res > _UNITARITY_TOL:
            raise NotUnitaryError(f"matrix is not unitary (residual {res:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def apply(self, x: Ket) -> Ket:
        if x.dim != self.dim:
            raise DimensionMismatchError(f"dimension mismatch: {self.dim} vs {x.dim}")
        return Ket(self.matrix @ x.components)

    def conjugate(self, A: HermitianOperator) -> HermitianOperator:
        """``U A U^dagger``."""
        m = self.matrix @ A.matrix @ self.matrix.conj().T
        return HermitianOperator((m + m.conj().T) / 2)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.matrix, np.eye(self.dim)))


def unitarity_residual(m: np.ndarray) -> float:
    return float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())


def rotation_between(x: Ket, y: Ket) -> Rotation:
    """Unitary sending ``x`` to ``(||x||/||y||) y``.

    Composes a Householder reflection, which maps ``x`` onto the target up to
    a phase, with a one-dimensional phase reflection fixing that phase.
    Returns the identity when ``x`` already equals the target.
    """
    if x.dim != y.dim:
        raise DimensionMismatchError(f"dimension mismatch: {x.dim} vs {y.dim}")
    nx, ny = norm(x), norm(y)
    if nx == 0 or ny == 0:
        raise ZeroVectorError("rotation_between needs nonzero vectors")
    a = x.components
    t = (nx / ny) * y.components
    d = x.dim
    if np.abs(a - t).max() <= 1e-15 * nx:
        return Rotation(np.eye(d, dtype=complex))
    overlap = np.vdot(t, a)  # <x|t> in the first-slot-linear convention
    phase = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    u = np.eye(d, dtype=complex)
    w = a - phase * t
    wn = np.linalg.norm(w)
    if wn > 1e-15 * nx:
        w = w / wn
        u = u - 2.0 * np.outer(w, w.conj())
    if phase != 1.0:
        e = t / np.linalg.norm(t)
        u = (np.eye(d) + (np.conj(phase) - 1.0) * np.outer(e, e.conj())) @ u
    return Rotation(u)


def random_rotation(dim: int, rng: np.random.Generator) -> Rotation:
    return Rotation(random_unitary(dim, rng))


def valuation_defined_on(v: LocalValuation, y: Ket, tol: Tolerance | float | None = None) -> bool:
    """True iff ``|y><y|`` is one of the projectors ``v`` assigns a value to."""
    if y.dim != v.context.dim:
        raise DimensionMismatchError(f"dimension mismatch: {y.dim} vs {v.context.dim}")
    if norm(y) == 0:
        raise ZeroVectorError("definedness of the zero vector")
    p = rank1_projector(y)
    return any(projectors_equal(p, q, tol) for q in v.context.projectors)


@dataclass(frozen=True, eq=False)
class NdiWitness:
    context: Context
    valuation: LocalValuation
    x: Ket
    z: Ket
    U_defined: Rotation
    y: Ket
    U_undefined: Rotation
    defined_on_z: bool
    defined_on_y: bool

    def residuals(self) -> dict[str, float]:
        nx = norm(self.x)
        return {
            "defined_map": float(np.abs(self.U_defined.matrix @ self.x.components - self.z.components).max()),
            "undefined_map": float(np.abs(self.U_undefined.matrix @ self.x.components - self.y.components).max()),
            "defined_unitarity": unitarity_residual(self.U_defined.matrix),
            "undefined_unitarity": unitarity_residual(self.U_undefined.matrix),
            "norm_z": abs(norm(self.z) - nx),
            "norm_y": abs(norm(self.y) - nx),
        }


def ndi_witness(
    ctx: Context, v: LocalValuation, x: Ket, tol: Tolerance | float | None = None
) -> NdiWitness:
    """Two rotations of ``x``: one onto a context eigenvector, one off the context.

    ``z`` is the first context eigenvector scaled to ``||x||``; ``y`` is the
    normalized sum of the first two eigenvectors scaled to ``||x||``.
    """
    if not ctx.maximal:
        raise NotMaximalError("ndi_witness needs a maximal context")
    if ctx.dim < 2:
        raise DimensionMismatchError("dimension 1 has no direction outside the context")
    if x.dim != ctx.dim:
        raise DimensionMismatchError(f"dimension mismatch: {x.dim} vs {ctx.dim}")
    nx = norm(x)
    if nx == 0:
        raise ZeroVectorError("ndi_witness needs a nonzero vector")
    e = ctx.basis()
    z = Ket(nx * e[0].components)
    s = e[0].components + e[1].components
    y = Ket(nx * s / np.linalg.norm(s))
    u_def = rotation_between(x, z)
    u_undef = rotation_between(x, y)
    return NdiWitness(
        context=ctx,
        valuation=v,
        x=x,
        z=z,
        U_defined=u_def,
        y=y,
        U_undefined=u_undef,
        defined_on_z=valuation_defined_on(v, z, tol),
        defined_on_y=valuation_defined_on(v, y, tol),
    )


@dataclass(frozen=True)
class VinpVerdict:
    norm_invariant: bool
    spectrum_invariant: bool


def check_vinp(x: Ket, A: HermitianOperator, U: Rotation | np.ndarray) -> VinpVerdict:
    """Invariance of norm (1e-10) and eigenvalue multiset (1e-8) under ``U``."""
    if not isinstance(U, Rotation):
        U = Rotation(np.asarray(U))
    if x.dim != U.dim or A.dim != U.dim:
        raise DimensionMismatchError("vector, operator and rotation dimensions differ")
    norm_ok = abs(norm(U.apply(x)) - norm(x)) <= 1e-10
    before = np.linalg.eigvalsh(A.matrix)
    after = np.linalg.eigvalsh(U.conjugate(A).matrix)
    spec_ok = bool(np.abs(np.sort(before) - np.sort(after)).max() <= 1e-8)
    return VinpVerdict(norm_invariant=norm_ok, spectrum_invariant=spec_ok)


@dataclass(frozen=True)
class VidpReport:
    trials: int
    seed: int
    random_defined: int
    random_defined_fraction: float
    witness_defined: bool
    witness_undefined: bool
    defined: int
    undefined: int

    @property
    def vidp_fails(self) -> bool:
        """Both outcomes occur, so definedness is not rotation invariant."""
        return self.defined > 0 and self.undefined > 0


def check_vidp(
    ctx: Context,
    v: LocalValuation,
    x: Ket,
    trials: int,
    seed: int,
    tol: Tolerance | float | None = None,
) -> VidpReport:
    """Definedness of ``v`` on seeded random rotations of ``x``, plus the witness pair.

    Trial ``k`` draws its rotation from ``default_rng([seed, k])`` so trials
    are independent of evaluation order.
    """
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    hits = 0
    for k in range(trials):
        rot = random_rotation(ctx.dim, np.random.default_rng([seed, k]))
        if valuation_defined_on(v, rot.apply(x), tol):
            hits += 1
    w = ndi_witness(ctx, v, x, tol)
    defined = hits + int(w.defined_on_z) + int(w.defined_on_y)
    total = trials + 2
    return VidpReport(
        trials=trials,
        seed=seed,
        random_defined=hits,
        random_defined_fraction=(hits / trials) if trials else 0.0,
        witness_defined=w.defined_on_z,
        witness_undefined=not w.defined_on_y,
        defined=defined,
        undefined=total - defined,
    )
