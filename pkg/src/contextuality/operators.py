"""Self-adjoint operators, spectral projectors and functional calculus."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from ._exact import ExactComplex, to_exact
from .errors import (
    DimensionMismatchError,
    NotSelfAdjointError,
    SpectralError,
    ZeroVectorError,
)
from .hilbert import Ket, Tolerance, as_tolerance, norm_squared

__all__ = [
    "HermitianOperator",
    "Projector",
    "SpectralDecomposition",
    "is_self_adjoint",
    "spectral_decompose",
    "rank1_projector",
    "commutes",
    "commutator_norm",
    "apply_function",
    "identity",
    "diag",
    "random_hermitian",
    "random_unitary",
]

# Hermiticity slack applied when wrapping a floating-point matrix.
_HERMITIAN_SLACK = 1e-12


def _exact_matrix(rows) -> tuple[tuple[ExactComplex, ...], ...] | None:
    out = []
    for row in rows:
        conv = [to_exact(v) for v in row]
        if any(c is None for c in conv):
            return None
        out.append(tuple(conv))
    return tuple(out)


def _exact_matmul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = ExactComplex(0)
            for k in range(m):
                acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


class HermitianOperator:
    """Immutable self-adjoint ``dim x dim`` matrix.

    Built from a nested list of exact scalars, it keeps an exact copy in
    ``exact`` alongside the float ``matrix``.  Floating-point input is checked
    for Hermiticity to within 1e-12 (relative to its largest entry) and then
    symmetrized.
    """

    __slots__ = ("matrix", "exact")

    def __init__(self, entries, *, exact=None):
        if isinstance(entries, HermitianOperator):
            m, exact = entries.matrix, entries.exact
        else:
            if exact is None and not isinstance(entries, np.ndarray):
                exact = _exact_matrix(entries)
            m = np.array(
                [[complex(v) for v in row] for row in entries]
                if not isinstance(entries, np.ndarray)
                else entries,
                dtype=complex,
            )
            if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
                raise DimensionMismatchError(f"operator must be a nonempty square matrix, got shape {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ValueError("operator entries must be finite")
            if exact is not None:
                n = len(exact)
                if any(exact[i][j] != exact[j][i].conjugate() for i in range(n) for j in range(i, n)):
                    raise NotSelfAdjointError("matrix is not self-adjoint")
            else:
                scale = 1.0 + float(np.abs(m).max())
                if np.abs(m - m.conj().T).max() > _HERMITIAN_SLACK * scale:
                    raise NotSelfAdjointError("matrix is not self-adjoint")
                m = (m + m.conj().T) / 2
        m = np.array(m, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):
        raise AttributeError("HermitianOperator is immutable")

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)

    def op_norm(self) -> float:
        return float(np.linalg.norm(self.matrix, ord=2))

    def apply(self, x: Ket) -> Ket:
        if x.dim != self.dim:
            raise DimensionMismatchError(f"dimension mismatch: {self.dim} vs {x.dim}")
        if self.exact is not None and x.exact is not None:
            return Ket(
                [sum((a * b for a, b in zip(row, x.exact)), ExactComplex(0)) for row in self.exact]
            )
        return Ket(self.matrix @ x.components)

    def __repr__(self):
        return f"HermitianOperator({np.array2string(self.matrix, precision=6)})"


def identity(dim: int) -> HermitianOperator:
    return HermitianOperator([[1 if i == j else 0 for j in range(dim)] for i in range(dim)])


def diag(*values) -> HermitianOperator:
    if len(values) == 1 and isinstance(values[0], (list, tuple, np.ndarray)):
        values = tuple(values[0])
    n = len(values)
    return HermitianOperator([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector of the given rank.

    ``vector`` optionally records a spanning vector for rank-1 projectors
    built from a ket; it is informational and never normalized in place.
    """

    operator: HermitianOperator
    rank: int
    vector: Ket | None = None

    def __post_init__(self):
        p = self.operator.matrix
        if self.rank < 1:
            raise ValueError("projector rank must be positive")
        if np.abs(p @ p - p).max() > 1e-9:
            raise ValueError("operator is not idempotent")
        if abs(np.trace(p).real - self.rank) > 1e-9:
            raise ValueError(f"trace {np.trace(p).real:.6g} does not match rank {self.rank}")

    @property
    def matrix(self) -> np.ndarray:
        return self.operator.matrix

    @property
    def dim(self) -> int:
        return self.operator.dim

    def range_basis(self) -> list[Ket]:
        """Deterministic orthonormal basis of the range.

        Projects the standard basis vectors and orthogonalizes them, at each
        step keeping the one with the largest residual (ties: lowest index).
        """
        p = self.matrix
        basis: list[np.ndarray] = []
        cols = [p[:, k].copy() for k in range(self.dim)]
        for _ in range(self.rank):
            best, best_norm, best_vec = None, -1.0, None
            for k, c in enumerate(cols):
                if c is None:
                    continue
                r = c.copy()
                for _ in range(2):
                    for q in basis:
                        r = r - np.vdot(q, r) * q
                rn = float(np.linalg.norm(r))
                if rn > best_norm * (1 + 1e-12) + 1e-15:
                    best, best_norm, best_vec = k, rn, r
            if best is None or best_norm <= 1e-12:
                raise SpectralError("projector range is smaller than its rank")
            basis.append(best_vec / best_norm)
            cols[best] = None
        return [Ket(b) for b in basis]

    def unit_vector(self) -> Ket:
        """The spanning unit vector of a rank-1 projector (phase fixed by :meth:`range_basis`)."""
        if self.rank != 1:
            raise ValueError("unit_vector is defined for rank-1 projectors only")
        return self.range_basis()[0]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """``A = sum_i a_i P_i`` with strictly increasing ``a_i``."""

    eigenvalues: tuple[float, ...]
    projectors: tuple[Projector, ...]

    def reconstruct(self) -> np.ndarray:
        d = self.projectors[0].dim
        out = np.zeros((d, d), dtype=complex)
        for a, p in zip(self.eigenvalues, self.projectors):
            out += a * p.matrix
        return out


def _as_matrix(m) -> np.ndarray:
    if isinstance(m, HermitianOperator):
        return m.matrix
    return np.asarray(m, dtype=complex)


def is_self_adjoint(matrix, tol: Tolerance | float | None = None) -> bool:
    m = _as_matrix(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError("matrix must be square")
    return bool(np.abs(m - m.conj().T).max() <= as_tolerance(tol).eps)


def _cluster(values: np.ndarray, threshold: float) -> list[list[int]]:
    groups: list[list[int]] = [[0]]
    for k in range(1, len(values)):
        if values[k] - values[k - 1] <= threshold:
            groups[-1].append(k)
        else:
            groups.append([k])
    return groups


def _decompose_matrix(m: np.ndarray, eps: float) -> tuple[list[float], list[np.ndarray], float]:
    """Eigenvalue clusters of a Hermitian matrix; returns (values, bases, scale)."""
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise SpectralError(f"eigen-solver did not converge: {exc}") from exc
    scale = float(np.abs(w).max()) if w.size else 0.0
    groups = _cluster(w, eps * (1.0 + scale))
    values = [float(np.mean(w[g])) for g in groups]
    bases = [v[:, g] for g in groups]
    return values, bases, scale


def spectral_decompose(A: HermitianOperator, tol: Tolerance | float | None = None) -> SpectralDecomposition:
    """Spectral projectors of ``A``, merging eigenvalues closer than ``eps*(1+||A||)``."""
    A = A if isinstance(A, HermitianOperator) else HermitianOperator(np.asarray(A))
    eps = as_tolerance(tol).eps
    values, bases, scale = _decompose_matrix(A.matrix, eps)
    projectors = []
    for b in bases:
        p = b @ b.conj().T
        p = (p + p.conj().T) / 2
        projectors.append(Projector(HermitianOperator(p), b.shape[1]))
    dec = SpectralDecomposition(tuple(values), tuple(projectors))
    residual = float(np.abs(dec.reconstruct() - A.matrix).max())
    if residual > max(1e-6, 10 * eps) * (1.0 + scale):
        raise SpectralError(f"spectral reconstruction residual {residual:.3e} too large", residual)
    return dec


def rank1_projector(x: Ket) -> Projector:
    """``|x><x| / <x|x>``; exact when ``x`` is exact."""
    n2 = norm_squared(x)
    if (x.exact is not None and n2 == 0) or float(n2) == 0.0:
        raise ZeroVectorError("rank-1 projector of the zero vector")
    if x.exact is not None:
        ex = tuple(tuple(a * b.conjugate() / n2 for b in x.exact) for a in x.exact)
        m = np.array([[complex(v) for v in row] for row in ex])
        return Projector(HermitianOperator(m, exact=ex), 1, x)
    c = x.components
    m = np.outer(c, c.conj()) / float(n2)
    return Projector(HermitianOperator((m + m.conj().T) / 2), 1, x)


def commutator_norm(A, B) -> float:
    a, b = _as_matrix(A), _as_matrix(B)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(a @ b - b @ a).max())


def commutes(A, B, tol: Tolerance | float | None = None) -> bool:
    """``AB == BA``: exactly for exact operators, else within ``eps*(1+||A|| ||B||)``."""
    A = A.operator if isinstance(A, Projector) else A
    B = B.operator if isinstance(B, Projector) else B
    if isinstance(A, HermitianOperator) and isinstance(B, HermitianOperator):
        if A.dim != B.dim:
            raise DimensionMismatchError(f"dimension mismatch: {A.dim} vs {B.dim}")
        if A.exact is not None and B.exact is not None:
            return _exact_matmul(A.exact, B.exact) == _exact_matmul(B.exact, A.exact)
    a, b = _as_matrix(A), _as_matrix(B)
    bound = as_tolerance(tol).eps * (1.0 + np.linalg.norm(a, 2) * np.linalg.norm(b, 2))
    return commutator_norm(a, b) <= bound


def apply_function(
    A: HermitianOperator, f: Callable[[float], float], tol: Tolerance | float | None = None
) -> HermitianOperator:
    """``f(A) = sum_i f(a_i) P_i``."""
    dec = spectral_decompose(A, tol)
    out = np.zeros((A.dim, A.dim), dtype=complex)
    for a, p in zip(dec.eigenvalues, dec.projectors):
        fa = f(a)
        if isinstance(fa, complex) and fa.imag != 0:
            raise ValueError("apply_function needs a real-valued function")
        out += float(np.real(fa)) * p.matrix
    return HermitianOperator(out)


def random_hermitian(dim: int, rng: np.random.Generator) -> HermitianOperator:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return HermitianOperator((m + m.conj().T) / 2)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR factorization of a complex Gaussian matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def operators_in(ops: Sequence[HermitianOperator]) -> int:
    dims = {op.dim for op in ops}
    if len(dims) > 1:
        raise DimensionMismatchError(f"operators of mixed dimensions {sorted(dims)}")
    return dims.pop() if dims else 0
