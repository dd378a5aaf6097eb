"""Finite-dimensional complex inner-product spaces.

Convention: the inner product is linear in its FIRST argument and
conjugate-linear in the second,

    <v|w> = sum_i v_i * conj(w_i),

which is the mathematicians' convention and the opposite of the usual physics
one.  Coordinates of ``x`` in an orthonormal basis ``{x_i}`` are therefore
``<x|x_i>``.

Two numeric regimes coexist.  A :class:`Ket` whose components are integers,
fractions or values in Q(sqrt2)[i] carries an exact copy of its components
and exact-aware operations decide zero tests without tolerance.  Everything
else runs in double precision against a :class:`Tolerance`.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from ._exact import ExactComplex, to_exact
from .errors import (
    DependentVectorsError,
    DimensionMismatchError,
    NotOrthonormalError,
    ZeroVectorError,
)

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "Ket",
    "ket",
    "basis_ket",
    "standard_basis",
    "inner_product",
    "norm",
    "norm_squared",
    "coordinates",
    "reconstruct",
    "is_orthonormal_basis",
    "extend_to_orthonormal_basis",
    "span_dimension",
    "is_linear_morphism",
    "is_isomorphism",
    "random_ket",
]


@dataclass(frozen=True)
class Tolerance:
    """Absolute threshold for floating-point zero tests."""

    eps: float = 1e-9

    def __post_init__(self):
        if not (self.eps >= 0 and math.isfinite(self.eps)):
            raise ValueError(f"tolerance must be a finite nonnegative number, got {self.eps!r}")


DEFAULT_TOL = Tolerance()


def as_tolerance(tol: Tolerance | float | None) -> Tolerance:
    if tol is None:
        return DEFAULT_TOL
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(float(tol))


class Ket:
    """Immutable coordinate vector ``|x>`` in C^dim.

    ``components`` is a read-only complex128 array.  ``exact`` holds the same
    components as :class:`ExactComplex` values when every input was exactly
    representable, else None.
    """

    __slots__ = ("components", "exact")
    __array_ufunc__ = None  # keep numpy scalars from broadcasting over kets

    def __init__(self, values: Iterable | np.ndarray):
        if isinstance(values, Ket):
            comps, exact = values.components, values.exact
        elif isinstance(values, np.ndarray):
            comps = np.array(values, dtype=complex).reshape(-1)
            exact = None
        else:
            values = list(values)
            exact_parts = [to_exact(v) for v in values]
            exact = tuple(exact_parts) if all(e is not None for e in exact_parts) else None
            comps = np.array([complex(v) for v in values], dtype=complex)
        if comps.size < 1:
            raise ValueError("a ket needs at least one component")
        if not np.all(np.isfinite(comps)):
            raise ValueError("ket components must be finite")
        comps.setflags(write=False)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):
        raise AttributeError("Ket is immutable")

    @property
    def dim(self) -> int:
        return int(self.components.shape[0])

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def __len__(self):
        return self.dim

    def __iter__(self):
        return iter(self.components)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.components, dtype=dtype)

    def is_real(self) -> bool:
        return bool(np.all(self.components.imag == 0))

    def __add__(self, other: Ket) -> Ket:
        _check_dims(self, other)
        if self.exact is not None and other.exact is not None:
            return Ket([a + b for a, b in zip(self.exact, other.exact)])
        return Ket(self.components + other.components)

    def __sub__(self, other: Ket) -> Ket:
        _check_dims(self, other)
        if self.exact is not None and other.exact is not None:
            return Ket([a - b for a, b in zip(self.exact, other.exact)])
        return Ket(self.components - other.components)

    def __neg__(self) -> Ket:
        if self.exact is not None:
            return Ket([-a for a in self.exact])
        return Ket(-self.components)

    def __mul__(self, scalar) -> Ket:
        if isinstance(scalar, Ket):
            return NotImplemented
        s = to_exact(scalar)
        if s is not None and self.exact is not None:
            return Ket([s * a for a in self.exact])
        return Ket(complex(scalar) * self.components)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> Ket:
        s = to_exact(scalar)
        if s is not None and self.exact is not None:
            return Ket([a / s for a in self.exact])
        return Ket(self.components / complex(scalar))

    def normalized(self) -> Ket:
        """Unit vector along this ket (always floating point)."""
        n = norm(self)
        if n == 0:
            raise ZeroVectorError("cannot normalize the zero vector")
        return Ket(self.components / n)

    def __eq__(self, other):
        if not isinstance(other, Ket):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.exact is not None and other.exact is not None:
            return self.exact == other.exact
        return bool(np.array_equal(self.components, other.components))

    def __hash__(self):
        if self.exact is not None:
            return hash(self.exact)
        return hash(self.components.tobytes())

    def __repr__(self):
        body = ", ".join(_fmt_component(c) for c in self.components)
        return f"Ket([{body}])"


def _fmt_component(c: complex) -> str:
    if c.imag == 0:
        return repr(float(c.real))
    return repr(complex(c))


def ket(*values) -> Ket:
    """``ket(1, 0, 1j)`` or ``ket([1, 0, 1j])``."""
    if len(values) == 1 and isinstance(values[0], (list, tuple, np.ndarray, Ket)):
        return Ket(values[0])
    return Ket(values)


def basis_ket(dim: int, index: int) -> Ket:
    """Standard basis vector e_{index+1} of C^dim (exact)."""
    if not 0 <= index < dim:
        raise IndexError(f"index {index} out of range for dimension {dim}")
    return Ket([1 if k == index else 0 for k in range(dim)])


def standard_basis(dim: int) -> list[Ket]:
    return [basis_ket(dim, k) for k in range(dim)]


def _check_dims(x: Ket, y: Ket) -> None:
    if x.dim != y.dim:
        raise DimensionMismatchError(f"dimension mismatch: {x.dim} vs {y.dim}")


def inner_product(x: Ket, y: Ket):
    """``<x|y> = sum_i x_i conj(y_i)``.

    Returns an :class:`ExactComplex` when both kets are exact, a Python
    ``complex`` otherwise.  Both compare equal to plain numbers.
    """
    _check_dims(x, y)
    if x.exact is not None and y.exact is not None:
        total = ExactComplex(0)
        for a, b in zip(x.exact, y.exact):
            total = total + a * b.conjugate()
        return total
    return complex(np.dot(x.components, np.conj(y.components)))


def norm_squared(x: Ket):
    """``<x|x>``, exact (a Q(sqrt2) value) when ``x`` is exact."""
    if x.exact is not None:
        total = ExactComplex(0)
        for a in x.exact:
            total = total + a.abs2()
        return total.re
    return float(np.vdot(x.components, x.components).real)


def norm(x: Ket) -> float:
    return math.sqrt(float(norm_squared(x)))


def _is_zero(value, eps: float) -> bool:
    if isinstance(value, ExactComplex):
        return value.is_zero()
    return abs(value) <= eps


def is_orthonormal_basis(vectors: Sequence[Ket], tol: Tolerance | float | None = None) -> bool:
    """True iff ``vectors`` is an orthonormal basis of its ambient space.

    Requires exactly ``dim`` vectors.  Exact inputs are decided exactly;
    otherwise pairwise overlaps must vanish and norms equal one within ``eps``.
    """
    eps = as_tolerance(tol).eps
    vectors = list(vectors)
    if not vectors:
        return False
    d = vectors[0].dim
    if any(v.dim != d for v in vectors):
        raise DimensionMismatchError("vectors do not share one dimension")
    if len(vectors) != d:
        return False
    for i, v in enumerate(vectors):
        n2 = norm_squared(v)
        if v.exact is not None:
            if n2 != 1:
                return False
        elif abs(math.sqrt(n2) - 1.0) > eps:
            return False
        for w in vectors[i + 1 :]:
            if not _is_zero(inner_product(v, w), eps):
                return False
    return True


def coordinates(x: Ket, basis: Sequence[Ket], tol: Tolerance | float | None = None) -> list:
    """Coordinates ``lambda_i = <x|x_i>`` of ``x`` in an orthonormal basis."""
    if not is_orthonormal_basis(basis, tol):
        raise NotOrthonormalError("coordinates need an orthonormal basis")
    return [inner_product(x, b) for b in basis]


def reconstruct(coords: Sequence, basis: Sequence[Ket]) -> Ket:
    """``sum_i lambda_i x_i``; the inverse of :func:`coordinates`."""
    if len(coords) != len(basis):
        raise DimensionMismatchError("need one coordinate per basis vector")
    out = coords[0] * basis[0]
    for c, b in zip(coords[1:], basis[1:]):
        out = out + c * b
    return out


def _pivoted_orthonormalize(
    basis: list[np.ndarray], candidates: list[np.ndarray], take: int, eps: float
) -> list[np.ndarray]:
    """Grow ``basis`` by up to ``take`` candidates.

    Each step picks the remaining candidate with the largest residual norm
    after projecting out the current basis, ties going to the lowest index.
    Returns the new basis; leaves unused candidates untouched.
    """
    remaining = list(range(len(candidates)))
    basis = list(basis)
    while take > 0 and remaining:
        best, best_norm, best_vec = None, -1.0, None
        for idx in remaining:
            r = candidates[idx].copy()
            for _ in range(2):  # reorthogonalize once for stability
                for q in basis:
                    r = r - np.vdot(q, r) * q
            rn = float(np.linalg.norm(r))
            if rn > best_norm * (1 + 1e-12) + 1e-15:
                best, best_norm, best_vec = idx, rn, r
        if best_norm <= eps:
            break
        basis.append(best_vec / best_norm)
        remaining.remove(best)
        take -= 1
    return basis


def extend_to_orthonormal_basis(
    vectors: Sequence[Ket], dim: int | None = None, tol: Tolerance | float | None = None
) -> list[Ket]:
    """Complete linearly independent ``vectors`` to an orthonormal basis.

    The first ``len(vectors)`` outputs span the same subspace as the inputs;
    the rest come from the standard basis, both stages using pivoted
    Gram-Schmidt.  Raises :class:`DependentVectorsError` if the inputs are
    linearly dependent.
    """
    vectors = list(vectors)
    if dim is None:
        if not vectors:
            raise ValueError("dimension required when no vectors are given")
        dim = vectors[0].dim
    if any(v.dim != dim for v in vectors):
        raise DimensionMismatchError("vectors do not share one dimension")
    if len(vectors) > dim:
        raise DependentVectorsError(f"{len(vectors)} vectors in dimension {dim} are dependent")
    eps = as_tolerance(tol).eps
    scale = max((norm(v) for v in vectors), default=1.0)
    cands = [np.array(v.components, dtype=complex) for v in vectors]
    basis = _pivoted_orthonormalize([], cands, len(cands), eps * max(scale, 1.0))
    if len(basis) < len(vectors):
        raise DependentVectorsError("input vectors are linearly dependent")
    std = [np.eye(dim, dtype=complex)[k] for k in range(dim)]
    basis = _pivoted_orthonormalize(basis, std, dim - len(basis), eps)
    return [Ket(b) for b in basis]


def span_dimension(vectors: Sequence[Ket], tol: Tolerance | float | None = None) -> int:
    """Dimension of the span of ``vectors`` (numerical rank)."""
    vectors = list(vectors)
    if not vectors:
        return 0
    m = np.array([v.components for v in vectors])
    s = np.linalg.svd(m, compute_uv=False)
    eps = as_tolerance(tol).eps
    return int(np.sum(s > eps * max(1.0, s[0])))


def is_linear_morphism(
    f: Callable[[np.ndarray], np.ndarray],
    dim: int,
    trials: int = 20,
    seed: int = 0,
    tol: Tolerance | float | None = None,
) -> bool:
    """Randomized check of additivity and complex homogeneity of ``f``."""
    rng = np.random.default_rng(seed)
    eps = as_tolerance(tol).eps
    for _ in range(trials):
        x = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        y = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        lam = complex(rng.normal(), rng.normal())
        fx, fy = np.asarray(f(x)), np.asarray(f(y))
        scale = 1.0 + np.abs(fx).max() + np.abs(fy).max()
        if np.abs(np.asarray(f(x + y)) - fx - fy).max() > eps * scale:
            return False
        if np.abs(np.asarray(f(lam * x)) - lam * fx).max() > eps * scale * (1 + abs(lam)):
            return False
    return True


def is_isomorphism(matrix, tol: Tolerance | float | None = None) -> bool:
    """A linear map C^n -> C^m given by ``matrix`` is bijective iff square and full rank."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    rows = [Ket(r) for r in m]
    return span_dimension(rows, tol) == m.shape[0]


def random_ket(dim: int, rng: np.random.Generator) -> Ket:
    """Complex Gaussian vector; never zero in practice."""
    return Ket(rng.normal(size=dim) + 1j * rng.normal(size=dim))
