import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contextuality._exact import QSqrt2
from contextuality.errors import DependentVectorsError, DimensionMismatchError, NotOrthonormalError
from contextuality.hilbert import (
    Ket,
    Tolerance,
    basis_ket,
    coordinates,
    extend_to_orthonormal_basis,
    inner_product,
    is_isomorphism,
    is_linear_morphism,
    is_orthonormal_basis,
    ket,
    norm,
    random_ket,
    reconstruct,
    span_dimension,
    standard_basis,
)
from contextuality.operators import random_unitary

R2 = QSqrt2(0, 1) / 2  # 1/sqrt2, exactly


def test_inner_product_examples():
    assert inner_product(ket(1, 0), ket(0, 1)) == 0
    assert inner_product(ket(1, 1j), ket(1, 0)) == 1
    assert inner_product(ket(1, 1j), ket(1, 1j)) == 2


def test_inner_product_is_linear_in_first_slot():
    # <i x|y> = i <x|y> and <x|i y> = -i <x|y>
    x, y = ket(1, 2j), ket(3, 1)
    base = complex(inner_product(x, y))
    assert complex(inner_product(1j * x, y)) == pytest.approx(1j * base)
    assert complex(inner_product(x, 1j * y)) == pytest.approx(-1j * base)


def test_inner_product_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        inner_product(ket(1, 0), ket(1, 0, 0))


def test_norm_examples():
    assert norm(ket(3, 4)) == 5
    assert norm(ket(0, 0, 0)) == 0
    assert norm(Ket(np.array([1, 1j]) / math.sqrt(2))) == pytest.approx(1.0, abs=1e-15)


def test_exact_flag():
    assert ket(1, 0, -1).is_exact
    assert ket(1, 1j).is_exact
    assert ket(R2, R2).is_exact
    assert not ket(0.5, 0.5).is_exact


def test_coordinates_examples():
    e = standard_basis(4)
    assert coordinates(e[0], e) == [1, 0, 0, 0]
    c = coordinates(ket(R2, R2), standard_basis(2))
    assert c == [R2, R2]


def test_coordinates_reject_non_orthonormal():
    with pytest.raises(NotOrthonormalError):
        coordinates(ket(1, 0), [ket(1, 0), ket(1, 1)])


def test_is_orthonormal_basis_examples():
    assert is_orthonormal_basis(standard_basis(3))
    assert not is_orthonormal_basis([basis_ket(2, 0), basis_ket(2, 0)])
    assert is_orthonormal_basis([ket(R2, R2), ket(R2, -R2)])
    s = 1 / math.sqrt(2)
    assert is_orthonormal_basis([ket(s, s), ket(s, -s)])
    assert not is_orthonormal_basis(standard_basis(3)[:2])
    assert not is_orthonormal_basis([ket(2, 0), ket(0, 1)])


def test_exact_orthonormality_is_not_fooled_by_tolerance():
    # 1e-12 off in exact rationals: rejected even though a float check would pass
    from fractions import Fraction

    nearly = ket(1 + Fraction(1, 10**12), 0)
    assert not is_orthonormal_basis([nearly, ket(0, 1)], Tolerance(1e-9))


def test_extend_examples():
    assert [list(v) for v in extend_to_orthonormal_basis([basis_ket(3, 0)])] == [
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
    ]
    assert [list(v) for v in extend_to_orthonormal_basis([], dim=2)] == [[1, 0], [0, 1]]
    s = 1 / math.sqrt(2)
    out = extend_to_orthonormal_basis([ket(s, s)])
    assert np.allclose(out[0].components, [s, s], atol=1e-15)
    assert is_orthonormal_basis(out)


def test_extend_rejects_dependent():
    with pytest.raises(DependentVectorsError):
        extend_to_orthonormal_basis([ket(1, 1, 0), ket(2, 2, 0)])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 8), st.integers(0, 2**32 - 1))
def test_extend_spans_inputs(d, k, seed):
    k = min(k, d)
    rng = np.random.default_rng(seed)
    vecs = [random_ket(d, rng) for _ in range(k)]
    out = extend_to_orthonormal_basis(vecs, dim=d)
    assert is_orthonormal_basis(out, Tolerance(1e-10))
    if k:
        q = np.array([v.components for v in out[:k]]).T
        for v in vecs:
            residual = v.components - q @ (q.conj().T @ v.components)
            assert np.linalg.norm(residual) <= 1e-10 * norm(v)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_inner_product_axioms(d, seed):
    rng = np.random.default_rng(seed)
    x1, x2, y = (random_ket(d, rng) for _ in range(3))
    a, b = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
    # conjugate symmetry
    assert abs(inner_product(x1, y) - np.conj(inner_product(y, x1))) <= 1e-12
    # linearity in the first argument
    lhs = inner_product(a * x1 + b * x2, y)
    rhs = a * inner_product(x1, y) + b * inner_product(x2, y)
    assert abs(lhs - rhs) <= 1e-10
    # positivity
    assert inner_product(x1, x1).real > 0


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_coordinates_round_trip(d, seed):
    rng = np.random.default_rng(seed)
    u = random_unitary(d, rng)
    basis = [Ket(u[:, k]) for k in range(d)]
    x = random_ket(d, rng)
    back = reconstruct(coordinates(x, basis), basis)
    assert np.linalg.norm(back.components - x.components) <= 1e-10


def test_vector_space_axioms_on_exact_kets():
    x, y = ket(1, -2, 3), ket(0, 1j, 5)
    lam1, lam2 = 2, 1j
    assert lam1 * (x + y) == lam1 * x + lam1 * y
    assert (lam1 + lam2) * x == lam1 * x + lam2 * x
    assert (lam1 * lam2) * x == lam1 * (lam2 * x)
    assert 1 * x == x


def test_linear_morphism_and_isomorphism():
    m = np.array([[1, 2j], [0, 1]])
    assert is_linear_morphism(lambda v: m @ v, 2)
    assert not is_linear_morphism(lambda v: np.conj(v), 2)
    assert not is_linear_morphism(lambda v: v + 1, 2)
    assert is_isomorphism(m)
    assert not is_isomorphism([[1, 1], [1, 1]])
    assert not is_isomorphism(np.ones((2, 3)))


def test_span_dimension():
    assert span_dimension(standard_basis(3)) == 3
    assert span_dimension([ket(1, 1, 0), ket(2, 2, 0), ket(0, 0, 1)]) == 2
    assert span_dimension([]) == 0


def test_ket_is_immutable():
    k = ket(1, 2)
    with pytest.raises(AttributeError):
        k.exact = None
    with pytest.raises(ValueError):
        k.components[0] = 5
