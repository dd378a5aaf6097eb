import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contextuality.contexts import context_from_basis
from contextuality.errors import DimensionMismatchError, NotUnitaryError, ZeroVectorError
from contextuality.hilbert import Ket, ket, norm, random_ket, standard_basis
from contextuality.ndi import (
    Rotation,
    check_vidp,
    check_vinp,
    ndi_witness,
    random_rotation,
    rotation_between,
    unitarity_residual,
    valuation_defined_on,
)
from contextuality.operators import diag, random_hermitian, random_unitary
from contextuality.valuations import ValuationMode, enumerate_local_valuations


def std(d):
    ctx = context_from_basis(standard_basis(d))
    return ctx, enumerate_local_valuations(ctx, ValuationMode.FUNC)[0]


def test_rotation_between_identity_shortcut():
    x = ket(1, 2, 3)
    assert rotation_between(x, x).is_identity()


def test_rotation_between_examples():
    r = rotation_between(ket(1, 0), ket(0, 7j))
    assert np.allclose(r.apply(ket(1, 0)).components, [0, 1j], atol=1e-12)
    r = rotation_between(ket(1, 0, 0), ket(-1, 0, 0))
    assert np.allclose(r.apply(ket(1, 0, 0)).components, [-1, 0, 0], atol=1e-12)


def test_rotation_between_rejects_zero():
    with pytest.raises(ZeroVectorError):
        rotation_between(ket(0, 0), ket(1, 0))


def test_rotation_validates_unitarity():
    with pytest.raises(NotUnitaryError):
        Rotation(np.array([[1.0, 1.0], [0.0, 1.0]]))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_rotation_between_random_pairs(d, seed):
    rng = np.random.default_rng(seed)
    x, y = random_ket(d, rng), random_ket(d, rng)
    r = rotation_between(x, y)
    assert unitarity_residual(r.matrix) <= 1e-10
    target = norm(x) * y.components / norm(y)
    assert np.abs(r.matrix @ x.components - target).max() <= 1e-9 * (1 + norm(x))


def test_valuation_defined_on_examples():
    ctx, v = std(3)
    assert valuation_defined_on(v, ket(0, 0, 5))
    assert valuation_defined_on(v, Ket(np.array([0, 1j, 0])))
    assert not valuation_defined_on(v, ket(1, 1, 0))
    with pytest.raises(DimensionMismatchError):
        valuation_defined_on(v, ket(1, 0))
    with pytest.raises(ZeroVectorError):
        valuation_defined_on(v, ket(0, 0, 0))


def test_ndi_witness_standard():
    ctx, v = std(3)
    w = ndi_witness(ctx, v, ket(1, 0, 0))
    assert w.U_defined.is_identity()
    assert w.defined_on_z and not w.defined_on_y
    assert np.allclose(w.y.components, np.array([1, 1, 0]) / np.sqrt(2))


def test_ndi_witness_random_d4_scaled(rng):
    u = random_unitary(4, rng)
    ctx = context_from_basis([Ket(u[:, k]) for k in range(4)])
    v = enumerate_local_valuations(ctx)[2]
    x0 = random_ket(4, rng)
    x = Ket(3.7 * x0.components / norm(x0))
    w = ndi_witness(ctx, v, x)
    res = w.residuals()
    assert max(res["defined_unitarity"], res["undefined_unitarity"]) <= 1e-10
    assert max(res["defined_map"], res["undefined_map"]) <= 1e-9
    assert norm(w.z) == pytest.approx(3.7, abs=1e-10)
    assert (w.defined_on_z, w.defined_on_y) == (True, False)


def test_ndi_witness_errors():
    ctx, v = std(1)
    with pytest.raises(DimensionMismatchError):
        ndi_witness(ctx, v, ket(1))
    ctx, v = std(3)
    with pytest.raises(DimensionMismatchError):
        ndi_witness(ctx, v, ket(1, 0))
    with pytest.raises(ZeroVectorError):
        ndi_witness(ctx, v, ket(0, 0, 0))


def test_check_vinp_examples(rng):
    a = random_hermitian(3, rng)
    verdict = check_vinp(ket(1, 2, 3), a, random_unitary(3, rng))
    assert verdict.norm_invariant and verdict.spectrum_invariant
    verdict = check_vinp(ket(1, 0), diag(1, 2), np.eye(2))
    assert verdict.norm_invariant and verdict.spectrum_invariant


def test_check_vidp_zero_trials():
    ctx, v = std(3)
    rep = check_vidp(ctx, v, ket(1, 0, 0), trials=0, seed=0)
    assert rep.random_defined == 0 and rep.random_defined_fraction == 0.0
    assert rep.defined == 1 and rep.undefined == 1
    assert rep.vidp_fails


def test_check_vidp_golden():
    # random rotations almost surely leave every context ray
    ctx, v = std(3)
    rep = check_vidp(ctx, v, ket(1, 0, 0), trials=1000, seed=0)
    assert rep.random_defined == 0
    assert rep.witness_defined and rep.witness_undefined
    assert rep.vidp_fails


def test_check_vidp_deterministic():
    ctx, v = std(4)
    x = ket(1, 2, 0, 1)
    assert check_vidp(ctx, v, x, 50, 11) == check_vidp(ctx, v, x, 50, 11)


def test_check_vidp_rejects_negative_trials():
    ctx, v = std(2)
    with pytest.raises(ValueError):
        check_vidp(ctx, v, ket(1, 0), trials=-1, seed=0)


def test_random_rotation_is_unitary(rng):
    for d in range(1, 7):
        assert unitarity_residual(random_rotation(d, rng).matrix) <= 1e-12
