import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contextuality.contexts import context_from_basis, context_from_operators
from contextuality.errors import (
    IncompleteAssignmentError,
    MalformedProblemError,
    NotMaximalError,
    OutsideContextError,
)
from contextuality.hilbert import Ket, standard_basis
from contextuality.operators import HermitianOperator, diag, identity, random_unitary
from contextuality.valuations import (
    ConstraintStyle,
    GlobalValuationProblem,
    LocalValuation,
    Status,
    ValuationMode,
    check_compatibility,
    check_func,
    check_value_rule,
    enumerate_local_valuations,
    parity_certificate,
    search_global_valuation,
    to_dimacs,
    verify_witness,
)

BASES_ONLY = ConstraintStyle.BASES_ONLY
PAIRS = ConstraintStyle.BASES_PLUS_PAIRS


def func_consistent_assignments(n):
    """Oracle: filter all 2^n projector assignments by FUNC on the generator
    C = sum_i i P_i, using the indicator of each eigenvalue and the constant 1.

    Pure combinatorics: v(f(C)) for f = indicator of eigenvalue i is v(P_i);
    f(v(C)) is [v(C) == i]; the constant function gives v(I) = sum_i v(P_i) = 1.
    """
    out = []
    for bits in itertools.product((0, 1), repeat=n):
        v_c = sum((i + 1) * b for i, b in enumerate(bits))
        ok = sum(bits) == 1 and all(bits[i] == (1 if v_c == i + 1 else 0) for i in range(n))
        if ok:
            out.append(bits)
    return out


def brute_force_sat(problem):
    """Oracle: enumerate all 2^n assignments."""
    n = problem.num_rays
    for bits in itertools.product((0, 1), repeat=n):
        if all(sum(bits[i] for i in b) == 1 for b in problem.bases) and all(
            bits[i] + bits[j] <= 1 for i, j in problem.active_pairs()
        ):
            return True
    return False


def std_ctx(n):
    return context_from_basis(standard_basis(n))


@pytest.mark.parametrize("n", range(1, 8))
def test_enumeration_counts(n):
    ctx = std_ctx(n)
    vr = enumerate_local_valuations(ctx, ValuationMode.VR_ONLY)
    func = enumerate_local_valuations(ctx, ValuationMode.FUNC)
    assert len(vr) == 2**n
    assert len({v.values for v in vr}) == 2**n
    assert sorted(v.values for v in func) == sorted(func_consistent_assignments(n))


def test_enumeration_n1():
    ctx = std_ctx(1)
    for mode in ValuationMode:
        if mode is ValuationMode.VR_ONLY:
            continue
        (v,) = enumerate_local_valuations(ctx, mode)
        assert v.values == (1,)


def test_func_rejects_non_maximal():
    with pytest.raises(NotMaximalError):
        enumerate_local_valuations(context_from_operators([diag(1, 1, 2)]), ValuationMode.FUNC)


def test_func_valuation_must_be_one_hot():
    with pytest.raises(ValueError):
        LocalValuation(std_ctx(2), (1, 1), ValuationMode.FUNC)


def test_value_rule_examples():
    ctx = std_ctx(3)
    bad = LocalValuation(ctx, (2, 0, 0), ValuationMode.VR_ONLY)
    assert not check_value_rule(bad, diag(1, 0, 0))
    a = diag(1, 4, 9)
    for v in enumerate_local_valuations(ctx, ValuationMode.FUNC):
        assert check_value_rule(v, a)
        assert check_value_rule(v, identity(3))


def test_value_rule_fails_for_non_one_hot_linear_extension():
    ctx = std_ctx(3)
    v = LocalValuation(ctx, (1, 1, 0), ValuationMode.VR_ONLY)
    assert check_value_rule(v, diag(1, 4, 9))  # projector values are fine in VR mode
    as_func = LocalValuation(ctx, (1, 1, 0), ValuationMode.VR_ONLY)
    # v(A) = 1 + 4 = 5, not in {1, 4, 9}
    from contextuality.valuations import valuation_value

    assert valuation_value(as_func, diag(1, 4, 9)) == 5


def test_value_rule_outside_context():
    v = enumerate_local_valuations(std_ctx(2))[0]
    with pytest.raises(OutsideContextError):
        check_value_rule(v, HermitianOperator([[0, 1], [1, 0]]))


def test_func_examples():
    ctx = std_ctx(2)
    for v in enumerate_local_valuations(ctx, ValuationMode.FUNC):
        assert check_func(v, diag(1, -1), lambda t: t * t)
        assert check_func(v, diag(3, 7), lambda t: t)
    ones = LocalValuation(ctx, (1, 1), ValuationMode.VR_ONLY)
    assert not check_func(ones, diag(1, 2), lambda t: 1.0)
    assert not check_func(ones, diag(1, 2), lambda t: 1.0 if t == 1 else 0.0)


def test_func_holds_for_every_one_hot_valuation_and_function(rng):
    u = random_unitary(4, rng)
    ctx = context_from_basis([Ket(u[:, k]) for k in range(4)])
    a = HermitianOperator(sum(c * p.matrix for c, p in zip([-1.5, 0.2, 2.0, 3.3], ctx.projectors)))
    for v in enumerate_local_valuations(ctx):
        for f in (np.sin, lambda t: t**3 - t, np.exp, lambda t: float(t > 0)):
            assert check_func(v, a, f)


def test_compatibility_examples():
    ctx = std_ctx(2)
    v = LocalValuation(ctx, (1, 0))
    assert check_compatibility(v, v)
    # shared projector e1, d=3: {e1, e2, e3} vs {e1, (e2+e3), (e2-e3)}
    c1 = std_ctx(3)
    c2 = context_from_basis(
        [Ket([1, 0, 0]), Ket(np.array([0, 1, 1]) / np.sqrt(2)), Ket(np.array([0, 1, -1]) / np.sqrt(2))]
    )
    v1 = LocalValuation(c1, (1, 0, 0))
    v2 = LocalValuation(c2, (0, 1, 0))
    assert not check_compatibility(v1, v2)
    assert check_compatibility(v1, LocalValuation(c2, (1, 0, 0)))
    had = context_from_basis([Ket(np.array([1, 1]) / np.sqrt(2)), Ket(np.array([1, -1]) / np.sqrt(2))])
    assert check_compatibility(LocalValuation(ctx, (1, 0)), LocalValuation(had, (1, 0)))


def test_single_basis_problem():
    p = GlobalValuationProblem(2, 2, ((0, 1),), ((0, 1),))
    r = search_global_valuation(p)
    assert r.status is Status.SAT
    assert r.witness == (1, 0)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(num_rays=2, dimension=3, bases=((0, 1),)),
        dict(num_rays=2, dimension=2, bases=((0, 0),)),
        dict(num_rays=2, dimension=2, bases=((0, 2),)),
        dict(num_rays=2, dimension=2, bases=((0, 1),), pairs=((1, 1),)),
    ],
)
def test_malformed_problems(kwargs):
    with pytest.raises(MalformedProblemError):
        GlobalValuationProblem(**kwargs)


def test_verify_witness_examples():
    p = GlobalValuationProblem(4, 2, ((0, 1), (2, 3)), ((0, 1), (2, 3)))
    assert verify_witness(p, (1, 0, 0, 1))
    assert not verify_witness(p, (0, 0, 0, 0))
    assert not verify_witness(p, (1, 1, 0, 1))
    with pytest.raises(IncompleteAssignmentError):
        verify_witness(p, (1, 0, 0))
    with pytest.raises(IncompleteAssignmentError):
        verify_witness(p, {0: 1, 1: 0})


def test_pair_constraints_matter():
    # two bases sharing nothing, but a pair constraint links their 1-candidates
    p_pairs = GlobalValuationProblem(
        4, 2, ((0, 1), (2, 3)), ((0, 1), (2, 3), (0, 2), (0, 3), (1, 2), (1, 3)), PAIRS
    )
    p_bases = GlobalValuationProblem(4, 2, p_pairs.bases, p_pairs.pairs, BASES_ONLY)
    assert search_global_valuation(p_pairs).status is Status.UNSAT
    assert search_global_valuation(p_bases).status is Status.SAT


def random_problem(rng, n, d, nb, npairs, style):
    bases = tuple(tuple(sorted(rng.choice(n, size=d, replace=False).tolist())) for _ in range(nb))
    pairs = set()
    for _ in range(npairs):
        i, j = sorted(rng.choice(n, size=2, replace=False).tolist())
        pairs.add((i, j))
    return GlobalValuationProblem(n, d, bases, tuple(sorted(pairs)), style)


@settings(max_examples=200, deadline=None)
@given(
    st.integers(2, 12),
    st.integers(1, 4),
    st.integers(0, 10),
    st.integers(0, 8),
    st.sampled_from(list(ConstraintStyle)),
    st.integers(0, 2**32 - 1),
)
def test_solver_agrees_with_brute_force(n, d, nb, npairs, style, seed):
    d = min(d, n)
    p = random_problem(np.random.default_rng(seed), n, d, nb, npairs, style)
    r = search_global_valuation(p)
    assert (r.status is Status.SAT) == brute_force_sat(p)
    if r.status is Status.SAT:
        assert verify_witness(p, r.witness)
    else:
        assert r.witness is None
    again = search_global_valuation(p)
    assert again == r


def test_solver_witness_is_first_in_branching_order():
    # three rays in one basis, all of equal degree: lowest index wins, value 1 first
    p = GlobalValuationProblem(3, 3, ((0, 1, 2),), ())
    assert search_global_valuation(p).witness == (1, 0, 0)


def test_parity_certificate():
    # triangle of 3 "bases" of size 2, each ray in exactly two: odd cycle
    p = GlobalValuationProblem(3, 2, ((0, 1), (1, 2), (0, 2)), ())
    assert parity_certificate(p) is not None
    r = search_global_valuation(p)
    assert r.status is Status.UNSAT
    assert "parity" in r.proof_note
    assert parity_certificate(GlobalValuationProblem(2, 2, ((0, 1),), ())) is None


def test_dimacs_export():
    p = GlobalValuationProblem(3, 2, ((0, 1), (1, 2)), ((0, 1), (1, 2)), PAIRS)
    text = to_dimacs(p)
    lines = text.strip().splitlines()
    header = [l for l in lines if l.startswith("p ")]
    assert header == ["p cnf 3 4"]
    clauses = {l for l in lines if not l.startswith(("c", "p"))}
    assert clauses == {"1 2 0", "-1 -2 0", "2 3 0", "-2 -3 0"}


def test_dimacs_matches_problem_semantics(rng):
    p = random_problem(rng, 8, 3, 5, 6, PAIRS)
    clauses = [
        list(map(int, l.split()[:-1]))
        for l in to_dimacs(p).splitlines()
        if l and not l.startswith(("c", "p"))
    ]
    for bits in itertools.product((0, 1), repeat=8):
        cnf_ok = all(any((bits[abs(x) - 1] == 1) == (x > 0) for x in c) for c in clauses)
        assert cnf_ok == verify_witness(p, bits)
