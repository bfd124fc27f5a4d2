"""Qubit registers: dephasing, reduced states, additive observables."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macroq import spin as Q
from macroq import states as S


def test_basis_and_product():
    s = Q.SpinState.basis("10")
    assert s.ket[2] == 1
    p = Q.SpinState.product([np.array([1, 1]), np.array([1, 0])])
    assert np.allclose(p.ket, np.array([1, 0, 1, 0]) / math.sqrt(2))


def test_invalid_states_rejected():
    with pytest.raises(Q.SpinError):
        Q.SpinState(np.ones(3))
    with pytest.raises(Q.SpinError):
        Q.SpinState(np.array([1.0, 1.0]))
    with pytest.raises(Q.SpinError):
        Q.SpinState(np.ones(2 ** 13) / math.sqrt(2 ** 13))


@pytest.mark.parametrize("n", [2, 3, 5])
def test_ghz_coherence_under_dephasing(n):
    p0 = 0.8
    out = Q.dephase_each(S.ghz(n), p0)
    assert abs(out.matrix[0, -1]) == pytest.approx(0.5 * (2 * p0 - 1) ** n, abs=1e-14)
    assert Q.offdiag_trace_norm(out, "0" * n, "1" * n) == pytest.approx(0.5 * 0.6 ** n, abs=1e-14)


def test_dephasing_keeps_populations(rng):
    s = S.random_spin(4, rng)
    out = Q.dephase_each(s, 0.65)
    assert np.allclose(np.diag(out.matrix), np.diag(s.matrix))


def test_dephasing_rejects_p0():
    with pytest.raises(Q.SpinError):
        Q.dephase_operator(np.eye(2), 1, 0.3)


def test_branch_coherence_product_matches_dense():
    za, ea, _ = S.generalized_ghz_branches(4, 0.4)
    fast = Q.branch_coherence(za, ea, 0.7)
    dense = Q.branch_coherence(Q.SpinState.product(za), Q.SpinState.product(ea), 0.7)
    assert fast == pytest.approx(dense, abs=1e-12)


def test_reduced_state_of_ghz():
    red = Q.reduced_state(S.ghz(3), [1])
    assert np.allclose(red.matrix, np.eye(2) / 2)
    assert Q.entropy(red) == pytest.approx(math.log(2), abs=1e-12)
    pair = Q.reduced_state(S.ghz(3), [0, 2])
    assert Q.entropy(pair) == pytest.approx(math.log(2), abs=1e-12)


def test_reduced_state_of_mixed_input(rng):
    s = S.random_spin(3, rng)
    mixed = Q.SpinState(s.matrix)
    assert np.allclose(Q.reduced_state(s, [0, 1]).matrix, Q.reduced_state(mixed, [0, 1]).matrix)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_collective_variances(n):
    z = Q.AdditiveObservable.collective("z", n)
    x = Q.AdditiveObservable.collective("x", n)
    assert Q.variance(S.ghz(n), z) == pytest.approx(n * n, abs=1e-10)
    assert Q.variance(S.product_state(n, "x"), x) == pytest.approx(0.0, abs=1e-10)
    assert Q.variance(S.product_state(n, "x"), z) == pytest.approx(n, abs=1e-10)


def test_observable_matrix_matches_embedding():
    n = 3
    obs = Q.AdditiveObservable.collective("y", n)
    ref = sum(Q.embed(Q.SIGMA_Y, k, n) for k in range(n))
    assert np.allclose(obs.matrix(), ref)


def test_observable_validation():
    with pytest.raises(Q.SpinError):
        Q.AdditiveObservable((2 * Q.SIGMA_Z,))
    with pytest.raises(Q.SpinError):
        Q.AdditiveObservable((np.eye(4), Q.SIGMA_Z), grouping=((0, 1), (1,)))
    with pytest.raises(Q.SpinError):
        Q.AdditiveObservable((np.array([[0, 1], [0, 0]]),))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_variance_pure_and_mixed_agree(seed):
    rng = np.random.default_rng(seed)
    s = S.random_spin(3, rng)
    obs = Q.AdditiveObservable.collective("x", 3)
    assert Q.variance(s, obs) == pytest.approx(Q.variance(Q.SpinState(s.matrix), obs), abs=1e-10)
    m = obs.matrix()
    mean = np.vdot(s.ket, m @ s.ket).real
    assert Q.expectation(s, obs) == pytest.approx(mean, abs=1e-10)


def test_projector_spec():
    Q.ProjectorSpec(np.diag([1, 0]))
    with pytest.raises(Q.SpinError):
        Q.ProjectorSpec(np.diag([1, 0.5]))
