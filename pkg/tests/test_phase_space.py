"""Wigner and characteristic functions, quadrature marginals and measure I."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from macroq import fock as F
from macroq import phase_space as P
from macroq import states as S

INV_2PI = 0.15915494309189535


def test_vacuum_wigner_origin():
    W = P.wigner(S.vacuum(4), [0.0], [0.0])
    assert W[0, 0] == pytest.approx(INV_2PI, abs=1e-14)


def test_single_photon_wigner_origin_negative():
    W = P.wigner(S.fock_state(1), [0.0], [0.0])
    assert W[0, 0] == pytest.approx(-INV_2PI, abs=1e-14)


def test_coherent_wigner_is_gaussian():
    alpha = 0.8 - 0.3j
    x = np.linspace(-3, 4, 15)
    p = np.linspace(-3, 2, 11)
    W = P.wigner(S.coherent(alpha, 30), x, p)
    X, Pm = np.meshgrid(x, p)
    ref = INV_2PI * np.exp(-((X - 2 * alpha.real) ** 2 + (Pm - 2 * alpha.imag) ** 2) / 2)
    assert np.max(np.abs(W - ref)) < 1e-12


def test_wigner_normalization():
    g = np.linspace(-10, 10, 401)
    W = P.wigner(S.scs(1.5), g, g)
    h = g[1] - g[0]
    assert W.sum() * h * h == pytest.approx(1.0, abs=1e-8)


def test_wigner_of_reduced_mode():
    W_full = P.wigner(S.hybrid(1.0), [2.0], [0.0], mode=1)
    red = F.partial_trace(S.hybrid(1.0), [1])
    assert W_full[0, 0] == pytest.approx(P.wigner(red, [2.0], [0.0])[0, 0], abs=1e-14)


def test_vacuum_characteristic_function():
    for xi in (0.3, 1 + 1j, -2j):
        assert P.characteristic_function(S.vacuum(30), xi) == pytest.approx(math.exp(-abs(xi) ** 2 / 2), abs=1e-12)


def test_characteristic_function_needs_one_argument_per_mode():
    with pytest.raises(ValueError):
        P.characteristic_function(S.ecs(0.5), [0.1])


def test_displacement_matrix_matches_expm():
    d = 20
    ref = F.displace(d, 0, 0.4 + 0.2j, check=False).matrix
    got = P.displacement_matrix(0.4 + 0.2j, d)
    # the truncated exponential differs near the cutoff; compare the low block
    assert np.max(np.abs(got[:8, :8] - ref[:8, :8])) < 1e-10


def test_hermite_functions_orthonormal():
    x = np.linspace(-15, 15, 3001)
    psi = P.hermite_functions(6, x)
    G = psi @ psi.T * (x[1] - x[0])
    assert np.allclose(G, np.eye(7), atol=1e-10)


def test_coherent_quadrature_marginal():
    g = np.linspace(-8, 12, 2001)
    q = P.quadrature_distribution(S.coherent(1.0, 30), 0.0, g)
    assert q.mass() == pytest.approx(1.0, abs=1e-10)
    assert q.mean() == pytest.approx(2.0, abs=1e-10)
    assert q.variance() == pytest.approx(1.0, abs=1e-9)
    qp = P.quadrature_distribution(S.coherent(1.0, 30), math.pi / 2, g)
    assert qp.mean() == pytest.approx(0.0, abs=1e-10)


def test_mixed_marginal_matches_pure():
    g = np.linspace(-6, 6, 101)
    st_ = S.scs(1.0)
    a = P.quadrature_distribution(st_, 0.3, g).density
    b = P.quadrature_distribution(F.as_density(st_), 0.3, g).density
    assert np.allclose(a, b, atol=1e-14)


@pytest.mark.parametrize("n", [0, 1, 3])
def test_measure_I_fock(n):
    assert P.measure_I_algebraic(S.fock_state(n)).value == pytest.approx(n, abs=1e-12)


def test_measure_I_offset_removed():
    r = P.measure_I_algebraic(S.fock_state(2), remove_offset=True)
    assert r.value == pytest.approx(2.5)
    assert r.metadata["offset_removed"]


def test_measure_I_routes_on_mixed_state(rng):
    rho = S.random_density((6,), rng, rank=3, decay=0.4)
    alg = P.measure_I_algebraic(rho).value
    integ = P.measure_I_integral(rho)
    assert integ.value == pytest.approx(alg, abs=max(1e-6, 3 * integ.error_estimate))
    assert P.measure_I_finite_difference(rho, 1e-4) == pytest.approx(alg, abs=1e-6)


def test_measure_I_integral_two_modes(rng):
    psi = S.random_pure((4, 3), rng)
    alg = P.measure_I_algebraic(psi).value
    integ = P.measure_I_integral(psi)
    assert integ.value == pytest.approx(alg, abs=max(1e-6, 3 * integ.error_estimate))


def test_measure_I_integral_rejects_three_modes():
    with pytest.raises(ValueError):
        P.measure_I_integral(S.random_pure((2, 2, 2), np.random.default_rng(0)))


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 10_000), re=st.floats(-1, 1), im=st.floats(-1, 1))
def test_I_displacement_invariance(seed, re, im):
    psi = S.random_pure((35,), np.random.default_rng(seed), decay=1.0)
    psi = psi.resized((35,))
    assert P.displacement_invariance_gap(psi, [complex(re, im)]) < 1e-8


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10_000), re=st.floats(-1, 1))
def test_I_displacement_invariance_mixed(seed, re):
    rho = S.random_density((35,), np.random.default_rng(seed), rank=2, decay=1.0)
    assert P.displacement_invariance_gap(rho, [re]) < 1e-8
