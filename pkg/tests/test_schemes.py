"""Conditional cat-generation schemes and the squeezed-cat fit."""

import math

import numpy as np
import pytest

from macroq import fock as F
from macroq import schemes as G
from macroq import states as S


@pytest.mark.parametrize("r", [0.3, 0.8])
def test_subtracted_squeezed_vacuum_is_squeezed_photon(r):
    res = G.scheme_photon_subtraction(r)
    d = res.state.dims[0]
    big = d + 40  # keep the reference free of cutoff error
    ref = F.evolve(S.fock_state(1, big), F.squeeze(big, 0, r, check=False))
    # the builder stops at a 1e-8 tail weight, which bounds the infidelity
    assert F.fidelity(res.state.resized((big,)), ref) == pytest.approx(1.0, abs=1e-7)
    assert F.mean_photon_number(res.state) == pytest.approx(1 + 3 * math.sinh(r) ** 2, rel=1e-6)
    assert res.success_probability == pytest.approx(math.sinh(r) ** 2, rel=1e-6)


def test_subtraction_argument_checks():
    with pytest.raises(ValueError):
        G.scheme_photon_subtraction(0.5, n_sub=0)
    with pytest.raises(ValueError):
        G.scheme_photon_subtraction(0.0)


def test_full_window_projector_is_identity():
    P = G.window_projector(12, 1e3)
    assert np.allclose(P, np.eye(12), atol=1e-10)


def test_narrow_window_projector_is_psd():
    ev = np.linalg.eigvalsh(G.window_projector(10, 0.3))
    assert ev.min() > -1e-12 and ev.max() < 1 + 1e-12


def test_homodyne_wide_window_gives_reduced_state():
    n = 2
    res = G.scheme_homodyne_conditioning(n, 50.0)
    assert res.success_probability == pytest.approx(1.0, abs=1e-9)
    d = n + 1
    t = np.zeros((d, d), dtype=complex)
    t[n, 0] = 1
    st = F.evolve(F.FockPureState(t), F.beam_splitter((d, d), (0, 1), 0.5))
    assert np.allclose(res.state.matrix, F.partial_trace(st, [0]).matrix, atol=1e-10)


def test_homodyne_narrow_window_is_nearly_pure():
    res = G.scheme_homodyne_conditioning(2, 0.01)
    assert res.metadata["purity"] > 0.999
    assert 0 < res.success_probability < 0.01


def test_homodyne_argument_checks():
    with pytest.raises(ValueError):
        G.scheme_homodyne_conditioning(0, 0.1)
    with pytest.raises(ValueError):
        G.scheme_homodyne_conditioning(2, -1.0)


def test_amplification_heralds_bigger_cat():
    res = G.scheme_amplification(1.0)
    d = res.state.dims[0]
    target = S.scs(math.sqrt(2), truncation=d)
    assert F.fidelity(res.state, target) == pytest.approx(1.0, abs=1e-6)


def test_amplification_probability_grows_with_alpha():
    probs = [G.scheme_amplification(a).success_probability for a in (0.5, 1.0, 1.5)]
    assert probs[0] < probs[1] < probs[2]


def test_amplification_vacuum_passthrough():
    res = G.scheme_amplification(0.0)
    assert res.success_probability == 1.0
    assert res.state.dims == (1,)


def test_fit_recovers_squeezed_cat():
    alpha, r = 1.3, 0.25
    st = S.squeezed_scs(alpha, r)
    F_, amp, r_fit = G.fit_squeezed_cat(st)
    assert F_ == pytest.approx(1.0, abs=1e-8)
    assert amp == pytest.approx(alpha, abs=1e-4)
    assert r_fit == pytest.approx(r, abs=1e-4)


def test_best_squeezing_on_plain_cat():
    f, r = G.best_squeezing(S.scs(1.0), 1.0)
    assert f == pytest.approx(1.0, abs=1e-8)
    assert abs(r) < 1e-3


def test_wigner_peaks_of_large_cat():
    peaks = G.wigner_peaks(S.scs(3.0), extent=9, points=181)
    # the fringe maximum sits at the origin; the lobes are the outermost peaks
    xs = sorted(x for x, _, _ in peaks)
    assert [xs[0], xs[-1]] == pytest.approx([-6.0, 6.0], abs=1e-3)
    assert G.lobe_amplitude(S.scs(3.0), extent=9, points=181) == pytest.approx(3.0, abs=1e-3)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_amplification_fidelity(alpha):
    res = G.scheme_amplification(alpha)
    target = S.scs(math.sqrt(2) * alpha, truncation=res.state.dims[0])
    assert F.fidelity(res.state, target) > 0.99
    assert 0 < res.success_probability <= 1


def test_homodyne_single_photon_is_odd():
    res = G.scheme_homodyne_conditioning(1, 0.01)
    p = np.real(np.diag(res.state.matrix))
    assert p[1::2].sum() > 0.999


def test_two_subtractions_beat_one_at_matched_amplitude():
    # with S(0.5) as input the cats lie along p
    one = G.scheme_photon_subtraction(0.5, 1).state
    two = G.scheme_photon_subtraction(0.5, 2).state
    f1, _ = G.best_squeezing(one, 1.2j, math.pi)
    f2, _ = G.best_squeezing(two, 1.2j, 0.0)
    assert f2 > f1
    assert np.allclose(two.vector[1::2], 0)
