"""State builders, cutoffs and the declarative registry."""

import math

import numpy as np
import pytest

from macroq import fock as F
from macroq import states as S
from macroq.spin import SpinState


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_scs_mean_photon_number(alpha):
    # even cat: |alpha|^2 tanh|alpha|^2
    st = S.scs(alpha)
    assert F.mean_photon_number(st) == pytest.approx(alpha ** 2 * math.tanh(alpha ** 2), abs=1e-9)
    assert np.allclose(st.vector[1::2], 0)


def test_odd_scs_mean_photon_number():
    st = S.scs(1.0, math.pi)
    assert F.mean_photon_number(st) == pytest.approx(1 / math.tanh(1.0), abs=1e-9)
    assert np.allclose(st.vector[0::2], 0)


def test_scs_normalization_formula():
    alpha, phi = 0.7, 0.9
    n = S.scs_normalization(alpha, phi)
    d = 40
    raw = F.coherent_amplitudes(alpha, d) + np.exp(1j * phi) * F.coherent_amplitudes(-alpha, d)
    assert np.linalg.norm(n * raw) == pytest.approx(1.0, abs=1e-12)


def test_scs_undefined_case():
    with pytest.raises(ValueError):
        S.scs(0.0, math.pi)


def test_ecs_mean_photon_number():
    alpha = 1.2
    st = S.ecs(alpha)
    assert F.mean_photon_number(st) == pytest.approx(2 * alpha ** 2 * math.tanh(2 * alpha ** 2), abs=1e-9)


def test_hybrid_structure():
    st = S.hybrid(2.0)
    assert st.dims[0] == 2
    red = F.partial_trace(st, [0])
    overlap = math.exp(-2 * 4.0)
    assert abs(red.matrix[0, 1]) == pytest.approx(0.5 * overlap, abs=1e-12)


def test_auto_cutoff_passes_tail():
    for st in (S.coherent(5.0), S.squeezed_vacuum(1.2), S.vacuum_coherent(4.0)):
        st.check_tail()


def test_explicit_truncation_too_small():
    with pytest.raises(F.TruncationError):
        S.coherent(3.0, truncation=10)


def test_displaced_spe_branches():
    a, b = S.displaced_qubit_branches(1.5)
    assert abs(np.vdot(a.vector, b.vector)) < 1e-12
    st = S.displaced_spe(1.5)
    # mode A = 0 pairs with D|1>, mode A = 1 with D|0>
    recon = (st.tensor[0] + st.tensor[1]) / np.linalg.norm(st.tensor[0] + st.tensor[1])
    assert abs(abs(np.vdot(recon, a.vector)) - 1) < 1e-10


def test_squeezed_spe_mean():
    r = 0.5
    st = S.squeezed_spe(r)
    # mode B holds S|0> or S|1> with equal weight
    expected = 0.5 + 0.5 * (math.sinh(r) ** 2 + 3 * math.sinh(r) ** 2 + 1)
    assert F.mean_photon_number(st) == pytest.approx(expected, abs=1e-8)


def test_qiopa_normalization_and_layout():
    delta = S.qiopa_coefficients(1.0, 40)
    assert np.sum(delta ** 2) == pytest.approx(1.0, abs=1e-8)
    st = S.qiopa(1.0, 40)
    assert st.dims == (2, 2, 82, 82)
    assert np.linalg.norm(st.tensor[1, 1]) == 0
    with pytest.raises(F.TruncationError):
        S.qiopa(3.0, 5)


def test_qiopa_zero_gain_is_single_photon():
    delta = S.qiopa_coefficients(0.0, 3)
    assert delta[0, 0] == 1 and np.sum(delta ** 2) == 1


def test_generalized_ghz_limits():
    g = S.generalized_ghz(3, math.pi / 2)
    assert np.allclose(g.ket, S.ghz(3).ket)
    with pytest.raises(ValueError):
        S.generalized_ghz(3, 0.0)


def test_mixed_ghz_coherence():
    m = S.mixed_ghz(3, 0.4)
    assert m.matrix[0, -1] == pytest.approx(0.2)
    with pytest.raises(ValueError):
        S.mixed_ghz(3, 1.5)


def test_dn_state_branches():
    a, b = S.dn_branches(4)
    assert a.ket[0] == 1
    assert np.count_nonzero(b.ket) == 5
    v = S.dn_state(4).ket
    assert v[0] == pytest.approx(2 / math.sqrt(8))


def test_cooper_product_qubits():
    assert S.cooper_product(3).n_qubits == 6


def test_marquardt_pair_coefficients():
    n, theta = 6, 0.7
    _, b = S.marquardt_pair(n, theta)
    beta = S.marquardt_coefficients(n, theta)
    amps = np.array([b.tensor[n - d, d] for d in range(n + 1)])
    assert np.allclose(np.abs(amps), np.abs(beta), atol=1e-12)
    assert np.sum(beta ** 2) == pytest.approx(1.0)


def test_registry_build_and_coerce():
    st = S.build(S.StateSpec("scs", {"alpha": [1.0, 0.5], "phi": 0}))
    assert F.mean_photon_number(st) > 0
    assert S.coerce_param("coherent", "alpha", "1+2i") == 1 + 2j
    assert S.coerce_param("ghz", "n", 4.0) == 4
    with pytest.raises(ValueError):
        S.coerce_param("ghz", "n", 4.5)
    with pytest.raises(KeyError):
        S.coerce_param("ghz", "alpha", 1)
    with pytest.raises(KeyError):
        S.build(S.StateSpec("unicorn"))
    assert isinstance(S.build(S.StateSpec("ghz", {"n": 3})), SpinState)
    with pytest.raises(ValueError):
        S.build(S.StateSpec("ghz", {"n": 3}, truncation=4))


def test_with_param_leaves_original():
    spec = S.StateSpec("ghz", {"n": 3})
    assert spec.with_param("n", 5).params["n"] == 5
    assert spec.params["n"] == 3
