"""Builders for the optical and spin states graded by the measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy.special import comb, gammaln

from macroq import fock as F
from macroq.fock import DensityOperator, FockPureState, TruncationError
from macroq.spin import MAX_QUBITS, SpinState

MAX_CUTOFF = 3000


def _fit_cutoff(make: Callable[[int], FockPureState], mean_n: float, truncation, field_modes) -> FockPureState:
    """Build with the automatic cutoff, growing it until the field modes pass the tail check."""
    if truncation is not None:
        st = make(int(truncation))
        st.check_tail(modes=field_modes)
        return st
    d = F.auto_cutoff(mean_n)
    while d <= MAX_CUTOFF:
        try:
            st = make(d)
            if np.all(st.tail_weights()[list(field_modes)] <= F.TAIL_TOL):
                return st
        except TruncationError:
            pass
        d = int(math.ceil(1.3 * d)) + 2
    raise TruncationError(f"no cutoff up to {MAX_CUTOFF} satisfies the tail tolerance")


def _unit(dim: int, n: int = 0) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


# ---------------------------------------------------------------------------
# single-mode states


def vacuum(truncation: int = 2) -> FockPureState:
    return FockPureState(_unit(truncation))


def fock_state(n: int, truncation: int | None = None) -> FockPureState:
    d = n + 3 if truncation is None else int(truncation)
    if n >= d:
        raise TruncationError(f"Fock level {n} does not fit cutoff {d}")
    return FockPureState(_unit(d, n))


def coherent(alpha: complex, truncation: int | None = None) -> FockPureState:
    return _fit_cutoff(lambda d: FockPureState.from_vector(F.coherent_amplitudes(alpha, d), d),
                       abs(alpha) ** 2, truncation, [0])


def scs(alpha: complex, phi: float = 0.0, truncation: int | None = None) -> FockPureState:
    """N(|alpha> + e^{i phi}|-alpha>)."""
    alpha = complex(alpha)
    if abs(1 + np.exp(1j * phi) * math.exp(-2 * abs(alpha) ** 2)) < 1e-14:
        raise ValueError("odd superposition of coincident coherent states is undefined")

    def make(d):
        n = np.arange(d)
        c = F.coherent_amplitudes(alpha, d) * (1 + np.exp(1j * phi) * (-1.0) ** n)
        return FockPureState.from_vector(c, d)

    return _fit_cutoff(make, abs(alpha) ** 2, truncation, [0])


def scs_normalization(alpha: complex, phi: float) -> float:
    """N_phi with N_phi^2 = 1 / (2 + 2 cos(phi) e^{-2|alpha|^2})."""
    return 1.0 / math.sqrt(2 + 2 * math.cos(phi) * math.exp(-2 * abs(alpha) ** 2))


def squeezed_vacuum(r: float, truncation: int | None = None) -> FockPureState:
    def make(d):
        return F.evolve(FockPureState(_unit(d)), F.squeeze(d, 0, r))

    return _fit_cutoff(make, math.sinh(r) ** 2, truncation, [0])


def squeezed_scs(alpha: complex, r: float, phi: float = 0.0, truncation: int | None = None) -> FockPureState:
    """S(r) N(|alpha> + e^{i phi}|-alpha>)."""

    def make(d):
        base = scs(alpha, phi, truncation=d)
        return F.evolve(base, F.squeeze(d, 0, r))

    mean = abs(alpha) ** 2 * math.exp(2 * abs(r)) + math.sinh(r) ** 2
    return _fit_cutoff(make, mean, truncation, [0])


def coherent_mixture(alpha: complex, truncation: int | None = None) -> DensityOperator:
    """Equal incoherent mixture of |alpha> and |-alpha>."""
    a = coherent(alpha, truncation).vector
    b = coherent(-alpha, a.size).vector
    return DensityOperator(a.size, 0.5 * (np.outer(a, a.conj()) + np.outer(b, b.conj())))


def vacuum_coherent(alpha: complex, truncation: int | None = None) -> FockPureState:
    """|0> + |alpha>, normalized."""

    def make(d):
        return FockPureState.from_vector(_unit(d) + F.coherent_amplitudes(alpha, d), d)

    return _fit_cutoff(make, abs(alpha) ** 2, truncation, [0])


# ---------------------------------------------------------------------------
# two-mode and hybrid states


def ecs(alpha: complex, phi: float = 0.0, truncation: int | None = None) -> FockPureState:
    """N'(|alpha>|alpha> + e^{i phi}|-alpha>|-alpha>)."""
    alpha = complex(alpha)
    if abs(1 + np.exp(1j * phi) * math.exp(-4 * abs(alpha) ** 2)) < 1e-14:
        raise ValueError("odd superposition of coincident coherent states is undefined")

    def make(d):
        p = F.coherent_amplitudes(alpha, d)
        m = F.coherent_amplitudes(-alpha, d)
        t = np.outer(p, p) + np.exp(1j * phi) * np.outer(m, m)
        return FockPureState.from_vector(t, (d, d))

    return _fit_cutoff(make, abs(alpha) ** 2, truncation, [0, 1])


def hybrid(alpha: complex, truncation: int | None = None) -> FockPureState:
    """(|0>|alpha> + |1>|-alpha>)/sqrt(2); mode 0 is a two-level mode."""

    def make(d):
        t = np.zeros((2, d), dtype=complex)
        t[0] = F.coherent_amplitudes(alpha, d)
        t[1] = F.coherent_amplitudes(-alpha, d)
        return FockPureState.from_vector(t, (2, d))

    return _fit_cutoff(make, abs(alpha) ** 2, truncation, [1])


def single_photon_entanglement(dims=(2, 2)) -> FockPureState:
    """(|1>|0> + |0>|1>)/sqrt(2)."""
    t = np.zeros(tuple(dims), dtype=complex)
    t[1, 0] = t[0, 1] = 1.0
    return FockPureState.from_vector(t, dims)


def displaced_spe(alpha: complex, both_modes: bool = False, truncation: int | None = None) -> FockPureState:
    """D_B(alpha) (or D_A D_B) applied to single-photon entanglement."""

    def make(d):
        dims = (d if both_modes else 2, d)
        st = single_photon_entanglement(dims)
        st = F.evolve(st, F.displace(dims, 1, alpha))
        if both_modes:
            st = F.evolve(st, F.displace(dims, 0, alpha))
        return st

    return _fit_cutoff(make, abs(alpha) ** 2 + 1, truncation, [0, 1] if both_modes else [1])


def displaced_qubit_branches(alpha: complex, truncation: int | None = None) -> tuple[FockPureState, FockPureState]:
    """D(alpha)|+> and D(alpha)|->, the branches of displaced single-photon entanglement."""

    def make(d):
        plus = np.zeros(d, dtype=complex)
        plus[:2] = 1.0
        return F.evolve(FockPureState.from_vector(plus, d), F.displace(d, 0, alpha))

    a = _fit_cutoff(make, abs(alpha) ** 2 + 1, truncation, [0])
    d = a.dims[0]
    minus = np.zeros(d, dtype=complex)
    minus[0], minus[1] = 1.0, -1.0
    b = F.evolve(FockPureState.from_vector(minus, d), F.displace(d, 0, alpha))
    return a, b


def squeezed_spe(r: float, truncation: int | None = None) -> FockPureState:
    """S_B(r) applied to single-photon entanglement."""

    def make(d):
        st = single_photon_entanglement((2, d))
        return F.evolve(st, F.squeeze((2, d), 1, r))

    return _fit_cutoff(make, 3 * math.sinh(r) ** 2 + 1, truncation, [1])


def qiopa_coefficients(g: float, order_cap: int) -> np.ndarray:
    """Delta_ij for i, j <= order_cap (g >= 0)."""
    if g < 0:
        raise ValueError("gain g must be non-negative")
    out = np.zeros((order_cap + 1,) * 2)
    if g == 0:
        out[0, 0] = 1.0
        return out
    i = np.arange(order_cap + 1)
    lt = math.log(math.tanh(g) / 2)
    log_i = i * lt + 0.5 * gammaln(2 * i + 2) - gammaln(i + 1)
    log_j = i * lt + 0.5 * gammaln(2 * i + 1) - gammaln(i + 1)
    mag = np.exp(-2 * math.log(math.cosh(g)) + log_i[:, None] + log_j[None, :])
    return mag * ((-1.0) ** i)[:, None]


def qiopa(g: float, order_cap: int = 40) -> FockPureState:
    """(|R>_A |Phi^L>_B - |L>_A |Phi^R>_B)/sqrt(2).

    Modes: (A_R, A_L, B_R, B_L).  The micro qubit is dual-rail, |R>_A = |1,0>
    and |L>_A = |0,1>; the amplified pair is two photon-number modes with
    cutoff 2 * order_cap + 2.
    """
    delta = qiopa_coefficients(g, order_cap)
    weight = float(np.sum(delta ** 2))
    if weight < 1 - 1e-8:
        raise TruncationError(f"order cap {order_cap} keeps only {weight:.10f} of the weight at g={g}")
    d = 2 * order_cap + 2
    phi_r = np.zeros((d, d))  # (B_R, B_L)
    idx = np.arange(order_cap + 1)
    phi_r[np.ix_(2 * idx + 1, 2 * idx)] = delta
    phi_l = phi_r.T.copy()
    t = np.zeros((2, 2, d, d), dtype=complex)
    t[1, 0] = phi_l
    t[0, 1] = -phi_r
    return FockPureState.from_vector(t, (2, 2, d, d))


# ---------------------------------------------------------------------------
# spin states


def _check_n(n: int, lo: int = 1, bound: int = MAX_QUBITS) -> None:
    if not lo <= n <= bound:
        raise ValueError(f"N = {n} outside [{lo}, {bound}]")


def ghz(n: int) -> SpinState:
    _check_n(n)
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = v[-1] = 1 / math.sqrt(2)
    return SpinState(v)


def generalized_ghz_branches(n: int, epsilon: float) -> tuple[list[np.ndarray], list[np.ndarray], float]:
    """Product branches |0>^N and |eps>^N with the normalization constant K."""
    e = np.array([math.cos(epsilon), math.sin(epsilon)], dtype=complex)
    z = np.array([1.0, 0.0], dtype=complex)
    return [z] * n, [e] * n, 2 * (1 + math.cos(epsilon) ** n)


def generalized_ghz(n: int, epsilon: float) -> SpinState:
    """(|0>^N + |eps>^N)/sqrt(K) with |eps> = cos(eps)|0> + sin(eps)|1>."""
    _check_n(n, 2)
    if not 0 < epsilon <= math.pi / 2 + 1e-15:
        raise ValueError("epsilon must lie in (0, pi/2]")
    za, ea, _ = generalized_ghz_branches(n, epsilon)
    v = SpinState.product(za).ket + SpinState.product(ea).ket
    return SpinState(v / np.linalg.norm(v))


def mixed_ghz(n: int, gamma: float) -> SpinState:
    _check_n(n, 2)
    if not 0 <= gamma <= 1:
        raise ValueError("Gamma must lie in [0, 1]")
    d = 2 ** n
    m = np.zeros((d, d), dtype=complex)
    m[0, 0] = m[-1, -1] = 0.5
    m[0, -1] = m[-1, 0] = 0.5 * gamma
    return SpinState(m)


def product_state(n: int, axis: str = "x") -> SpinState:
    """Every qubit in the +1 eigenstate of sigma_axis."""
    _check_n(n)
    f = {"x": np.array([1, 1]) / math.sqrt(2), "y": np.array([1, 1j]) / math.sqrt(2),
         "z": np.array([1, 0])}[axis]
    return SpinState.product([f] * n)


def dn_branches(n: int) -> tuple[SpinState, SpinState]:
    """|0>^N and the normalized sum over k = 0..N of |1>^k |0>^(N-k)."""
    _check_n(n)
    b = np.zeros(2 ** n, dtype=complex)
    for k in range(n + 1):
        b[int("1" * k + "0" * (n - k), 2)] += 1.0
    return SpinState.basis("0" * n), SpinState.normalized(b)


def dn_state(n: int) -> SpinState:
    _check_n(n)
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = 1.0
    for k in range(n + 1):
        v[int("1" * k + "0" * (n - k), 2)] += 1.0
    return SpinState.normalized(v)


def cooper_product(n: int, phi: float = 0.0) -> SpinState:
    """(|00> + e^{i phi}|11>)^{(x)N} on 2N qubits."""
    _check_n(2 * n, 2)
    pair = np.array([1, 0, 0, np.exp(1j * phi)], dtype=complex) / math.sqrt(2)
    v = np.array([1.0 + 0j])
    for _ in range(n):
        v = np.kron(v, pair)
    return SpinState(v)


def marquardt_pair(n: int, theta: float) -> tuple[FockPureState, FockPureState]:
    """|A> = |N,0> and |B> = (cos(theta) a^dag + sin(theta) b^dag)^N |0,0> / sqrt(N!)."""
    if not 0 <= n <= 60:
        raise ValueError(f"N = {n} outside [0, 60]")
    dims = (n + 1, n + 1)
    a = np.zeros(dims, dtype=complex)
    a[n, 0] = 1.0
    ad = F.ladder(dims, 0, "create").matrix
    bd = F.ladder(dims, 1, "create").matrix
    mix = math.cos(theta) * np.kron(ad, np.eye(n + 1)) + math.sin(theta) * np.kron(np.eye(n + 1), bd)
    v = np.zeros((n + 1) ** 2, dtype=complex)
    v[0] = 1.0
    for _ in range(n):
        v = mix @ v
    v = v / math.exp(0.5 * gammaln(n + 1))
    return FockPureState(a), FockPureState.from_vector(v, dims)


def marquardt_coefficients(n: int, theta: float) -> np.ndarray:
    """beta_d = sqrt(C(N, d)) sin^d cos^(N-d), the amplitude on |N-d, d>."""
    d = np.arange(n + 1)
    return np.sqrt(comb(n, d)) * math.sin(theta) ** d * math.cos(theta) ** (n - d)


# ---------------------------------------------------------------------------
# random states for property checks


def random_pure(dims, rng: np.random.Generator, decay: float = 0.0) -> FockPureState:
    """Random pure state; ``decay`` > 0 damps high Fock levels as exp(-decay * n)."""
    dims = F._as_dims(dims)
    t = rng.normal(size=dims) + 1j * rng.normal(size=dims)
    if decay:
        grids = np.meshgrid(*[np.arange(d) for d in dims], indexing="ij")
        t = t * np.exp(-decay * sum(grids))
    return FockPureState.from_vector(t, dims)


def random_density(dims, rng: np.random.Generator, rank: int = 3, decay: float = 0.0) -> DensityOperator:
    dims = F._as_dims(dims)
    w = rng.dirichlet(np.ones(rank))
    D = int(np.prod(dims))
    m = np.zeros((D, D), dtype=complex)
    for k in range(rank):
        v = random_pure(dims, rng, decay).vector
        m += w[k] * np.outer(v, v.conj())
    return DensityOperator(dims, 0.5 * (m + m.conj().T))


def random_spin(n: int, rng: np.random.Generator) -> SpinState:
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return SpinState.normalized(v)


# ---------------------------------------------------------------------------
# declarative specs


@dataclass(frozen=True)
class StateSpec:
    """A builder kind plus its parameters, as read from a manifest."""

    kind: str
    params: dict[str, Any] = field(default_factory=dict)
    truncation: int | None = None

    def with_param(self, name: str, value) -> "StateSpec":
        return StateSpec(self.kind, {**self.params, name: value}, self.truncation)


def _fock_kw(fn):
    def call(params, truncation):
        return fn(**params, truncation=truncation) if truncation is not None else fn(**params)
    return call


def _spin_kw(fn):
    def call(params, truncation):
        if truncation is not None:
            raise ValueError("spin states take no truncation")
        return fn(**params)
    return call


# kind -> (callable(params, truncation), {param: type})
REGISTRY: dict[str, tuple[Callable, dict[str, type]]] = {
    "vacuum": (lambda p, t: vacuum(t or 2), {}),
    "fock": (_fock_kw(fock_state), {"n": int}),
    "coherent": (_fock_kw(coherent), {"alpha": complex}),
    "scs": (_fock_kw(scs), {"alpha": complex, "phi": float}),
    "ecs": (_fock_kw(ecs), {"alpha": complex, "phi": float}),
    "coherent_mixture": (_fock_kw(coherent_mixture), {"alpha": complex}),
    "vacuum_coherent": (_fock_kw(vacuum_coherent), {"alpha": complex}),
    "squeezed_vacuum": (_fock_kw(squeezed_vacuum), {"r": float}),
    "squeezed_scs": (_fock_kw(squeezed_scs), {"alpha": complex, "r": float, "phi": float}),
    "hybrid": (_fock_kw(hybrid), {"alpha": complex}),
    "spe": (lambda p, t: single_photon_entanglement((2, t or 2)), {}),
    "displaced_spe": (_fock_kw(displaced_spe), {"alpha": complex, "both_modes": bool}),
    "squeezed_spe": (_fock_kw(squeezed_spe), {"r": float}),
    "qiopa": (lambda p, t: qiopa(**p), {"g": float, "order_cap": int}),
    "ghz": (_spin_kw(ghz), {"n": int}),
    "generalized_ghz": (_spin_kw(generalized_ghz), {"n": int, "epsilon": float}),
    "mixed_ghz": (_spin_kw(mixed_ghz), {"n": int, "gamma": float}),
    "product": (_spin_kw(product_state), {"n": int, "axis": str}),
    "dn": (_spin_kw(dn_state), {"n": int}),
    "cooper_product": (_spin_kw(cooper_product), {"n": int, "phi": float}),
    "marquardt_b": (lambda p, t: marquardt_pair(**p)[1], {"n": int, "theta": float}),
}


def coerce_param(kind: str, name: str, value):
    """Convert a manifest value to the type the builder expects."""
    types = REGISTRY[kind][1]
    if name not in types:
        raise KeyError(f"state kind {kind!r} has no parameter {name!r}")
    typ = types[name]
    if typ is complex:
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, str):
            return complex(value.replace(" ", "").replace("i", "j"))
        return complex(value)
    if typ is int:
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"{name} must be an integer, got {value}")
        return int(value)
    if typ is bool:
        if not isinstance(value, bool):
            raise ValueError(f"{name} must be true or false")
        return value
    if typ is str:
        return str(value)
    return float(value)


def build(spec: StateSpec):
    if spec.kind not in REGISTRY:
        raise KeyError(f"unknown state kind {spec.kind!r}")
    fn, _ = REGISTRY[spec.kind]
    params = {k: coerce_param(spec.kind, k, v) for k, v in spec.params.items()}
    return fn(params, spec.truncation)

