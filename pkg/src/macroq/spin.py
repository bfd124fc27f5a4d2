"""Dense N-qubit states, local dephasing, reduced states and additive observables."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 12

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


class SpinError(ValueError):
    """Invalid qubit state or observable."""


def _qubits_for(size: int) -> int:
    n = int(round(math.log2(size))) if size > 0 else -1
    if n < 1 or 2 ** n != size:
        raise SpinError(f"dimension {size} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class SpinState:
    """Pure (vector of length 2^N) or mixed (2^N x 2^N matrix) qubit register state.

    Qubit 0 is the most significant bit of the computational-basis index.
    """

    data: np.ndarray
    max_qubits: int = MAX_QUBITS

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        if d.ndim not in (1, 2) or (d.ndim == 2 and d.shape[0] != d.shape[1]):
            raise SpinError(f"bad state shape {d.shape}")
        n = _qubits_for(d.shape[0])
        if n > self.max_qubits:
            raise SpinError(f"{n} qubits exceeds the bound of {self.max_qubits}")
        if d.ndim == 1:
            norm = np.linalg.norm(d)
            if abs(norm - 1) > 1e-10:
                raise SpinError(f"state norm {norm:.12g} differs from 1")
        else:
            if np.max(np.abs(d - d.conj().T)) > 1e-10:
                raise SpinError("density matrix is not Hermitian")
            tr = np.trace(d).real
            if abs(tr - 1) > 1e-10:
                raise SpinError(f"trace {tr:.12g} differs from 1")
        object.__setattr__(self, "data", d)

    @classmethod
    def normalized(cls, vector, max_qubits: int = MAX_QUBITS) -> "SpinState":
        v = np.asarray(vector, dtype=complex)
        return cls(v / np.linalg.norm(v), max_qubits)

    @classmethod
    def basis(cls, bits: str) -> "SpinState":
        v = np.zeros(2 ** len(bits), dtype=complex)
        v[int(bits, 2)] = 1.0
        return cls(v, max(MAX_QUBITS, len(bits)))

    @classmethod
    def product(cls, factors: Sequence[np.ndarray]) -> "SpinState":
        v = np.array([1.0 + 0j])
        for f in factors:
            f = np.asarray(f, dtype=complex)
            v = np.kron(v, f / np.linalg.norm(f))
        return cls(v, max(MAX_QUBITS, len(factors)))

    @property
    def n_qubits(self) -> int:
        return _qubits_for(self.data.shape[0])

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def ket(self) -> np.ndarray:
        if not self.is_pure:
            raise SpinError("state is mixed")
        return self.data

    @property
    def matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data


# ---------------------------------------------------------------------------
# local operator application on (2,)*N or (2,)*2N tensors


def apply_sites(op: np.ndarray, sites: Sequence[int], t: np.ndarray) -> np.ndarray:
    """Left-multiply ``op`` (acting on ``sites``, in that order) onto tensor axes ``sites``."""
    k = len(sites)
    m = np.asarray(op).reshape((2,) * (2 * k))
    out = np.tensordot(m, t, axes=(list(range(k, 2 * k)), list(sites)))
    return np.moveaxis(out, list(range(k)), list(sites))


def embed(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Dense single-site operator on an n-qubit register."""
    out = np.array([[1.0 + 0j]])
    for i in range(n):
        out = np.kron(out, op if i == site else IDENTITY)
    return out


# ---------------------------------------------------------------------------
# channels


def _hamming_weights(n: int) -> np.ndarray:
    idx = np.arange(2 ** n)
    w = np.zeros(2 ** n, dtype=int)
    for b in range(n):
        w += (idx >> b) & 1
    return w


def dephasing_factors(n: int, p0: float) -> np.ndarray:
    """Elementwise factors (2 p0 - 1)^{popcount(i xor j)} of the product dephasing map."""
    idx = np.arange(2 ** n)
    x = idx[:, None] ^ idx[None, :]
    weights = _hamming_weights(n)[x]
    return (2.0 * p0 - 1.0) ** weights


def dephase_operator(op: np.ndarray, n: int, p0: float) -> np.ndarray:
    """Apply p0 X + (1 - p0) Z X Z on every qubit of an arbitrary 2^n x 2^n operator."""
    if not 0.5 <= p0 <= 1.0:
        raise SpinError(f"p0 = {p0} outside [1/2, 1]")
    return np.asarray(op) * dephasing_factors(n, p0)


def dephase_each(state: SpinState, p0: float) -> SpinState:
    out = dephase_operator(state.matrix, state.n_qubits, p0)
    return SpinState(0.5 * (out + out.conj().T), state.max_qubits)


# ---------------------------------------------------------------------------
# coherence readout


def _block_vector(label, n: int) -> np.ndarray:
    if isinstance(label, SpinState):
        if label.n_qubits != n:
            raise SpinError("block state has the wrong qubit count")
        return label.ket
    if isinstance(label, str) and len(label) == n and set(label) <= {"0", "1"}:
        v = np.zeros(2 ** n, dtype=complex)
        v[int(label, 2)] = 1.0
        return v
    raise SpinError(f"unknown block label {label!r}")


def offdiag_trace_norm(state: SpinState, block_a, block_b) -> float:
    """Trace norm of P_a rho P_b for rank-one projectors onto the two constituents.

    Labels are computational-basis bit strings or pure ``SpinState`` constituents.
    """
    n = state.n_qubits
    a = _block_vector(block_a, n)
    b = _block_vector(block_b, n)
    return float(abs(np.vdot(a, state.matrix @ b)))


def branch_coherence(branch_a, branch_b, p0: float, weight: float = 1.0) -> float:
    """Trace norm of weight * E^{(x)N}(|a><b|) after dephasing every qubit with ``p0``.

    Branches may be lists of single-qubit vectors (exact product evaluation) or
    pure ``SpinState`` objects (dense evaluation).
    """
    if not 0.5 <= p0 <= 1.0:
        raise SpinError(f"p0 = {p0} outside [1/2, 1]")
    if isinstance(branch_a, SpinState) or isinstance(branch_b, SpinState):
        a = branch_a.ket if isinstance(branch_a, SpinState) else SpinState.product(branch_a).ket
        b = branch_b.ket if isinstance(branch_b, SpinState) else SpinState.product(branch_b).ket
        n = _qubits_for(a.size)
        x = dephase_operator(np.outer(a, b.conj()), n, p0)
        return float(abs(weight) * np.sum(np.linalg.svd(x, compute_uv=False)))
    if len(branch_a) != len(branch_b):
        raise SpinError("branches have different qubit counts")
    total = abs(weight)
    q = 2.0 * p0 - 1.0
    for fa, fb in zip(branch_a, branch_b):
        fa = np.asarray(fa, dtype=complex) / np.linalg.norm(fa)
        fb = np.asarray(fb, dtype=complex) / np.linalg.norm(fb)
        x = np.outer(fa, fb.conj())
        x[0, 1] *= q
        x[1, 0] *= q
        total *= float(np.sum(np.linalg.svd(x, compute_uv=False)))
    return total


# ---------------------------------------------------------------------------
# observables


@dataclass(frozen=True, eq=False)
class AdditiveObservable:
    """A = sum of local Hermitian terms with spectra inside [-1, 1].

    Without ``grouping`` each term is a 2x2 matrix on one site.  With
    ``grouping`` term k acts on the sites ``grouping[k]`` and has dimension
    2^len(group).
    """

    locals: tuple
    grouping: tuple | None = None

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=complex) for m in self.locals)
        groups = (tuple((i,) for i in range(len(mats))) if self.grouping is None
                  else tuple(tuple(int(s) for s in g) for g in self.grouping))
        if len(groups) != len(mats):
            raise SpinError("grouping and locals differ in length")
        flat = [s for g in groups for s in g]
        if len(set(flat)) != len(flat):
            raise SpinError("groups overlap")
        for m, g in zip(mats, groups):
            if m.shape != (2 ** len(g),) * 2:
                raise SpinError(f"local term of shape {m.shape} does not fit group {g}")
            if np.max(np.abs(m - m.conj().T)) > 1e-12:
                raise SpinError("local term is not Hermitian")
            ev = np.linalg.eigvalsh(m)
            if ev.min() < -1 - 1e-12 or ev.max() > 1 + 1e-12:
                raise SpinError("local spectrum outside [-1, 1]")
        object.__setattr__(self, "locals", mats)
        object.__setattr__(self, "grouping", groups)

    @classmethod
    def collective(cls, axis: str, n: int) -> "AdditiveObservable":
        return cls(tuple(PAULI[axis] for _ in range(n)))

    @property
    def n_sites(self) -> int:
        return 1 + max(s for g in self.grouping for s in g)

    def apply(self, t: np.ndarray, offset: int = 0) -> np.ndarray:
        """A acting on tensor axes ``offset + site``."""
        out = np.zeros_like(t)
        for m, g in zip(self.locals, self.grouping):
            out = out + apply_sites(m, [offset + s for s in g], t)
        return out

    def matrix(self, n: int | None = None) -> np.ndarray:
        n = self.n_sites if n is None else n
        d = 2 ** n
        eye = np.eye(d, dtype=complex).reshape((2,) * n + (d,))
        return self.apply(eye).reshape(d, d)


def _check_obs(state: SpinState, obs: AdditiveObservable) -> None:
    if obs.n_sites > state.n_qubits:
        raise SpinError(f"observable spans {obs.n_sites} sites, state has {state.n_qubits}")


def expectation(state: SpinState, obs: AdditiveObservable) -> float:
    _check_obs(state, obs)
    n = state.n_qubits
    if state.is_pure:
        t = state.ket.reshape((2,) * n)
        return float(np.vdot(t, obs.apply(t)).real)
    t = state.matrix.reshape((2,) * (2 * n))
    return float(np.trace(obs.apply(t).reshape(2 ** n, 2 ** n)).real)


def variance(state: SpinState, obs: AdditiveObservable) -> float:
    _check_obs(state, obs)
    n = state.n_qubits
    if state.is_pure:
        t = state.ket.reshape((2,) * n)
        at = obs.apply(t)
        mean = np.vdot(t, at).real
        return float(np.vdot(at, at).real - mean ** 2)
    t = state.matrix.reshape((2,) * (2 * n))
    at = obs.apply(t)
    aat = obs.apply(at)
    d = 2 ** n
    mean = np.trace(at.reshape(d, d)).real
    return float(np.trace(aat.reshape(d, d)).real - mean ** 2)


@dataclass(frozen=True, eq=False)
class ProjectorSpec:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise SpinError("projector must be square")
        if np.max(np.abs(m - m.conj().T)) > 1e-9 or np.max(np.abs(m @ m - m)) > 1e-9:
            raise SpinError("matrix is not a Hermitian idempotent")
        object.__setattr__(self, "matrix", m)


def reduced_state(state: SpinState, keep: Iterable[int]) -> SpinState:
    n = state.n_qubits
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise SpinError("keep set is empty")
    if keep[0] < 0 or keep[-1] >= n:
        raise SpinError(f"keep set {keep} out of range for {n} qubits")
    rest = [i for i in range(n) if i not in keep]
    dk = 2 ** len(keep)
    if state.is_pure:
        t = np.transpose(state.ket.reshape((2,) * n), keep + rest).reshape(dk, -1)
        m = t @ t.conj().T
    else:
        t = state.matrix.reshape((2,) * (2 * n))
        t = np.transpose(t, keep + rest + [n + k for k in keep] + [n + r for r in rest])
        dr = 2 ** len(rest)
        m = np.einsum("arbr->ab", t.reshape(dk, dr, dk, dr))
    return SpinState(0.5 * (m + m.conj().T), state.max_qubits)


def entropy(state: SpinState) -> float:
    if state.is_pure:
        return 0.0
    lam = np.linalg.eigvalsh(state.matrix)
    lam = lam[lam > 1e-12]
    return float(max(-np.sum(lam * np.log(lam)), 0.0))
