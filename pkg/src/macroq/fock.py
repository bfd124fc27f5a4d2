"""Multi-mode truncated Fock space.

States are stored as tensors with one axis per mode (pure states) or one
ket axis and one bra axis per mode (density operators).  Operators that act
on a subset of modes are applied by tensor contraction, so no operator is
ever embedded into the full product space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg as sla
from scipy.special import gammaln

TAIL_TOL = 1e-8
NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_TOL = 1e-9


class TruncationError(ValueError):
    """Raised when a Fock cutoff is too small for the requested state."""


class StateError(ValueError):
    """Raised when a state violates normalization, hermiticity or positivity."""


def auto_cutoff(mean_n: float) -> int:
    """Default per-mode cutoff for a mode with mean photon number ``mean_n``."""
    mean_n = max(float(mean_n), 0.0)
    return int(math.ceil(mean_n + 6.0 * math.sqrt(mean_n) + 10.0))


def _as_dims(dims) -> tuple[int, ...]:
    if isinstance(dims, (int, np.integer)):
        return (int(dims),)
    return tuple(int(d) for d in dims)


@dataclass(frozen=True, eq=False)
class FockPureState:
    """Normalized pure state; ``tensor`` has shape ``dims``."""

    tensor: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.tensor, dtype=complex)
        object.__setattr__(self, "tensor", t)
        norm = np.linalg.norm(t)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state norm {norm:.12g} differs from 1")

    @classmethod
    def from_vector(cls, vector, dims, normalize: bool = True) -> "FockPureState":
        dims = _as_dims(dims)
        v = np.asarray(vector, dtype=complex).reshape(dims)
        if normalize:
            n = np.linalg.norm(v)
            if n == 0:
                raise StateError("cannot normalize the zero vector")
            v = v / n
        return cls(v)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.tensor.shape

    @property
    def mode_count(self) -> int:
        return self.tensor.ndim

    @property
    def vector(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def tail_weights(self, levels: int = 2) -> np.ndarray:
        """Probability mass in the top ``levels`` Fock levels of every mode."""
        p = np.abs(self.tensor) ** 2
        out = []
        for m in range(self.mode_count):
            marg = p.sum(axis=tuple(i for i in range(self.mode_count) if i != m))
            out.append(marg[-levels:].sum())
        return np.array(out)

    def check_tail(self, tol: float = TAIL_TOL, modes: Iterable[int] | None = None) -> None:
        w = self.tail_weights()
        if modes is not None:
            w = w[list(modes)]
        if np.any(w > tol):
            raise TruncationError(f"tail weight {w.max():.3g} above {tol:g}; raise the cutoff")

    def resized(self, dims) -> "FockPureState":
        return FockPureState.from_vector(_resize(self.tensor, _as_dims(dims)), dims, normalize=True)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Mixed state on modes with truncations ``dims``; ``matrix`` is row-major in the product basis."""

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = _as_dims(self.dims)
        m = np.asarray(self.matrix, dtype=complex)
        size = int(np.prod(dims))
        if m.shape != (size, size):
            raise StateError(f"matrix shape {m.shape} does not match dims {dims}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise StateError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateError(f"trace {tr:.12g} differs from 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_pure(cls, state: FockPureState) -> "DensityOperator":
        v = state.vector
        return cls(state.dims, np.outer(v, v.conj()))

    @classmethod
    def from_tensor(cls, tensor, dims, hermitize: bool = True) -> "DensityOperator":
        dims = _as_dims(dims)
        size = int(np.prod(dims))
        m = np.asarray(tensor, dtype=complex).reshape(size, size)
        if hermitize:
            m = 0.5 * (m + m.conj().T)
        return cls(dims, m)

    @property
    def mode_count(self) -> int:
        return len(self.dims)

    @property
    def tensor(self) -> np.ndarray:
        return self.matrix.reshape(self.dims + self.dims)

    def check_psd(self, tol: float = PSD_TOL) -> None:
        lo = np.linalg.eigvalsh(self.matrix).min()
        if lo < -tol:
            raise StateError(f"negative eigenvalue {lo:.3g}")

    def tail_weights(self, levels: int = 2) -> np.ndarray:
        diag = np.real(np.diagonal(self.matrix)).reshape(self.dims)
        out = []
        for m in range(self.mode_count):
            marg = diag.sum(axis=tuple(i for i in range(self.mode_count) if i != m))
            out.append(marg[-levels:].sum())
        return np.array(out)

    def check_tail(self, tol: float = TAIL_TOL, modes: Iterable[int] | None = None) -> None:
        w = self.tail_weights()
        if modes is not None:
            w = w[list(modes)]
        if np.any(w > tol):
            raise TruncationError(f"tail weight {w.max():.3g} above {tol:g}; raise the cutoff")

    def resized(self, dims) -> "DensityOperator":
        dims = _as_dims(dims)
        t = _resize(self.tensor, dims + dims)
        size = int(np.prod(dims))
        m = t.reshape(size, size)
        m = m / np.trace(m).real
        return DensityOperator(dims, m)


def as_density(state) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return state
    if isinstance(state, FockPureState):
        return DensityOperator.from_pure(state)
    raise TypeError(f"expected a Fock state, got {type(state).__name__}")


def _resize(t: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    sl = tuple(slice(0, min(a, b)) for a, b in zip(t.shape, shape))
    out[sl] = t[sl]
    return out


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """Operator acting on ``acts_on`` modes; ``matrix`` is in the product basis of those modes."""

    acts_on: tuple[int, ...]
    matrix: np.ndarray
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        acts = tuple(int(m) for m in self.acts_on)
        object.__setattr__(self, "acts_on", acts)
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        dims = tuple(self.dims)
        if not dims:
            if len(acts) != 1:
                raise ValueError("dims are required for multi-mode operators")
            dims = (m.shape[0],)
        if len(dims) != len(acts) or m.shape != (int(np.prod(dims)),) * 2:
            raise ValueError(f"operator shape {m.shape} inconsistent with dims {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def dagger(self) -> "ModeOperator":
        return ModeOperator(self.acts_on, self.matrix.conj().T, self.dims)

    def __matmul__(self, other: "ModeOperator") -> "ModeOperator":
        if self.acts_on != other.acts_on:
            raise ValueError("operators act on different modes")
        return ModeOperator(self.acts_on, self.matrix @ other.matrix, self.dims)

    def deviation_from_unitary(self) -> float:
        u = self.matrix
        return float(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))))


def _mode_dim(dims, mode: int) -> int:
    dims = _as_dims(dims)
    if not 0 <= mode < len(dims):
        raise IndexError(f"mode {mode} out of range for {len(dims)} modes")
    return dims[mode]


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def ladder(dims, mode: int = 0, kind: str = "annihilate") -> ModeOperator:
    d = _mode_dim(dims, mode)
    if d < 2:
        raise TruncationError("ladder operators need a cutoff of at least 2")
    a = annihilation(d)
    if kind == "annihilate":
        return ModeOperator((mode,), a)
    if kind == "create":
        return ModeOperator((mode,), a.T.copy())
    raise ValueError(f"unknown ladder kind {kind!r}")


def number_operator(dims, mode: int = 0) -> ModeOperator:
    d = _mode_dim(dims, mode)
    return ModeOperator((mode,), np.diag(np.arange(d, dtype=float)))


def _check_gaussian_tail(u: np.ndarray, what: str, tol: float = TAIL_TOL) -> None:
    col = u[:, 0]
    tail = float(np.sum(np.abs(col[-2:]) ** 2))
    if tail > tol:
        raise TruncationError(f"{what}: vacuum image has tail weight {tail:.3g} at cutoff {u.shape[0]}")


def displace(dims, mode: int, alpha: complex, check: bool = True) -> ModeOperator:
    """D(alpha) = exp(alpha a^dag - alpha^* a) from the truncated generator."""
    d = _mode_dim(dims, mode)
    a = annihilation(d)
    alpha = complex(alpha)
    u = sla.expm(alpha * a.conj().T - np.conj(alpha) * a)
    if check:
        _check_gaussian_tail(u, f"displacement {alpha:.4g}")
    return ModeOperator((mode,), u)


def squeeze(dims, mode: int, r: float, check: bool = True) -> ModeOperator:
    """S(r) = exp(r (a^2 - a^dag^2) / 2); the x = a + a^dag variance of S(r)|0> is e^{-2r}."""
    d = _mode_dim(dims, mode)
    a = annihilation(d)
    ad = a.conj().T
    u = sla.expm(0.5 * float(r) * (a @ a - ad @ ad))
    if check:
        _check_gaussian_tail(u, f"squeezing {r:.4g}")
    return ModeOperator((mode,), u)


def beam_splitter(dims, modes: tuple[int, int], transmissivity: float) -> ModeOperator:
    """exp(theta (a^dag b - a b^dag)) with cos^2 theta = transmissivity."""
    i, j = modes
    di, dj = _mode_dim(dims, i), _mode_dim(dims, j)
    if di != dj:
        raise ValueError(f"beam splitter needs equal truncations, got {di} and {dj}")
    if not 0.0 <= transmissivity <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    theta = math.acos(math.sqrt(transmissivity))
    # the generator conserves n_a + n_b, so exponentiate one total-number block at a time
    d = di
    n_a, n_b = np.divmod(np.arange(d * d), d)
    u = np.zeros((d * d, d * d))
    for total in range(2 * d - 1):
        idx = np.nonzero(n_a + n_b == total)[0]
        na = n_a[idx]
        # <n_a+1, n_b-1| a^dag b |n_a, n_b> couples neighbours within the block
        off = np.sqrt((na[:-1] + 1) * n_b[idx][:-1])
        gen = np.diag(off, -1) - np.diag(off, 1)
        u[np.ix_(idx, idx)] = sla.expm(theta * gen)
    return ModeOperator((i, j), u.astype(complex), (di, dj))


def _apply_to_tensor(op: ModeOperator, t: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Left-multiply ``op`` on the tensor axes ``axes`` (one per operator mode)."""
    k = len(axes)
    m = op.matrix.reshape(op.dims + op.dims)
    out = np.tensordot(m, t, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _check_op(op: ModeOperator, dims: tuple[int, ...]) -> None:
    for mode, d in zip(op.acts_on, op.dims):
        if _mode_dim(dims, mode) != d:
            raise ValueError(f"operator cutoff {d} does not match mode {mode} cutoff {dims[mode]}")


def apply_operator(state: FockPureState, op: ModeOperator) -> tuple[FockPureState, float]:
    """Apply a (possibly non-unitary) operator and renormalize; returns (state, squared norm)."""
    _check_op(op, state.dims)
    t = _apply_to_tensor(op, state.tensor, op.acts_on)
    n2 = float(np.vdot(t, t).real)
    if n2 <= 0:
        raise StateError("operator annihilates the state")
    return FockPureState(t / math.sqrt(n2)), n2


def evolve(state, op: ModeOperator):
    """Unitary evolution of a pure state or density operator."""
    if isinstance(state, FockPureState):
        _check_op(op, state.dims)
        t = _apply_to_tensor(op, state.tensor, op.acts_on)
        return FockPureState(t / np.linalg.norm(t))
    rho = as_density(state)
    _check_op(op, rho.dims)
    M = rho.mode_count
    t = _apply_to_tensor(op, rho.tensor, op.acts_on)
    t = _apply_to_tensor(ModeOperator(op.acts_on, op.matrix.conj(), op.dims), t,
                         [m + M for m in op.acts_on])
    out = DensityOperator.from_tensor(t, rho.dims)
    return DensityOperator(rho.dims, out.matrix / np.trace(out.matrix).real)


def expect(state, op: ModeOperator) -> complex:
    if isinstance(state, FockPureState):
        _check_op(op, state.dims)
        t = _apply_to_tensor(op, state.tensor, op.acts_on)
        return complex(np.vdot(state.tensor, t))
    rho = as_density(state)
    _check_op(op, rho.dims)
    t = _apply_to_tensor(op, rho.tensor, op.acts_on)
    D = int(np.prod(rho.dims))
    return complex(np.trace(t.reshape(D, D)))


# ---------------------------------------------------------------------------
# channels


def loss_kraus(dim: int, tau: float) -> np.ndarray:
    """Kraus operators, indexed (k, out, in), of pure loss with transmission exp(-tau)."""
    K = np.zeros((dim, dim, dim))
    if tau == 0:
        K[0] = np.eye(dim)
        return K
    log_eta = -float(tau)
    log_lost = math.log(-math.expm1(-tau))
    n = np.arange(dim)
    for k in range(dim):
        src = n[k:]
        logc = gammaln(src + 1) - gammaln(k + 1) - gammaln(src - k + 1)
        K[k, src - k, src] = np.exp(0.5 * (logc + (src - k) * log_eta + k * log_lost))
    return K


def _loss_generator_superop(dims: tuple[int, ...], modes: Iterable[int]) -> np.ndarray:
    D = int(np.prod(dims))
    eye = np.eye(D)
    L = np.zeros((D * D, D * D), dtype=complex)
    for m in modes:
        a = _embed(annihilation(dims[m]), m, dims)
        n = a.conj().T @ a
        L += np.kron(a, a.conj()) - 0.5 * np.kron(n, eye) - 0.5 * np.kron(eye, n.T)
    return L


def _embed(local: np.ndarray, mode: int, dims: tuple[int, ...]) -> np.ndarray:
    out = np.array([[1.0]])
    for i, d in enumerate(dims):
        out = np.kron(out, local if i == mode else np.eye(d))
    return out


def loss_generator(matrix: np.ndarray, dims: tuple[int, ...], modes: Iterable[int]) -> np.ndarray:
    """a rho a^dag - {a^dag a, rho}/2 summed over ``modes``, for an operator given as a matrix."""
    M = len(dims)
    t = np.asarray(matrix).reshape(dims + dims)
    out = np.zeros_like(t)
    for m in modes:
        a = ModeOperator((m,), annihilation(dims[m]))
        n = np.arange(dims[m], dtype=float)
        ara = _apply_to_tensor(a, t, [m])
        ara = _apply_to_tensor(ModeOperator((m,), a.matrix.conj()), ara, [m + M])
        shape_k = [1] * (2 * M)
        shape_k[m] = dims[m]
        shape_b = [1] * (2 * M)
        shape_b[m + M] = dims[m]
        out = out + ara - 0.5 * (n.reshape(shape_k) + n.reshape(shape_b)) * t
    D = int(np.prod(dims))
    return out.reshape(D, D)


def apply_loss(state, tau: float, modes: Iterable[int] | None = None, method: str = "kraus") -> DensityOperator:
    """Photon loss over dimensionless time ``tau`` on ``modes`` (default: all).

    ``method`` selects the exact Kraus solution, the matrix exponential of the
    vectorized generator (small spaces only) or fixed-step RK4 integration.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    rho = as_density(state)
    modes = list(range(rho.mode_count)) if modes is None else sorted(set(int(m) for m in modes))
    for m in modes:
        _mode_dim(rho.dims, m)
    if tau == 0:
        return rho
    if method == "kraus":
        t = rho.tensor
        for m in modes:
            d = rho.dims[m]
            K = loss_kraus(d, tau)
            L = int(np.prod(rho.dims[:m]))
            R = int(np.prod(rho.dims[m + 1:]))
            r6 = t.reshape(L, d, R, L, d, R)
            r6 = np.einsum("kab,xbyzcw,kdc->xayzdw", K, r6, K, optimize=True)
            t = r6.reshape(rho.dims + rho.dims)
        return _finish_channel(t, rho.dims)
    if method == "expm":
        D = int(np.prod(rho.dims))
        if D * D > 400:
            raise ValueError("expm method is limited to superoperator dimension 400")
        L = _loss_generator_superop(rho.dims, modes)
        vec = sla.expm(tau * L) @ rho.matrix.reshape(-1)
        return _finish_channel(vec, rho.dims)
    if method == "rk4":
        return _loss_rk4(rho, tau, modes)
    raise ValueError(f"unknown loss method {method!r}")


def _finish_channel(t, dims) -> DensityOperator:
    D = int(np.prod(dims))
    m = np.asarray(t).reshape(D, D)
    m = 0.5 * (m + m.conj().T)
    tr = np.trace(m).real
    if abs(tr - 1.0) > 1e-8:
        raise StateError(f"channel output trace {tr:.12g}")
    return DensityOperator(dims, m / tr)


def _loss_rk4(rho: DensityOperator, tau: float, modes: list[int], target: float = 1e-8) -> DensityOperator:
    dmax = max(rho.dims[m] for m in modes)
    steps = max(1, int(math.ceil(tau * max(dmax - 1, 1) / 0.02)))
    h = tau / steps
    x = rho.matrix.copy()
    for _ in range(steps):
        k1 = loss_generator(x, rho.dims, modes)
        k2 = loss_generator(x + 0.5 * h * k1, rho.dims, modes)
        k3 = loss_generator(x + 0.5 * h * k2, rho.dims, modes)
        k4 = loss_generator(x + h * k3, rho.dims, modes)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    drift = abs(np.trace(x).real - 1.0)
    if drift > target:
        raise StateError(f"RK4 loss integration drifted by {drift:.3g} (target {target:g})")
    return _finish_channel(x, rho.dims)


@dataclass(frozen=True)
class LossTrajectory:
    tau_grid: np.ndarray
    states: tuple[DensityOperator, ...]


def loss_trajectory(state, tau_grid, modes=None) -> LossTrajectory:
    taus = np.asarray(tau_grid, dtype=float)
    if np.any(np.diff(taus) < 0):
        raise ValueError("tau grid must be non-decreasing")
    return LossTrajectory(taus, tuple(apply_loss(state, t, modes) for t in taus))


# ---------------------------------------------------------------------------
# spectral utilities


def partial_trace(state, keep: Iterable[int]) -> DensityOperator:
    keep = sorted(set(int(k) for k in keep))
    dims = state.dims if isinstance(state, FockPureState) else state.dims
    M = len(dims)
    if not keep:
        raise ValueError("keep set is empty")
    if keep[0] < 0 or keep[-1] >= M:
        raise IndexError(f"keep set {keep} out of range for {M} modes")
    kd = tuple(dims[k] for k in keep)
    Dk = int(np.prod(kd))
    rest = [i for i in range(M) if i not in keep]
    if isinstance(state, FockPureState):
        t = np.transpose(state.tensor, keep + rest).reshape(Dk, -1)
        return DensityOperator.from_tensor(t @ t.conj().T, kd)
    t = state.tensor
    Dr = int(np.prod([dims[i] for i in rest])) if rest else 1
    t = np.transpose(t, keep + rest + [M + k for k in keep] + [M + r for r in rest])
    t = t.reshape(Dk, Dr, Dk, Dr)
    return DensityOperator.from_tensor(np.einsum("arbr->ab", t), kd)


def eigenvalues(state) -> np.ndarray:
    if isinstance(state, FockPureState):
        return np.array([1.0])
    return np.linalg.eigvalsh(as_density(state).matrix)


def purity(state) -> float:
    if isinstance(state, FockPureState):
        return 1.0
    m = as_density(state).matrix
    return float(np.vdot(m, m).real)


def von_neumann_entropy(state) -> float:
    """Entropy in nats; eigenvalues below 1e-12 contribute nothing."""
    lam = eigenvalues(state)
    lam = lam[lam > 1e-12]
    return float(max(-np.sum(lam * np.log(lam)), 0.0))


def trace_norm(x: np.ndarray) -> float:
    x = np.asarray(x)
    if np.allclose(x, x.conj().T, atol=1e-13):
        return float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (x + x.conj().T)))))
    return float(np.sum(np.linalg.svd(x, compute_uv=False)))


def _same_dims(a, b):
    if tuple(a.dims) != tuple(b.dims):
        raise ValueError(f"dimension mismatch {a.dims} vs {b.dims}")


def trace_distance(a, b) -> float:
    _same_dims(a, b)
    if isinstance(a, FockPureState) and isinstance(b, FockPureState):
        ov = abs(np.vdot(a.vector, b.vector)) ** 2
        return float(math.sqrt(max(1.0 - ov, 0.0)))
    return 0.5 * trace_norm(as_density(a).matrix - as_density(b).matrix)


def fidelity(a, b) -> float:
    """Uhlmann fidelity (squared convention: |<psi|phi>|^2 for pure states)."""
    _same_dims(a, b)
    if isinstance(a, FockPureState) and isinstance(b, FockPureState):
        return float(abs(np.vdot(a.vector, b.vector)) ** 2)
    if isinstance(a, FockPureState):
        return float(np.real(np.vdot(a.vector, as_density(b).matrix @ a.vector)))
    if isinstance(b, FockPureState):
        return fidelity(b, a)
    w, v = np.linalg.eigh(a.matrix)
    sq = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    inner = sq @ b.matrix @ sq
    ev = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    return float(min(np.sum(np.sqrt(np.clip(ev, 0, None))) ** 2, 1.0))


def number_distribution(state, mode: int = 0) -> np.ndarray:
    """Photon-number probabilities of one mode."""
    if isinstance(state, FockPureState):
        p = np.abs(state.tensor) ** 2
        M = state.mode_count
    else:
        rho = as_density(state)
        p = np.real(np.diagonal(rho.matrix)).reshape(rho.dims)
        M = rho.mode_count
    _mode_dim(state.dims, mode)
    return p.sum(axis=tuple(i for i in range(M) if i != mode))


def mean_photon_number(state, modes: Iterable[int] | None = None) -> float:
    M = len(state.dims)
    modes = range(M) if modes is None else modes
    total = 0.0
    for m in modes:
        p = number_distribution(state, m)
        total += float(np.dot(np.arange(p.size), p))
    return total


# ---------------------------------------------------------------------------
# closed-form amplitudes


def coherent_amplitudes(alpha: complex, dim: int) -> np.ndarray:
    """<n|alpha> for n < dim."""
    alpha = complex(alpha)
    n = np.arange(dim)
    if alpha == 0:
        out = np.zeros(dim, dtype=complex)
        out[0] = 1.0
        return out
    r = abs(alpha)
    phase = alpha / r
    logmag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    return np.exp(logmag) * phase ** n
