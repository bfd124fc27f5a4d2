"""Maximization of convex quadratic functionals over local observables.

Both the variance and the quantum Fisher information are positive
semidefinite quadratic forms in the observable A = sum_k A_k, so their
maximum over local terms with spectrum in [-1, 1] sits at an extreme point.
Frank-Wolfe with unit step replaces every A_k by the matrix sign of its
partial gradient; convexity makes each sweep non-decreasing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from macroq.spin import PAULI, SpinState, apply_sites

IMPROVEMENT_TOL = 1e-9
MAX_SWEEPS = 500
RESTARTS = 8


class OptimizationError(RuntimeError):
    """The observable search failed to converge."""


@dataclass
class OptimumReport:
    value: float
    locals: list[np.ndarray]
    method: str
    restarts: list[float] = field(default_factory=list)
    sweeps: int = 0


def matrix_sign(h: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    s = np.where(np.abs(w) > tol, np.sign(w), 0.0)
    return (v * s) @ v.conj().T


def _groups(n: int, grouping) -> list[tuple[int, ...]]:
    if grouping is None:
        return [(i,) for i in range(n)]
    return [tuple(int(s) for s in g) for g in grouping]


def _partial(op_t: np.ndarray, group: tuple[int, ...], n: int) -> np.ndarray:
    """Partial trace of a (2,)*2n operator tensor down to ``group``."""
    rest = [i for i in range(n) if i not in group]
    g = list(group)
    t = np.transpose(op_t, g + rest + [n + i for i in g] + [n + i for i in rest])
    dg = 2 ** len(g)
    dr = 2 ** len(rest)
    return np.einsum("arbr->ab", t.reshape(dg, dr, dg, dr))


def _cross(psi: np.ndarray, phi: np.ndarray, group: tuple[int, ...], n: int) -> np.ndarray:
    """Tr over the complement of ``group`` of |psi><phi|."""
    rest = [i for i in range(n) if i not in group]
    g = list(group)
    dg = 2 ** len(g)
    a = np.transpose(psi, g + rest).reshape(dg, -1)
    b = np.transpose(phi, g + rest).reshape(dg, -1)
    return a @ b.conj().T


class _Objective:
    """Variance or QFI of A = sum_k A_k on a fixed state."""

    def __init__(self, state: SpinState, kind: str, groups):
        self.n = state.n_qubits
        self.groups = groups
        self.kind = kind
        self.pure = state.is_pure
        if self.pure:
            self.psi = state.ket.reshape((2,) * self.n)
        else:
            self.rho = state.matrix
            if kind == "qfi":
                w, u = np.linalg.eigh(self.rho)
                w = np.clip(w, 0.0, None)
                s = w[:, None] + w[None, :]
                with np.errstate(divide="ignore", invalid="ignore"):
                    K = np.where(s > 1e-12, 2.0 * (w[:, None] - w[None, :]) ** 2 / s, 0.0)
                self.u, self.K = u, K

    def _apply(self, locals_, t, offset=0):
        out = np.zeros_like(t)
        for m, g in zip(locals_, self.groups):
            out = out + apply_sites(m, [offset + s for s in g], t)
        return out

    def _dense(self, locals_):
        d = 2 ** self.n
        eye = np.eye(d, dtype=complex).reshape((2,) * self.n + (d,))
        return self._apply(locals_, eye).reshape(d, d)

    def evaluate(self, locals_) -> tuple[float, list[np.ndarray]]:
        n = self.n
        scale = 4.0 if self.kind == "qfi" else 1.0
        if self.pure:
            phi = self._apply(locals_, self.psi)
            mean = float(np.vdot(self.psi, phi).real)
            value = float(np.vdot(phi, phi).real) - mean ** 2
            grads = []
            for g in self.groups:
                c = _cross(self.psi, phi, g, n)
                rg = _cross(self.psi, self.psi, g, n)
                grads.append(scale * (c + c.conj().T - 2 * mean * rg))
            return scale * value, grads
        A = self._dense(locals_)
        if self.kind == "variance":
            mean = float(np.trace(self.rho @ A).real)
            value = float(np.trace(self.rho @ A @ A).real) - mean ** 2
            G = self.rho @ A + A @ self.rho - 2 * mean * self.rho
        else:
            At = self.u.conj().T @ A @ self.u
            value = float(np.sum(self.K * np.abs(At) ** 2))
            G = self.u @ (2 * self.K * At) @ self.u.conj().T
        Gt = G.reshape((2,) * (2 * n))
        return value, [_partial(Gt, g, n) for g in self.groups]


def _frank_wolfe(obj: _Objective, start: list[np.ndarray]) -> tuple[float, list[np.ndarray], int]:
    locals_ = [matrix_sign(a) for a in start]
    value, grads = obj.evaluate(locals_)
    for sweep in range(1, MAX_SWEEPS + 1):
        cand = [matrix_sign(g) for g in grads]
        new_value, new_grads = obj.evaluate(cand)
        if new_value <= value + IMPROVEMENT_TOL:
            return value, locals_, sweep
        locals_, value, grads = cand, new_value, new_grads
    raise OptimizationError(f"no convergence after {MAX_SWEEPS} sweeps")


def is_permutation_symmetric(state: SpinState, tol: float = 1e-10) -> bool:
    """Invariance under the (0 1) transposition and the cyclic shift, which generate S_N."""
    n = state.n_qubits
    if n < 2:
        return True
    perms = [[1, 0] + list(range(2, n)), list(range(1, n)) + [0]]
    for p in perms:
        if state.is_pure:
            t = state.ket.reshape((2,) * n)
            if np.max(np.abs(np.transpose(t, p) - t)) > tol:
                return False
        else:
            t = state.matrix.reshape((2,) * (2 * n))
            q = p + [n + i for i in p]
            if np.max(np.abs(np.transpose(t, q) - t)) > tol:
                return False
    return True


def _collective_start(obj: _Objective) -> list[np.ndarray]:
    """Best shared Bloch direction, the top eigenvector of the 3x3 collective form."""
    paulis = [PAULI[a] for a in "xyz"]
    Q = np.zeros((3, 3))
    for a in range(3):
        Q[a, a] = obj.evaluate([paulis[a]] * obj.n)[0]
    for a in range(3):
        for b in range(a + 1, 3):
            mix = obj.evaluate([(paulis[a] + paulis[b]) / np.sqrt(2)] * obj.n)[0]
            Q[a, b] = Q[b, a] = mix - 0.5 * (Q[a, a] + Q[b, b])
    nvec = np.linalg.eigh(Q)[1][:, -1]
    return [sum(nvec[i] * paulis[i] for i in range(3))] * obj.n


def maximize_local(state: SpinState, kind: str = "variance", grouping=None, seed: int = 0,
                   restarts: int = RESTARTS) -> OptimumReport:
    """Maximize Var(A) or F(rho, A) over A = sum of local terms with spectrum in [-1, 1]."""
    if kind not in ("variance", "qfi"):
        raise ValueError(f"unknown objective {kind!r}")
    groups = _groups(state.n_qubits, grouping)
    obj = _Objective(state, kind, groups)
    if grouping is None and is_permutation_symmetric(state):
        start = _collective_start(obj)
        value, locals_, sweeps = _frank_wolfe(obj, start)
        return OptimumReport(value, locals_, "collective", [value], sweeps)
    rng = np.random.default_rng(seed)
    best = None
    values = []
    total = 0
    for _ in range(restarts):
        start = []
        for g in groups:
            d = 2 ** len(g)
            h = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            start.append(h + h.conj().T)
        value, locals_, sweeps = _frank_wolfe(obj, start)
        values.append(value)
        total += sweeps
        if best is None or value > best[0]:
            best = (value, locals_)
    return OptimumReport(best[0], best[1], "frank-wolfe", values, total)
