"""Quantum Fisher information and the effective size built on it."""

from __future__ import annotations

import numpy as np

from macroq.measures._optimize import _groups, maximize_local
from macroq.report import MeasureReport
from macroq.spin import AdditiveObservable, SpinState

PAIR_CUTOFF = 1e-12


def qfi(state: SpinState, obs) -> float:
    """F = 2 sum_ij (pi_i - pi_j)^2 / (pi_i + pi_j) |<i|A|j>|^2."""
    A = obs.matrix(state.n_qubits) if isinstance(obs, AdditiveObservable) else np.asarray(obs, dtype=complex)
    w, u = np.linalg.eigh(state.matrix)
    w = np.clip(w, 0.0, None)
    s = w[:, None] + w[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.where(s > PAIR_CUTOFF, 2.0 * (w[:, None] - w[None, :]) ** 2 / s, 0.0)
    At = u.conj().T @ A @ u
    return float(np.sum(K * np.abs(At) ** 2))


def fisher_neff(state: SpinState, grouping=None, seed: int = 0) -> MeasureReport:
    """max_A F(rho, A) / (4 n) over local terms with spectra in [-1, 1], n the number of groups."""
    groups = _groups(state.n_qubits, grouping)
    opt = maximize_local(state, "qfi", grouping=grouping, seed=seed)
    return MeasureReport(opt.value / (4 * len(groups)), "max-qfi", 0.0, {
        "max_qfi": opt.value, "groups": len(groups), "optimizer": opt.method,
        "restart_values": opt.restarts, "normalization": "local spectrum in [-1, 1]"})
