"""Scaling indices p and q for multipartite spin states."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from macroq.measures._optimize import maximize_local
from macroq.report import MeasureReport
from macroq.spin import AdditiveObservable, ProjectorSpec, SpinState
from macroq.states import StateSpec, build

ROUTE_TOL = 1e-8


def index_p_estimate(family: StateSpec, n_range: Iterable[int], size_param: str = "n",
                     seed: int = 0) -> MeasureReport:
    """Fit p in max_A Var(A) = O(N^p) over the sizes in ``n_range``."""
    sizes = sorted(set(int(n) for n in n_range))
    if len(sizes) < 3:
        raise ValueError("the exponent fit needs at least 3 sizes")
    maxima = []
    methods = []
    for n in sizes:
        state = build(family.with_param(size_param, n))
        if not isinstance(state, SpinState) or not state.is_pure:
            raise ValueError("index p needs a family of pure spin states")
        opt = maximize_local(state, "variance", seed=seed)
        maxima.append(opt.value)
        methods.append(opt.method)
    x, y = np.log(sizes), np.log(maxima)
    coef = np.polyfit(x, y, 1)
    resid = y - np.polyval(coef, x)
    err = float(np.sqrt(np.sum(resid ** 2) / (len(sizes) - 2) / np.sum((x - x.mean()) ** 2)))
    return MeasureReport(float(coef[0]), "log-log-fit", err, {
        "sizes": sizes, "max_variance": maxima, "optimizer": methods})


def _as_matrix(obs, n: int) -> np.ndarray:
    if isinstance(obs, AdditiveObservable):
        return obs.matrix(n)
    return np.asarray(obs, dtype=complex)


def index_q_correlator(state: SpinState, obs, eta) -> MeasureReport:
    """<[A,[A,eta]]> evaluated directly and through the eigenbasis of A.

    The eigenbasis form is sum_ij (a_i - a_j)^2 <a_i|eta|a_j><a_j|rho|a_i>.
    """
    n = state.n_qubits
    A = _as_matrix(obs, n)
    P = eta.matrix if isinstance(eta, ProjectorSpec) else ProjectorSpec(eta).matrix
    rho = state.matrix
    if A.shape != rho.shape or P.shape != rho.shape:
        raise ValueError("observable, projector and state dimensions differ")
    comm = A @ (A @ P - P @ A) - (A @ P - P @ A) @ A
    direct = np.trace(rho @ comm)
    a, u = np.linalg.eigh(A)
    Pe = u.conj().T @ P @ u
    Re = u.conj().T @ rho @ u
    spectral = np.sum((a[:, None] - a[None, :]) ** 2 * Pe * Re.T)
    gap = abs(direct - spectral)
    if gap > ROUTE_TOL * max(1.0, abs(direct)):
        raise ArithmeticError(f"index-q routes disagree by {gap:.3g}")
    return MeasureReport(float(direct.real), "double-commutator", float(gap),
                         {"spectral_sum": float(spectral.real), "imag": float(direct.imag)})
