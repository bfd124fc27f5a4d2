"""Interference-time ratio theta_sing / theta_sup from the spectral distribution of an observable."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize_scalar

from macroq import fock as F
from macroq.phase_space import quadrature_distribution
from macroq.report import MeasureReport
from macroq.spin import AdditiveObservable, SpinState

ZERO_TOL = 1e-4
SCAN_POINTS = 4000
GRID_POINTS = 4001


def _clusters(values: np.ndarray, weights: np.ndarray) -> list[tuple[np.ndarray, np.ndarray, float]]:
    """Best split of a 1D distribution into at most two contiguous clusters.

    The split point minimizes the pooled within-cluster variance.  Each
    cluster comes back as (values, normalized weights, mass).
    """
    keep = weights > 1e-14
    order = np.argsort(values[keep])
    v, w = values[keep][order], weights[keep][order]
    w = w / w.sum()
    if v.size < 2:
        return [(v, w, 1.0)]
    cw = np.cumsum(w)[:-1]
    cm = np.cumsum(w * v)[:-1]
    cs = np.cumsum(w * v * v)[:-1]
    tot_m, tot_s = np.dot(w, v), np.dot(w, v * v)
    with np.errstate(invalid="ignore", divide="ignore"):
        within = (cs - cm ** 2 / cw) + ((tot_s - cs) - (tot_m - cm) ** 2 / (1 - cw))
        within = np.where((cw > 1e-12) & (cw < 1 - 1e-12), within, np.inf)
    k = int(np.argmin(within)) + 1
    return [(v[:k], w[:k] / cw[k - 1], float(cw[k - 1])), (v[k:], w[k:] / (1 - cw[k - 1]), float(1 - cw[k - 1]))]


def _moments(v: np.ndarray, w: np.ndarray) -> tuple[float, float]:
    mu = float(np.dot(w, v))
    return mu, float(np.dot(w, (v - mu) ** 2))


def _overlap(values: np.ndarray, weights: np.ndarray, thetas) -> np.ndarray:
    """|sum_k w_k exp(i theta a_k)| for each theta."""
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    out = np.empty(thetas.size)
    for i in range(0, thetas.size, 256):
        block = thetas[i:i + 256]
        out[i:i + 256] = np.abs(np.exp(1j * np.outer(block, values)) @ weights)
    return out


def _first_zero(values, weights, grid) -> float | None:
    o = _overlap(values, weights, grid)
    for i in range(1, grid.size - 1):
        if o[i] <= o[i - 1] and o[i] <= o[i + 1]:
            res = minimize_scalar(lambda t: _overlap(values, weights, t)[0],
                                  bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < ZERO_TOL:
                return float(res.x)
    return None


def _half_drop(values, weights, grid) -> float:
    o = _overlap(values, weights, grid)
    idx = np.nonzero(o <= 0.5)[0]
    return float(grid[idx[0]]) if idx.size else math.inf


def bjork_mana_spectrum(values, weights) -> MeasureReport:
    """Ratio theta_sing / theta_sup for a spectral distribution given as weighted points.

    theta_sup is the first local minimum of |<exp(i theta A)>| below 1e-4.
    theta_sing = pi / Delta A, with Delta A the pooled standard deviation of
    the single peaks; the half-drop time of the first peak's envelope is
    kept in the metadata.
    """
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    clusters = _clusters(values, weights)
    moments = [_moments(v, w) for v, w, _ in clusters]
    spread = math.sqrt(sum(c[2] * var for c, (_, var) in zip(clusters, moments)))
    separation = abs(moments[-1][0] - moments[0][0])
    theta_sing = math.pi / spread if spread > 0 else math.inf
    limits = [t for t in (theta_sing, 2 * math.pi / separation if separation > 0 else math.inf)
              if math.isfinite(t)]
    meta = {"delta_A": spread, "separation": separation, "theta_sing": theta_sing}
    if not limits:
        meta["status"] = "no superposition detected"
        return MeasureReport(0.0, "overlap-scan", 0.0, meta)
    grid = np.linspace(0.0, max(limits), SCAN_POINTS + 1)
    meta["theta_half_drop"] = _half_drop(clusters[0][0], clusters[0][1], grid)
    theta_sup = _first_zero(values, weights, grid)
    if theta_sup is None:
        meta["status"] = "no superposition detected"
        return MeasureReport(0.0, "overlap-scan", 0.0, meta)
    meta.update(status="superposition", theta_sup=theta_sup)
    return MeasureReport(float(theta_sing / theta_sup), "overlap-scan", 0.0, meta)


def spectral_distribution(state, obs) -> tuple[np.ndarray, np.ndarray]:
    """Weighted points of the distribution of ``obs`` in a pure ``state``.

    ``obs`` is "x", "p", a quadrature angle, a Hermitian matrix, or an
    AdditiveObservable for spin states.
    """
    if isinstance(state, SpinState):
        if not state.is_pure:
            raise ValueError("the interference-time ratio is defined for pure states only")
        mat = obs.matrix(state.n_qubits) if isinstance(obs, AdditiveObservable) else np.asarray(obs)
        return _eigen_distribution(state.ket, mat)
    if not isinstance(state, F.FockPureState):
        raise ValueError("the interference-time ratio is defined for pure states only")
    if isinstance(obs, str) or np.isscalar(obs):
        angle = {"x": 0.0, "p": math.pi / 2}[obs] if isinstance(obs, str) else float(obs)
        if state.mode_count != 1:
            raise ValueError("quadrature observables need a single-mode state")
        R = 2 * math.sqrt(state.dims[0] - 1) + 10
        grid = np.linspace(-R, R, GRID_POINTS)
        q = quadrature_distribution(state, angle, grid)
        return grid, q.density * np.gradient(grid)
    return _eigen_distribution(state.vector, np.asarray(obs, dtype=complex))


def _eigen_distribution(psi: np.ndarray, mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if mat.shape != (psi.size, psi.size):
        raise ValueError(f"observable of shape {mat.shape} does not match state dimension {psi.size}")
    a, u = np.linalg.eigh(0.5 * (mat + mat.conj().T))
    return a, np.abs(u.conj().T @ psi) ** 2


def bjork_mana(state, obs) -> MeasureReport:
    return bjork_mana_spectrum(*spectral_distribution(state, obs))
