"""Macroscopic-coherence inequality (Delta^2_ave x + P_0 delta) Delta^2 p >= 1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from macroq.phase_space import QuadratureDistribution, quadrature_distribution
from macroq.report import MeasureReport

MASS_TOL = 1e-6
VIOLATION_TOL = 1e-9
GRID_POINTS = 8001
DEFAULT_S_GRID = np.round(np.arange(1.0, 12.0 + 1e-9, 0.05), 10)


@dataclass(frozen=True)
class InequalityVerdict:
    lhs: float
    S: float
    violated: bool
    ave_var_x: float
    P0: float
    delta: float
    var_p: float
    P_plus: float
    P_minus: float
    mu_plus: float
    mu_minus: float
    var_plus: float
    var_minus: float
    bound: float = 1.0


def _region(x: np.ndarray, f: np.ndarray, lo: float, hi: float) -> tuple[float, float, float]:
    """Mass, mean and variance of f restricted to [lo, hi], with interpolated endpoints."""
    inner = (x > lo) & (x < hi)
    xs = x[inner]
    fs = f[inner]
    if math.isfinite(lo) and x[0] <= lo <= x[-1]:
        xs = np.concatenate([[lo], xs])
        fs = np.concatenate([[np.interp(lo, x, f)], fs])
    if math.isfinite(hi) and x[0] <= hi <= x[-1]:
        xs = np.concatenate([xs, [hi]])
        fs = np.concatenate([fs, [np.interp(hi, x, f)]])
    if xs.size < 2:
        return 0.0, 0.0, 0.0
    P = float(np.trapezoid(fs, xs))
    if P <= 0:
        return 0.0, 0.0, 0.0
    mu = float(np.trapezoid(xs * fs, xs) / P)
    return P, mu, float(np.trapezoid((xs - mu) ** 2 * fs, xs) / P)


def cavalcanti_reid(px: QuadratureDistribution, pp: QuadratureDistribution, S: float,
                    include_half_S: bool = True, quadrature_scale: float = 1.0) -> InequalityVerdict:
    """Evaluate the inequality for regions x <= -S/2, |x| < S/2 and x >= S/2.

    ``quadrature_scale`` rescales both quadratures before evaluation; the
    default keeps x = a + a^dag, where the vacuum has unit variance.
    ``include_half_S`` keeps the lone +S/2 term inside delta.
    """
    if S <= 0:
        raise ValueError("S must be positive")
    for d in (px, pp):
        if abs(d.mass() - 1.0) > MASS_TOL:
            raise ValueError(f"quadrature distribution has mass {d.mass():.9f}")
    s = quadrature_scale
    x = px.grid * s
    fx = px.density / s
    Pm, mum, vm = _region(x, fx, -math.inf, -S / 2)
    P0, _, _ = _region(x, fx, -S / 2, S / 2)
    Pp, mup, vp = _region(x, fx, S / 2, math.inf)
    var_p = pp.variance() * s * s
    ave = Pp * vp + Pm * vm
    delta = vp + vm
    if Pp > 0:
        delta += (mup + S / 2) ** 2
    if Pm > 0:
        delta += (mum - S / 2) ** 2
    if include_half_S:
        delta += S / 2
    lhs = (ave + P0 * delta) * var_p
    return InequalityVerdict(lhs, S, lhs < 1.0 - VIOLATION_TOL, ave, P0, delta, var_p,
                             Pp, Pm, mup, mum, vp, vm)


def quadrature_pair(state, mode: int = 0) -> tuple[QuadratureDistribution, QuadratureDistribution]:
    dim = state.dims[mode]
    R = 2 * math.sqrt(dim - 1) + 12
    grid = np.linspace(-R, R, GRID_POINTS)
    return (quadrature_distribution(state, 0.0, grid, mode),
            quadrature_distribution(state, math.pi / 2, grid, mode))


def scan_S_max(state, S_grid=None, include_half_S: bool = True, mode: int = 0) -> MeasureReport:
    """Largest S on the grid at which the inequality is violated (0 if none)."""
    S_grid = DEFAULT_S_GRID if S_grid is None else np.asarray(S_grid, dtype=float)
    px, pp = quadrature_pair(state, mode)
    verdicts = [cavalcanti_reid(px, pp, float(S), include_half_S) for S in S_grid]
    hits = [v.S for v in verdicts if v.violated]
    lhs = [v.lhs for v in verdicts]
    meta = {"violated_S": hits, "min_lhs": float(min(lhs)), "S_grid": [float(S_grid[0]), float(S_grid[-1]), len(S_grid)],
            "convention": "x = a + a^dag, vacuum variance 1", "include_half_S": include_half_S}
    step = float(np.min(np.diff(S_grid))) if len(S_grid) > 1 else 0.0
    return MeasureReport(float(max(hits)) if hits else 0.0, "S-grid-scan", step, meta)
