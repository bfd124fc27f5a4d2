"""Effective size of generalized GHZ states from their dephasing rate."""

from __future__ import annotations

import math

import numpy as np

from macroq.report import MeasureReport
from macroq.spin import SpinState, branch_coherence
from macroq.states import generalized_ghz_branches

SMALL_EPSILON = 0.3
FIT_POINTS = 20
FIT_WINDOW = 0.02  # in units of 1/gamma
MAX_SIMULATED = 10
RESIDUAL_LIMIT = 0.05


class FitError(RuntimeError):
    """The log-linear decay fit is not trustworthy."""


def coherence_decay(n: int, epsilon: float, gamma: float, times) -> np.ndarray:
    """Trace norm of the dephased cross term (1/K) E(|0^N><eps^N|), evaluated densely."""
    za, ea, K = generalized_ghz_branches(n, epsilon)
    a = SpinState.product(za)
    b = SpinState.product(ea)
    return np.array([branch_coherence(a, b, 0.5 * (1 + math.exp(-gamma * t)), 1.0 / K) for t in times])


def dur_effective_size(n: int, epsilon: float, gamma: float = 1.0, mode: str = "analytic",
                       window: float | None = None, points: int = FIT_POINTS) -> MeasureReport:
    """N_eff such that the cross-term norm decays as exp(-gamma N_eff t).

    ``analytic`` returns N eps^2 for eps <= 0.3 and the exact initial rate
    N sin^2 eps otherwise.  ``simulated`` dephases every qubit, fits the log of
    the cross-term trace norm over t in [0, window] and divides the slope by gamma.
    """
    if not 0 < epsilon <= math.pi / 2 + 1e-12:
        raise ValueError("epsilon must lie in (0, pi/2]")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    exact_rate = n * math.sin(epsilon) ** 2
    if mode == "analytic":
        value = n * epsilon ** 2 if epsilon <= SMALL_EPSILON else exact_rate
        return MeasureReport(value, "analytic", abs(value - exact_rate),
                             {"initial_rate": exact_rate, "small_epsilon_form": n * epsilon ** 2})
    if mode != "simulated":
        raise ValueError(f"unknown mode {mode!r}")
    if n > MAX_SIMULATED:
        raise ValueError(f"simulated mode is limited to N <= {MAX_SIMULATED}")
    t_max = (FIT_WINDOW if window is None else window) / gamma
    times = np.linspace(0.0, t_max, points)
    norms = coherence_decay(n, epsilon, gamma, times)
    y = np.log(norms)
    coef, cov = np.polyfit(times, y, 1, cov=True)
    slope = coef[0]
    resid = y - np.polyval(coef, times)
    span = abs(slope) * t_max
    rel_resid = float(np.sqrt(np.mean(resid ** 2)) / span) if span > 0 else np.inf
    if rel_resid > RESIDUAL_LIMIT:
        raise FitError(f"log-linear fit residual {rel_resid:.3g} exceeds {RESIDUAL_LIMIT}")
    value = -slope / gamma
    return MeasureReport(float(value), "dephasing-fit", float(math.sqrt(cov[0, 0]) / gamma), {
        "window": [0.0, t_max], "points": points, "relative_residual": rel_resid,
        "initial_rate": exact_rate})
