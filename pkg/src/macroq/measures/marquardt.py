"""Average effective photon number of the two-mode pair |N,0> + B."""

from __future__ import annotations

import math

import numpy as np

from macroq.report import MeasureReport
from macroq.states import marquardt_pair


def marquardt_size(n: int, theta: float) -> MeasureReport:
    """sum_d |beta_d|^2 d, with beta_d the amplitude of |B> on |N-d, d>."""
    _, b = marquardt_pair(n, theta)
    t = b.tensor
    beta = np.array([t[n - d, d] for d in range(n + 1)])
    value = float(np.sum(np.abs(beta) ** 2 * np.arange(n + 1)))
    expected = n * math.sin(theta) ** 2
    return MeasureReport(value, "branch-amplitudes", abs(value - expected),
                         {"beta": [complex(x) for x in beta], "closed_form": expected})
