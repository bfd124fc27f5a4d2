"""Number of particles needed to tell two branches apart."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from macroq.fock import trace_norm
from macroq.measures._optimize import is_permutation_symmetric
from macroq.report import MeasureReport
from macroq.spin import SpinState, reduced_state

MAX_QUBITS = 10


def success_probability(branch_a: SpinState, branch_b: SpinState, sites) -> float:
    """Helstrom probability 1/2 + ||rho_A - rho_B||_1 / 4 on the given sites."""
    n = branch_a.n_qubits
    if len(sites) == n:
        ra, rb = branch_a.matrix, branch_b.matrix
    else:
        ra, rb = reduced_state(branch_a, sites).matrix, reduced_state(branch_b, sites).matrix
    return 0.5 + 0.25 * trace_norm(ra - rb)


def korsbakken_size(branch_a: SpinState, branch_b: SpinState, delta: float) -> MeasureReport:
    """C_delta = N / n_min, n_min the smallest block with success probability >= 1 - delta.

    Symmetric branch pairs use the first n sites.  Otherwise every n-subset
    must succeed, so P(n) is the minimum over subsets.
    """
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    n = branch_a.n_qubits
    if branch_b.n_qubits != n:
        raise ValueError("branches have different sizes")
    symmetric = is_permutation_symmetric(branch_a) and is_permutation_symmetric(branch_b)
    if not symmetric and n > MAX_QUBITS:
        raise ValueError(f"subset enumeration is limited to N <= {MAX_QUBITS}")
    probs = []
    n_min = None
    for k in range(1, n + 1):
        if symmetric:
            p = success_probability(branch_a, branch_b, list(range(k)))
        else:
            p = min(success_probability(branch_a, branch_b, list(c)) for c in combinations(range(n), k))
        probs.append(p)
        if p >= 1 - delta - 1e-12:
            n_min = k
            break
    meta = {"P_n": probs, "subset_policy": "first-n" if symmetric else "worst-case subset",
            "delta": delta}
    if n_min is None:
        meta["status"] = "undefined: no block reaches 1 - delta"
        return MeasureReport(float("nan"), "helstrom-blocks", 0.0, meta)
    meta["n_min"] = n_min
    return MeasureReport(n / n_min, "helstrom-blocks", 0.0, meta)


def ghz_branches(n: int) -> tuple[SpinState, SpinState]:
    zero = np.zeros(2 ** n)
    zero[0] = 1
    one = np.zeros(2 ** n)
    one[-1] = 1
    return SpinState(zero), SpinState(one)
