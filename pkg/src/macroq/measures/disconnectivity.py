"""Entropy-ratio disconnectivity of multi-party states."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from macroq import fock as F
from macroq.measures._optimize import is_permutation_symmetric
from macroq.report import MeasureReport
from macroq.spin import SpinState, entropy, reduced_state

MAX_PARTIES = 10
ZERO = 1e-10
TIE = 1e-9


@dataclass(frozen=True)
class DisconnectivityProfile:
    delta_n: tuple[float, ...]
    D: int
    entropies: tuple[float, ...]
    policy: str

    def report(self) -> MeasureReport:
        return MeasureReport(float(self.D), "entropy-ratio", 0.0,
                             {"delta_n": list(self.delta_n), "entropies": list(self.entropies),
                              "subset_policy": self.policy})


def _fock_symmetric(state) -> bool:
    dims = state.dims
    if len(set(dims)) != 1:
        return False
    M = len(dims)
    if M < 2:
        return True
    t = state.tensor
    for p in ([1, 0] + list(range(2, M)), list(range(1, M)) + [0]):
        q = p if isinstance(state, F.FockPureState) else p + [M + i for i in p]
        if np.max(np.abs(np.transpose(t, q) - t)) > 1e-10:
            return False
    return True


def disconnectivity(state) -> DisconnectivityProfile:
    """delta_n = S_n / min_m (S_m + S_{n-m}) and D = the largest n attaining min delta_n.

    The n parties are the first n when the state is permutation symmetric;
    otherwise the n-subset with the largest entropy is used and the
    bipartition minimum runs over splits of that same subset.
    """
    if isinstance(state, SpinState):
        N = state.n_qubits
        symmetric = is_permutation_symmetric(state)

        def ent(sub):
            return entropy(reduced_state(state, sub)) if len(sub) < N else entropy(state)
    else:
        N = len(state.dims)
        symmetric = _fock_symmetric(state)

        def ent(sub):
            return F.von_neumann_entropy(F.partial_trace(state, sub)) if len(sub) < N \
                else F.von_neumann_entropy(state)
    if N > MAX_PARTIES:
        raise ValueError(f"{N} parties exceeds the subset-enumeration bound {MAX_PARTIES}")

    S = lru_cache(maxsize=None)(lambda sub: ent(list(sub)))

    deltas = [0.0]
    chosen_S = []
    for n in range(1, N + 1):
        if symmetric:
            sub = tuple(range(n))
        else:
            sub = max(combinations(range(N), n), key=lambda c: (S(c), [-i for i in c]))
        Sn = S(sub)
        chosen_S.append(Sn)
        if n == 1:
            continue
        denom = min(S(a) + S(tuple(i for i in sub if i not in a))
                    for m in range(1, n // 2 + 1) for a in combinations(sub, m))
        if Sn < ZERO and denom < ZERO:
            deltas.append(1.0)
        elif denom < ZERO:
            deltas.append(np.inf)
        else:
            deltas.append(Sn / denom)
    best = min(deltas)
    D = max(i + 1 for i, d in enumerate(deltas) if d <= best + TIE)
    policy = "first-n (symmetric)" if symmetric else "max-entropy subset"
    return DisconnectivityProfile(tuple(deltas), D, tuple(chosen_S), policy)
