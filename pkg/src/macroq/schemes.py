"""Conditional generation of cat states: photon subtraction, homodyne conditioning, amplification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.ndimage import maximum_filter
from scipy.optimize import minimize, minimize_scalar
from scipy.special import gammaln

from macroq import fock as F
from macroq.fock import DensityOperator, FockPureState
from macroq.phase_space import hermite_functions, wigner
from macroq.states import coherent, scs, squeezed_vacuum

MIN_WINDOW_PROBABILITY = 1e-12
WINDOW_NODES = 200
FIT_DIM = 80


@dataclass(frozen=True)
class SchemeResult:
    state: FockPureState | DensityOperator
    success_probability: float
    metadata: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# photon subtraction


def scheme_photon_subtraction(r: float, n_sub: int = 1) -> SchemeResult:
    """a^n S(r)|0>, normalized, in the ideal weak-tap limit.

    The heralding weight is ||a^n S(r)|0>||^2 / n!.
    """
    if n_sub < 1:
        raise ValueError("n_sub must be at least 1")
    base = squeezed_vacuum(r)
    d = base.dims[0] + n_sub
    v = base.resized((d,)).vector
    a = F.annihilation(d)
    for _ in range(n_sub):
        v = a @ v
    norm2 = float(np.vdot(v, v).real)
    if norm2 < 1e-300:
        raise ValueError("subtraction from the vacuum has zero weight")
    out = FockPureState.from_vector(v, d)
    weight = norm2 / math.exp(gammaln(n_sub + 1))
    return SchemeResult(out, min(weight, 1.0), {"r": r, "n_sub": n_sub, "weight_convention": "norm^2 / n!"})


# ---------------------------------------------------------------------------
# homodyne conditioning


def window_projector(dim: int, x0: float, nodes: int = WINDOW_NODES) -> np.ndarray:
    """<m| Pi |n> = integral over |x| < x0 of psi_m(x) psi_n(x), by Gauss-Legendre."""
    reach = 2 * math.sqrt(dim) + 12
    half = min(x0, reach)
    t, w = leggauss(nodes)
    if half >= reach:
        # split so the nodes resolve the oscillatory bulk as well as the tails
        edges = np.linspace(-half, half, 9)
    else:
        edges = np.array([-half, half])
    pts, wts = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        pts.append(0.5 * (hi - lo) * t + 0.5 * (hi + lo))
        wts.append(0.5 * (hi - lo) * w)
    x, wx = np.concatenate(pts), np.concatenate(wts)
    psi = hermite_functions(dim - 1, x)
    return (psi * wx) @ psi.T


def scheme_homodyne_conditioning(n: int, x0: float, aux_squeeze: float = 0.0) -> SchemeResult:
    """Split |n> with S(s)|0> on a 50:50 beam splitter and keep runs with |x| < x0 on the second arm.

    The conditional state is returned as a DensityOperator; its purity is in
    the metadata.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if x0 <= 0:
        raise ValueError("x0 must be positive")
    aux = squeezed_vacuum(aux_squeeze) if aux_squeeze else FockPureState(np.array([1.0 + 0j]))
    d = n + aux.dims[0]
    dims = (d, d)
    t = np.zeros(dims, dtype=complex)
    t[n] = aux.resized((d,)).vector
    st = F.evolve(FockPureState(t), F.beam_splitter(dims, (0, 1), 0.5))
    psi = st.tensor
    Pi = window_projector(d, x0)
    rho = psi @ Pi.T @ psi.conj().T  # rho_ab = sum_jk psi_aj Pi_kj psi*_bk
    prob = float(np.trace(rho).real)
    if prob < MIN_WINDOW_PROBABILITY:
        raise ValueError(f"window probability {prob:.3g} is below {MIN_WINDOW_PROBABILITY}")
    out = DensityOperator(d, rho / prob)
    return SchemeResult(out, min(prob, 1.0), {"n": n, "x0": x0, "aux_squeeze": aux_squeeze,
                                              "purity": F.purity(out)})


# ---------------------------------------------------------------------------
# amplification


def scheme_amplification(alpha: float, truncation: int | None = None) -> SchemeResult:
    """Two even cats of amplitude alpha and an auxiliary |sqrt(2) alpha> with on/off detectors.

    Cats meet at BS1; the second output meets the auxiliary at BS2 and both
    BS2 outputs must click.  Ideal detectors herald an even cat of amplitude
    sqrt(2) alpha in the first BS1 output.
    """
    alpha = float(alpha)
    if alpha == 0:
        return SchemeResult(FockPureState(np.array([1.0 + 0j])), 1.0,
                            {"alpha": 0.0, "note": "vacuum inputs pass through unconditioned"})
    d = truncation or coherent(2 * alpha).dims[0]
    cat = scs(alpha, 0.0, truncation=d).vector
    aux = F.coherent_amplitudes(math.sqrt(2) * alpha, d)
    t = np.einsum("a,b,c->abc", cat, cat, aux)
    st = FockPureState.from_vector(t, (d, d, d), normalize=False)
    st = F.evolve(st, F.beam_splitter(st.dims, (0, 1), 0.5))
    st = F.evolve(st, F.beam_splitter(st.dims, (1, 2), 0.5))
    kept = st.tensor[:, 1:, 1:]
    rho = np.einsum("aij,bij->ab", kept, kept.conj())
    prob = float(np.trace(rho).real)
    out = DensityOperator(d, rho / prob)
    w, v = np.linalg.eigh(out.matrix)
    meta = {"alpha": alpha, "purity": F.purity(out)}
    if w[-1] > 1 - 1e-9:
        out = FockPureState.from_vector(v[:, -1], d)
    return SchemeResult(out, prob, meta)


# ---------------------------------------------------------------------------
# fitting helpers


def _cat_amplitudes(alpha: complex, phi: float, dim: int) -> np.ndarray:
    """Normalized cat amplitudes with the analytic normalization (no truncation renormalization)."""
    n = np.arange(dim)
    c = F.coherent_amplitudes(alpha, dim) * (1 + np.exp(1j * phi) * (-1.0) ** n)
    norm2 = 2 + 2 * math.cos(phi) * math.exp(-2 * abs(alpha) ** 2)
    return c / math.sqrt(norm2)


def _unsqueezed(state, r: float, dim: int) -> np.ndarray:
    """S(r)^dag applied to the state, as a ket or a density matrix in dimension ``dim``."""
    S = F.squeeze(dim, 0, r, check=False).matrix
    if isinstance(state, FockPureState):
        return S.conj().T @ state.resized((dim,)).vector
    m = state.resized((dim,)).matrix
    return S.conj().T @ m @ S


def _overlap(u: np.ndarray, c: np.ndarray) -> float:
    if u.ndim == 1:
        return float(abs(np.vdot(c, u)) ** 2)
    return float(np.real(np.vdot(c, u @ c)))


def squeezed_cat_fidelity(state, alpha: complex, r: float, phi: float = 0.0, dim: int = FIT_DIM) -> float:
    """Fidelity of a single-mode state to S(r) N(|alpha> + e^{i phi}|-alpha>)."""
    dim = max(dim, state.dims[0])
    return _overlap(_unsqueezed(state, r, dim), _cat_amplitudes(alpha, phi, dim))


def best_squeezing(state, alpha: complex, phi: float = 0.0, r_max: float = 1.5) -> tuple[float, float]:
    """(fidelity, r) maximizing the fidelity to a squeezed cat of fixed amplitude."""
    grid = np.linspace(-r_max, r_max, 61)
    vals = [squeezed_cat_fidelity(state, alpha, r, phi) for r in grid]
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = minimize_scalar(lambda r: -squeezed_cat_fidelity(state, alpha, r, phi), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-8})
    return -float(res.fun), float(res.x)


def fit_squeezed_cat(state, phi: float = 0.0, direction: float = 0.0,
                     amp_max: float = 3.0, r_max: float = 1.2) -> tuple[float, float, float]:
    """(fidelity, |alpha|, r) of the best squeezed cat with alpha along e^{i direction}."""
    dim = max(FIT_DIM, state.dims[0])
    amps = np.arange(0.1, amp_max + 1e-9, 0.05)
    rs = np.linspace(-r_max, r_max, 49)
    phase = np.exp(1j * direction)
    cats = np.array([_cat_amplitudes(a * phase, phi, dim) for a in amps])
    best = (-1.0, 0.0, 0.0)
    for r in rs:
        u = _unsqueezed(state, r, dim)
        f = np.abs(cats.conj() @ u) ** 2 if u.ndim == 1 else np.real(np.einsum("ai,ij,aj->a", cats.conj(), u, cats))
        i = int(np.argmax(f))
        if f[i] > best[0]:
            best = (float(f[i]), float(amps[i]), float(r))

    def loss(p):
        return -squeezed_cat_fidelity(state, p[0] * phase, p[1], phi, dim)

    res = minimize(loss, [best[1], best[2]], method="Nelder-Mead", options={"xatol": 1e-7, "fatol": 1e-10})
    if -res.fun < best[0]:
        return best
    return -float(res.fun), float(abs(res.x[0])), float(res.x[1])


def wigner_peaks(state, extent: float = 6.0, points: int = 241, rel_height: float = 0.05,
                 mode: int = 0, refine: bool = True):
    """Local maxima (x, p, W) of the Wigner function above ``rel_height`` of the global maximum.

    Grid maxima are polished off-grid with Nelder-Mead when ``refine`` is set.
    """
    grid = np.linspace(-extent, extent, points)
    W = wigner(state, grid, grid, mode)
    mask = (W == maximum_filter(W, size=5, mode="nearest")) & (W > rel_height * W.max())
    peaks = []
    for i, j in zip(*np.nonzero(mask)):
        x, p, w = float(grid[j]), float(grid[i]), float(W[i, j])
        if refine:
            res = minimize(lambda q: -wigner(state, [q[0]], [q[1]], mode)[0, 0], [x, p],
                           method="Nelder-Mead", options={"xatol": 1e-8, "fatol": 1e-14})
            x, p, w = float(res.x[0]), float(res.x[1]), -float(res.fun)
        peaks.append((x, p, w))
    return sorted(peaks, key=lambda q: -q[2])


def lobe_amplitude(state, extent: float = 8.0, points: int = 161) -> float:
    """Half the distance of the outermost Wigner peak from the origin.

    With x = a + a^dag a coherent lobe at alpha peaks at distance 2|alpha|;
    interference with the opposite lobe pulls small-cat peaks inward.
    """
    peaks = wigner_peaks(state, extent, points)
    return 0.5 * max(math.hypot(x, p) for x, p, _ in peaks)
