"""Characteristic and Wigner functions, quadrature marginals and the phase-space measure I.

Quadratures follow x = a + a^dag, p = -i(a - a^dag), so a coherent state
has unit quadrature variance and |alpha> peaks at x = 2 Re(alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import gammaln

from macroq import fock as F
from macroq.fock import DensityOperator, FockPureState
from macroq.report import MeasureReport

INTEGRAL_TOL = 1e-7
SUPPORT_MASS = 1e-16
MAX_NODES = 256
_INNER_BUDGET = 2e7  # floats held for one chunk of inner-mode displacement tables


# ---------------------------------------------------------------------------
# displacement matrix elements


def laguerre_functions(x, dim: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (n, f) with f[..., k] = sqrt(n!/(n+k)!) e^{-x/2} x^{k/2} L_n^{(k)}(x), zero when n + k >= dim.

    These are <n+k|D(r)|n> for real r = sqrt(x).  The three-term recurrence in
    n is run with a per-entry log scale so large arguments neither underflow
    at the start nor overflow later.
    """
    x = np.asarray(x, dtype=float)[..., None]
    k = np.arange(dim)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -0.5 * x + np.where(k > 0, 0.5 * k * np.log(x), 0.0) - 0.5 * gammaln(k + 1)
    s = np.broadcast_to(s, x.shape[:-1] + (dim,)).copy()
    g_prev = np.zeros_like(s)
    g = np.ones_like(s)
    for n in range(dim):
        with np.errstate(divide="ignore"):
            f = np.sign(g) * np.exp(s + np.log(np.abs(g)))
        f[..., dim - n:] = 0.0
        yield n, f
        if n == dim - 1:
            break
        g_next = ((2 * n + 1 + k - x) * g - math.sqrt(n) * np.sqrt(n + k) * g_prev) / (
            math.sqrt(n + 1) * np.sqrt(n + 1 + k))
        g_prev, g = g, g_next
        a = np.abs(g)
        big = a > 1e150
        if big.any():
            fac = np.where(big, a, 1.0)
            g /= fac
            g_prev /= fac
            s += np.log(fac)


def displacement_matrix(beta: complex, dim: int) -> np.ndarray:
    """Exact <m|D(beta)|n> for m, n < dim (infinite-space elements, not a truncated exponential)."""
    beta = complex(beta)
    theta = np.angle(beta)
    D = np.zeros((dim, dim), dtype=complex)
    for n, f in laguerre_functions(abs(beta) ** 2, dim):
        k = np.arange(dim - n)
        ph = np.exp(1j * k * theta)
        D[n + k, n] = ph * f[k]
        D[n, n + k] = (-1.0) ** k * ph.conj() * f[k]
    return D


def _real_displacements(r: np.ndarray, dim: int) -> np.ndarray:
    """<m|D(r)|n> for an array of real r >= 0, shape (len(r), dim, dim)."""
    out = np.zeros((r.size, dim, dim))
    for n, f in laguerre_functions(r ** 2, dim):
        k = np.arange(dim - n)
        out[:, n + k, n] = f[:, k]
        out[:, n, n + k] = f[:, k] * (-1.0) ** k
    return out


# ---------------------------------------------------------------------------
# pointwise functions


def _density_tensor(state) -> tuple[np.ndarray, tuple[int, ...]]:
    rho = F.as_density(state)
    return rho.tensor, rho.dims


def characteristic_function(state, xi) -> complex:
    """chi(xi) = Tr[rho D(xi_1) (x) ... (x) D(xi_M)]."""
    t, dims = _density_tensor(state)
    xi = np.atleast_1d(np.asarray(xi, dtype=complex))
    if xi.size != len(dims):
        raise ValueError(f"need one displacement per mode ({len(dims)}), got {xi.size}")
    M = len(dims)
    for m in range(M):
        D = displacement_matrix(xi[m], dims[m])
        t = np.tensordot(D, t, axes=([1], [m]))
        t = np.moveaxis(t, 0, m)
    size = int(np.prod(dims))
    return complex(np.trace(t.reshape(size, size)))


def _single_mode_matrix(state, mode: int) -> np.ndarray:
    dims = state.dims
    if len(dims) == 1:
        return F.as_density(state).matrix
    return F.partial_trace(state, [mode]).matrix


def wigner(state, xvec, pvec, mode: int = 0) -> np.ndarray:
    """W(x, p) on the grid, shape (len(pvec), len(xvec)), normalized so that the integral over dx dp is 1.

    With x = a + a^dag the vacuum value at the origin is 1/(2 pi).
    """
    rho = _single_mode_matrix(state, mode)
    d = rho.shape[0]
    X, P = np.meshgrid(np.asarray(xvec, float), np.asarray(pvec, float))
    beta2 = X + 1j * P  # 2 beta with beta = (x + i p)/2
    theta = np.angle(beta2)
    k = np.arange(d)
    phases = np.exp(1j * theta[..., None] * k)
    W = np.zeros(X.shape)
    for n, f in laguerre_functions(np.abs(beta2) ** 2, d):
        kk = np.arange(d - n)
        row = rho[n, n + kk]
        w = np.real(row * phases[..., kk])
        w[..., 1:] *= 2.0
        W += (-1.0) ** n * np.sum(f[..., kk] * w, axis=-1)
    return W / (2 * math.pi)


def hermite_functions(n_max: int, x) -> np.ndarray:
    """psi_n(x) = <x|n> for n <= n_max in the x = a + a^dag convention, shape (n_max + 1, len(x))."""
    x = np.asarray(x, dtype=float)
    u = x / math.sqrt(2)
    out = np.zeros((n_max + 1,) + x.shape)
    out[0] = (2 * math.pi) ** -0.25 * np.exp(-x * x / 4)
    if n_max >= 1:
        out[1] = math.sqrt(2) * u * out[0]
    for n in range(1, n_max):
        out[n + 1] = math.sqrt(2 / (n + 1)) * u * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


@dataclass(frozen=True)
class QuadratureDistribution:
    """Sampled density of x_theta = a e^{-i theta} + a^dag e^{i theta}."""

    grid: np.ndarray
    density: np.ndarray
    angle: float
    mode: int = 0

    def mass(self) -> float:
        return float(np.trapezoid(self.density, self.grid))

    def mean(self) -> float:
        return float(np.trapezoid(self.grid * self.density, self.grid) / self.mass())

    def variance(self) -> float:
        mu = self.mean()
        return float(np.trapezoid((self.grid - mu) ** 2 * self.density, self.grid) / self.mass())


def quadrature_amplitudes(angle: float, dim: int, grid) -> np.ndarray:
    """<x_theta|n> = e^{-i n theta} psi_n(x), shape (dim, len(grid))."""
    psi = hermite_functions(dim - 1, grid)
    return psi * np.exp(-1j * angle * np.arange(dim))[:, None]


def quadrature_distribution(state, angle: float, grid, mode: int = 0) -> QuadratureDistribution:
    grid = np.asarray(grid, dtype=float)
    if isinstance(state, FockPureState) and state.mode_count == 1:
        amp = state.vector @ quadrature_amplitudes(angle, state.dims[0], grid)
        dens = np.abs(amp) ** 2
    else:
        rho = _single_mode_matrix(state, mode)
        v = quadrature_amplitudes(angle, rho.shape[0], grid)
        dens = np.real(np.einsum("ix,ij,jx->x", v, rho, v.conj()))
    return QuadratureDistribution(grid, np.clip(dens, 0.0, None), float(angle), mode)


# ---------------------------------------------------------------------------
# measure I


def _crop_to_support(state) -> DensityOperator | FockPureState:
    dims = state.dims
    keep = []
    for m in range(len(dims)):
        p = F.number_distribution(state, m)
        idx = np.nonzero(p > SUPPORT_MASS)[0]
        keep.append(int(idx[-1]) + 1 if idx.size else 1)
    if tuple(keep) == tuple(dims):
        return state
    return state.resized(keep)


def measure_I_algebraic(state, remove_offset: bool = False) -> MeasureReport:
    """I = sum over modes of Tr[a^dag a rho^2] - Tr[a rho a^dag rho]."""
    M = len(state.dims)
    if isinstance(state, FockPureState):
        total = 0.0
        for m in range(M):
            a = F.ladder(state.dims, m)
            total += F.mean_photon_number(state, [m]) - abs(F.expect(state, a)) ** 2
        pur = 1.0
    else:
        rho = F.as_density(state)
        t = rho.tensor
        D = int(np.prod(rho.dims))
        r2 = rho.matrix @ rho.matrix
        total = 0.0
        for m in range(M):
            d = rho.dims[m]
            a = F.annihilation(d)
            n_diag = np.real(np.diagonal(r2)).reshape(rho.dims)
            nn = n_diag.sum(axis=tuple(i for i in range(M) if i != m))
            t_n = float(np.dot(np.arange(d), nn))
            ar = F._apply_to_tensor(F.ModeOperator((m,), a), t, [m])
            arad = F._apply_to_tensor(F.ModeOperator((m,), a.conj()), ar, [m + M])
            cross = np.sum(arad.reshape(D, D) * rho.matrix.T).real
            total += t_n - cross
        pur = F.purity(rho)
    value = total + (M * pur / 2 if remove_offset else 0.0)
    return MeasureReport(float(value), "algebraic", 1e-12 * max(1.0, abs(value)),
                         {"modes": M, "purity": pur, "offset_removed": remove_offset})


def measure_I_finite_difference(state, h: float = 1e-4) -> float:
    """-(1/2) dP/dtau at tau = 0 from a one-sided three-point stencil on the loss channel."""
    p0 = F.purity(state)
    p1 = F.purity(F.apply_loss(state, h))
    p2 = F.purity(F.apply_loss(state, 2 * h))
    return -0.5 * (-3 * p0 + 4 * p1 - p2) / (2 * h)


def _group_by_offset(dim: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Order (n, m) pairs of a dim x dim block by k = m - n; returns order, start offsets and k values."""
    n, m = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    k = (m - n).ravel()
    order = np.argsort(k, kind="stable")
    ks, starts = np.unique(k[order], return_index=True)
    return order, starts, ks


def _one_mode_S(rho: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Angular integral of |chi|^2 divided by 2 pi, for each radius."""
    d = rho.shape[0]
    cp = np.zeros((r.size, d), dtype=complex)
    cm = np.zeros((r.size, d), dtype=complex)
    for n, f in laguerre_functions(r ** 2, d):
        kk = np.arange(d - n)
        cp[:, kk] += rho[n, n + kk] * f[:, kk]
        cm[:, kk] += rho[n + kk, n] * f[:, kk]
    sign = (-1.0) ** np.arange(d)
    cm = cm * sign
    return np.sum(np.abs(cp) ** 2, axis=1) + np.sum(np.abs(cm[:, 1:]) ** 2, axis=1)


def _two_mode_S(t: np.ndarray, dims: tuple[int, int], r_out: np.ndarray, r_in: np.ndarray, outer: int) -> np.ndarray:
    """Angular integral of |chi|^2 divided by (2 pi)^2 on the (outer, inner) radial grid."""
    inner = 1 - outer
    do, di = dims[outer], dims[inner]
    # reorder to [n_o, m_o, n_i, m_i]
    perm = [outer, outer + 2, inner, inner + 2]
    rho2 = np.transpose(t, perm).reshape(do * do, di * di)
    order_o, starts_o, _ = _group_by_offset(do)
    order_i, starts_i, _ = _group_by_offset(di)
    ends_i = np.append(starts_i[1:], di * di)
    rho2 = rho2[order_o][:, order_i]
    D_out = _real_displacements(r_out, do)  # [a, m, n]
    # weights on (n_o, m_o) pairs: D[m_o, n_o]
    w_out = np.transpose(D_out, (0, 2, 1)).reshape(r_out.size, -1)[:, order_o]
    S = np.zeros((r_out.size, r_in.size))
    chunk = max(1, int(_INNER_BUDGET // (di * di)))
    for c0 in range(0, r_in.size, chunk):
        rc = r_in[c0:c0 + chunk]
        D_in = _real_displacements(rc, di)
        w_in = np.transpose(D_in, (0, 2, 1)).reshape(rc.size, -1)[:, order_i]
        for a in range(r_out.size):
            X = np.add.reduceat(rho2 * w_out[a][:, None], starts_o, axis=0)  # (K_o, di^2)
            acc = np.zeros(rc.size)
            for s, e in zip(starts_i, ends_i):
                c = X[:, s:e] @ w_in[:, s:e].T  # (K_o, chunk)
                acc += np.sum(np.abs(c) ** 2, axis=0)
            S[a, c0:c0 + rc.size] = acc
    return S


def _radius(dim: int) -> float:
    return 2.0 * math.sqrt(max(dim - 1, 0)) + 7.0


def _gl(n: int, R: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    return 0.5 * R * (x + 1), 0.5 * R * w


def measure_I_integral(state, tol: float = INTEGRAL_TOL, remove_offset: bool = False,
                       start_nodes: int = 32, max_nodes: int = MAX_NODES) -> MeasureReport:
    """I = (1 / (2 pi^M)) integral of sum_m (|xi_m|^2 - 1) |chi(xi)|^2 over C^M.

    Angles are integrated exactly through the Fourier structure of D(r e^{i theta});
    radii use Gauss-Legendre on [0, 2 sqrt(d - 1) + 7] per mode, doubling the
    node count until successive estimates differ by less than ``tol``.  The
    reported error estimate is that final difference.
    """
    if len(state.dims) > 2:
        raise ValueError("the integral route handles one or two modes; use measure_I_algebraic")
    cropped = _crop_to_support(state)
    t, dims = _density_tensor(cropped)
    M = len(dims)
    radii = [_radius(d) for d in dims]
    shift = 0.0 if remove_offset else 1.0
    prev = None
    n = start_nodes
    history = []
    while True:
        if M == 1:
            r, w = _gl(n, radii[0])
            S = _one_mode_S(t, r)
            value = float(np.sum(w * r * (r * r - shift) * S))
        else:
            outer = 0 if dims[0] <= dims[1] else 1
            ro, wo = _gl(n, radii[outer])
            ri, wi = _gl(n, radii[1 - outer])
            S = _two_mode_S(t, dims, ro, ri, outer)
            weight = (wo * ro)[:, None] * (wi * ri)[None, :]
            value = float(2.0 * np.sum(weight * (ro[:, None] ** 2 + ri[None, :] ** 2 - 2 * shift) * S))
        history.append((n, value))
        if prev is not None:
            delta = abs(value - prev)
            if delta < tol or 2 * n > max_nodes:
                return MeasureReport(value, "integral", delta, {
                    "modes": M, "nodes": n, "cropped_dims": dims, "radii": radii,
                    "converged": delta < tol, "history": history, "offset_removed": remove_offset})
        prev = value
        n *= 2


def displacement_invariance_gap(state, shifts: Sequence[complex]) -> float:
    """Largest change of the algebraic I under local displacements (one shift per mode)."""
    base = measure_I_algebraic(state).value
    st = state
    for m, s in enumerate(shifts):
        if s:
            st = F.evolve(st, F.displace(st.dims, m, s))
    return abs(measure_I_algebraic(st).value - base)
