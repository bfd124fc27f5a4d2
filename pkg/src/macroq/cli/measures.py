"""Measure tags available to manifests, each a function (spec, state, params, seed) -> MeasureReport."""

from __future__ import annotations

import math

import numpy as np

from macroq import fock as F
from macroq import measures as M
from macroq import states as S
from macroq.fock import DensityOperator, FockPureState
from macroq.phase_space import measure_I_algebraic, measure_I_integral
from macroq.report import MeasureReport
from macroq.spin import AdditiveObservable, SpinState, entropy


def _params(spec):
    return {k: S.coerce_param(spec.kind, k, v) for k, v in spec.params.items()}


def spin_branches(spec, state) -> tuple[SpinState, SpinState]:
    p = _params(spec)
    if spec.kind == "ghz":
        return M.ghz_branches(p["n"])
    if spec.kind == "generalized_ghz":
        za, ea, _ = S.generalized_ghz_branches(p["n"], p["epsilon"])
        return SpinState.product(za), SpinState.product(ea)
    if spec.kind == "dn":
        return S.dn_branches(p["n"])
    raise ValueError(f"no branch decomposition known for spin kind {spec.kind!r}")


def fock_branches(spec, state) -> tuple[FockPureState, FockPureState]:
    p = _params(spec)
    d = state.dims[0] if isinstance(state, (FockPureState, DensityOperator)) else None
    if spec.kind == "vacuum_coherent":
        return S.vacuum(d), S.coherent(p["alpha"], d)
    if spec.kind == "scs":
        return S.coherent(p["alpha"], d), S.coherent(-p["alpha"], d)
    if spec.kind == "displaced_spe" and not p.get("both_modes", False):
        return S.displaced_qubit_branches(p["alpha"])
    if spec.kind == "marquardt_b":
        return S.marquardt_pair(p["n"], p["theta"])
    raise ValueError(f"no branch decomposition known for kind {spec.kind!r}")


def _need_fock(state):
    if isinstance(state, SpinState):
        raise ValueError("this measure needs a bosonic state")


def _need_spin(state):
    if not isinstance(state, SpinState):
        raise ValueError("this measure needs a spin state")


def m_I(spec, state, params, seed):
    _need_fock(state)
    return measure_I_algebraic(state, remove_offset=bool(params.get("remove_offset", False)))


def m_I_integral(spec, state, params, seed):
    _need_fock(state)
    return measure_I_integral(state, tol=float(params.get("tol", 1e-7)),
                              remove_offset=bool(params.get("remove_offset", False)))


def m_mean_photon_number(spec, state, params, seed):
    _need_fock(state)
    return MeasureReport(F.mean_photon_number(state), "expectation")


def m_purity(spec, state, params, seed):
    if isinstance(state, SpinState):
        return MeasureReport(float(np.real(np.trace(state.matrix @ state.matrix))), "trace")
    return MeasureReport(F.purity(state), "trace")


def m_disconnectivity(spec, state, params, seed):
    return M.disconnectivity(state).report()


def m_dur(spec, state, params, seed):
    if spec.kind not in ("generalized_ghz", "ghz"):
        raise ValueError("the dephasing size needs a generalized GHZ state")
    p = _params(spec)
    eps = p.get("epsilon", math.pi / 2)
    return M.dur_effective_size(p["n"], eps, float(params.get("gamma", 1.0)), params.get("mode", "analytic"))


def m_bjork_mana(spec, state, params, seed):
    obs = params.get("obs", "x")
    if isinstance(state, SpinState):
        obs = AdditiveObservable.collective(params.get("axis", "z"), state.n_qubits)
    return M.bjork_mana(state, obs)


def m_scan_S_max(spec, state, params, seed):
    _need_fock(state)
    grid = None
    if {"S_min", "S_max", "S_step"} & params.keys():
        lo, hi, step = (float(params.get(k, d)) for k, d in (("S_min", 1.0), ("S_max", 12.0), ("S_step", 0.05)))
        grid = np.round(np.arange(lo, hi + 1e-9, step), 10)
    return M.scan_S_max(state, grid, include_half_S=bool(params.get("include_half_S", True)))


def m_korsbakken(spec, state, params, seed):
    _need_spin(state)
    a, b = spin_branches(spec, state)
    return M.korsbakken_size(a, b, float(params.get("delta", 0.1)))


def m_marquardt(spec, state, params, seed):
    if spec.kind != "marquardt_b":
        raise ValueError("the Marquardt size needs a marquardt_b state")
    p = _params(spec)
    return M.marquardt_size(p["n"], p["theta"])


def m_fisher_neff(spec, state, params, seed):
    _need_spin(state)
    return M.fisher_neff(state, params.get("grouping"), seed=seed)


def m_max_variance(spec, state, params, seed):
    _need_spin(state)
    opt = M.maximize_local(state, "variance", params.get("grouping"), seed=seed)
    return MeasureReport(opt.value, opt.method, 0.0, {"restart_values": opt.restarts})


def m_index_p(spec, state, params, seed):
    _need_spin(state)
    sizes = params.get("sizes", list(range(2, 10)))
    return M.index_p_estimate(spec, sizes, seed=seed)


def m_sekatski(spec, state, params, seed):
    _need_fock(state)
    a, b = fock_branches(spec, state)
    return M.sekatski_size(a, b, float(params.get("P_g", 0.75)))


def m_entropy(spec, state, params, seed):
    if isinstance(state, SpinState):
        return MeasureReport(entropy(state), "eigenvalues")
    return MeasureReport(F.von_neumann_entropy(state), "eigenvalues")


MEASURES = {
    "I": m_I,
    "I_integral": m_I_integral,
    "mean_photon_number": m_mean_photon_number,
    "purity": m_purity,
    "entropy": m_entropy,
    "disconnectivity": m_disconnectivity,
    "dur": m_dur,
    "bjork_mana": m_bjork_mana,
    "scan_S_max": m_scan_S_max,
    "korsbakken": m_korsbakken,
    "marquardt": m_marquardt,
    "fisher_neff": m_fisher_neff,
    "max_variance": m_max_variance,
    "index_p": m_index_p,
    "sekatski": m_sekatski,
}
