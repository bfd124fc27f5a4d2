"""Macroscopicity measures, each returning a MeasureReport."""

from macroq.measures.bjork_mana import bjork_mana, bjork_mana_spectrum, spectral_distribution
from macroq.measures.cavalcanti_reid import InequalityVerdict, cavalcanti_reid, quadrature_pair, scan_S_max
from macroq.measures.disconnectivity import DisconnectivityProfile, disconnectivity
from macroq.measures.dur import FitError, dur_effective_size
from macroq.measures.fisher import fisher_neff, qfi
from macroq.measures.indices import index_p_estimate, index_q_correlator
from macroq.measures.korsbakken import ghz_branches, korsbakken_size, success_probability
from macroq.measures.marquardt import marquardt_size
from macroq.measures._optimize import OptimizationError, maximize_local
from macroq.measures.sekatski import DetectorModel, guessing_probability, sekatski_size

__all__ = [
    "DetectorModel", "DisconnectivityProfile", "FitError", "InequalityVerdict", "OptimizationError",
    "bjork_mana", "bjork_mana_spectrum", "cavalcanti_reid", "disconnectivity", "dur_effective_size",
    "fisher_neff", "ghz_branches", "guessing_probability", "index_p_estimate", "index_q_correlator",
    "korsbakken_size", "marquardt_size", "maximize_local", "qfi", "quadrature_pair", "scan_S_max",
    "sekatski_size", "spectral_distribution", "success_probability",
]
