"""Built-in manifests that tabulate the standard comparisons in one command."""

from __future__ import annotations

PRESETS: dict[str, str] = {
    "measure-I-gallery": """
seed: 0
states:
  - {id: scs, kind: scs, params: {alpha: 3.0}}
  - {id: ecs, kind: ecs, params: {alpha: 2.0}}
  - {id: hybrid, kind: hybrid, params: {alpha: 3.0}}
  - {id: displaced_spe, kind: displaced_spe, params: {alpha: 5.0}}
  - {id: squeezed_spe, kind: squeezed_spe, params: {r: 1.0}}
  - {id: qiopa, kind: qiopa, params: {g: 1.0, order_cap: 40}}
measures: [I, mean_photon_number]
""",
    "scs-sweep": """
seed: 0
states:
  - {id: scs, kind: scs, params: {alpha: 1.0}}
measures: [I, I_integral]
sweep: {param: alpha, values: [0.5, 1.0, 2.0, 3.0]}
""",
    "disconnectivity": """
seed: 0
states:
  - {id: ghz, kind: ghz, params: {n: 2}}
  - {id: generalized_ghz, kind: generalized_ghz, params: {n: 4, epsilon: 0.3}}
  - {id: mixed_ghz, kind: mixed_ghz, params: {n: 3, gamma: 0.5}}
  - {id: product, kind: product, params: {n: 5, axis: z}}
measures: [disconnectivity]
sweep: {param: n, values: [2, 3, 4, 5, 6], states: [ghz]}
""",
    "dur": """
seed: 0
states:
  - {id: ggz, kind: generalized_ghz, params: {n: 8, epsilon: 0.1}}
measures:
  - {tag: dur, params: {mode: analytic}}
  - {tag: dur, params: {mode: simulated}}
sweep: {param: epsilon, values: [0.1, 0.3, 1.5707963267948966]}
""",
    "cavalcanti-reid": """
seed: 0
states:
  - {id: scs, kind: scs, params: {alpha: 3.0}}
  - {id: vacuum, kind: vacuum}
  - {id: mixture, kind: coherent_mixture, params: {alpha: 3.0}}
measures: [scan_S_max]
""",
    "korsbakken": """
seed: 0
states:
  - {id: ghz, kind: ghz, params: {n: 5}}
  - {id: dn, kind: dn, params: {n: 9}}
measures:
  - {tag: korsbakken, params: {delta: 0.05}}
""",
    "marquardt": """
seed: 0
states:
  - {id: pair, kind: marquardt_b, params: {n: 10, theta: 0.5235987755982988}}
measures: [marquardt]
sweep: {param: theta, values: [0.5235987755982988, 1.0, 1.5707963267948966]}
""",
    "fisher": """
seed: 0
states:
  - {id: ghz, kind: ghz, params: {n: 3}}
  - {id: product, kind: product, params: {n: 3}}
measures: [fisher_neff, max_variance]
sweep: {param: n, values: [3, 4, 5, 6]}
""",
    "sekatski": """
seed: 0
states:
  - {id: vacuum_coherent, kind: vacuum_coherent, params: {alpha: 10.0}}
  - {id: displaced_spe, kind: displaced_spe, params: {alpha: 20.0}}
measures:
  - {tag: sekatski, params: {P_g: 0.6}}
  - {tag: sekatski, params: {P_g: 0.75}}
""",
}


def preset_text(tag: str) -> str:
    if tag not in PRESETS:
        raise KeyError(f"unknown preset {tag!r}; known: {', '.join(sorted(PRESETS))}")
    return PRESETS[tag]
