"""Command-line entry point: ``macroq run``, ``macroq preset`` and ``macroq state inspect``."""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys

import numpy as np
import yaml

from macroq import fock as F
from macroq.cli.manifest import ManifestError, load_manifest, parse_manifest
from macroq.cli.measures import MEASURES
from macroq.cli.presets import preset_text
from macroq.cli.runner import run, serialize
from macroq.phase_space import quadrature_distribution, wigner
from macroq.spin import SpinState, entropy
from macroq.states import REGISTRY, StateSpec, build

EXIT_OK, EXIT_MANIFEST, EXIT_PARTIAL = 0, 1, 2


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_manifest(manifest, args) -> int:
    if args.seed is not None:
        manifest = dataclasses.replace(manifest, seed=args.seed)
    fmt = args.format or manifest.format
    rows = run(manifest, jobs=args.jobs)
    _emit(serialize(rows, fmt), args.out or manifest.path)
    failed = [r for r in rows if r.failed]
    for r in failed:
        print(f"{r.state_id} {r.param_name}={r.param_value} {r.measure}: {r.method}", file=sys.stderr)
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_run(args) -> int:
    try:
        manifest = load_manifest(args.manifest, MEASURES)
    except (ManifestError, OSError) as exc:
        print(f"{args.manifest}: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    return _run_manifest(manifest, args)


def cmd_preset(args) -> int:
    try:
        manifest = parse_manifest(preset_text(args.tag), MEASURES)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return EXIT_MANIFEST
    return _run_manifest(manifest, args)


def parse_inline_spec(text: str) -> StateSpec:
    """'scs alpha=3 phi=0' -> StateSpec; values are read as YAML scalars."""
    parts = text.split()
    if not parts:
        raise ValueError("empty state spec")
    kind, params, trunc = parts[0], {}, None
    if kind not in REGISTRY:
        raise ValueError(f"unknown state kind {kind!r}")
    for item in parts[1:]:
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {item!r}")
        value = yaml.safe_load(val)
        if key == "truncation":
            trunc = int(value)
        else:
            params[key] = value
    return StateSpec(kind, params, trunc)


def cmd_inspect(args) -> int:
    try:
        spec = parse_inline_spec(args.spec)
        state = build(spec)
    except (ValueError, KeyError, TypeError) as exc:
        print(f"state spec: {exc}", file=sys.stderr)
        return EXIT_MANIFEST
    if isinstance(state, SpinState):
        print(f"kind: {spec.kind}")
        print(f"qubits: {state.n_qubits}")
        print(f"purity: {float(np.real(np.trace(state.matrix @ state.matrix))):.9g}")
        print(f"entropy: {entropy(state):.9g}")
        return EXIT_OK
    n_mean = F.mean_photon_number(state)
    d = state.dims[args.mode]
    extent = 2 * math.sqrt(max(d - 1, 1)) + 4
    grid = np.linspace(-extent, extent, args.points)
    W = wigner(state, grid, grid, args.mode)
    print(f"kind: {spec.kind}")
    print(f"dims: {list(state.dims)}")
    print(f"mean photon number: {n_mean:.9g}")
    print(f"purity: {F.purity(state):.9g}")
    print(f"wigner min (mode {args.mode}): {W.min():.9g}")
    print(f"wigner max (mode {args.mode}): {W.max():.9g}")
    if args.wigner:
        X, P = np.meshgrid(grid, grid)
        np.savetxt(args.wigner, np.column_stack([X.ravel(), P.ravel(), W.ravel()]),
                   delimiter=",", header="x,p,W", comments="", fmt="%.9g")
    if args.marginal:
        q = quadrature_distribution(state, args.angle, grid, args.mode)
        np.savetxt(args.marginal, np.column_stack([grid, q.density]), delimiter=",",
                   header="x,density", comments="", fmt="%.9g")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="macroq", description="Macroscopic-quantumness measures in batch.")
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("--jobs", type=int, default=1, help="parallel workers")
        sp.add_argument("--seed", type=int, default=None, help="override the manifest seed")
        sp.add_argument("--out", default=None, help="output file (default: manifest path or stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)

    r = sub.add_parser("run", help="run a manifest file")
    r.add_argument("manifest")
    common(r)
    r.set_defaults(func=cmd_run)

    pr = sub.add_parser("preset", help="run a built-in manifest")
    pr.add_argument("tag")
    common(pr)
    pr.set_defaults(func=cmd_preset)

    st = sub.add_parser("state", help="state utilities")
    st_sub = st.add_subparsers(dest="action", required=True)
    ins = st_sub.add_parser("inspect", help="print summary numbers of a state")
    ins.add_argument("spec", help="e.g. 'scs alpha=3 phi=0'")
    ins.add_argument("--mode", type=int, default=0)
    ins.add_argument("--points", type=int, default=161)
    ins.add_argument("--wigner", default=None, help="write the Wigner grid as CSV")
    ins.add_argument("--marginal", default=None, help="write a quadrature marginal as CSV")
    ins.add_argument("--angle", type=float, default=0.0, help="quadrature angle for --marginal")
    ins.set_defaults(func=cmd_inspect)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
