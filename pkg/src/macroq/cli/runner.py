"""Execute a manifest into report rows and serialize them."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from macroq.cli.manifest import RunManifest
from macroq.cli.measures import MEASURES
from macroq.states import build, coerce_param

CSV_COLUMNS = ("state_id", "param_name", "param_value", "measure", "value", "error_estimate", "method", "seconds")


@dataclass(frozen=True)
class ReportRow:
    state_id: str
    param_name: str
    param_value: object
    measure: str
    value: float
    error_estimate: float
    method: str
    seconds: float

    @property
    def failed(self) -> bool:
        return self.method.startswith("error:")


@dataclass(frozen=True)
class _Task:
    order: tuple[int, int, int]
    state_id: str
    spec: object
    param_name: str
    param_value: object
    measure: object
    seed: int


def _tasks(manifest: RunManifest) -> list[_Task]:
    seeds = iter(np.random.SeedSequence(manifest.seed).generate_state(
        max(1, len(manifest.states) * len(manifest.measures) * (len(manifest.sweep.values) if manifest.sweep else 1))))
    out = []
    for si, entry in enumerate(manifest.states):
        swept = manifest.sweep is not None and entry.id in manifest.sweep.states
        points = [(manifest.sweep.param, v) for v in manifest.sweep.values] if swept else [("", "")]
        for pi, (name, value) in enumerate(points):
            spec = entry.spec.with_param(name, value) if name else entry.spec
            for mi, meas in enumerate(manifest.measures):
                out.append(_Task((si, pi, mi), entry.id, spec, name, value, meas, int(next(seeds))))
    return out


def _param_value(spec, name, value):
    if not name:
        return ""
    v = coerce_param(spec.kind, name, value)
    if isinstance(v, complex):
        return [v.real, v.imag] if v.imag else v.real
    return v


def _execute(task: _Task) -> tuple[tuple[int, int, int], ReportRow]:
    start = time.perf_counter()
    try:
        state = build(task.spec)
        rep = MEASURES[task.measure.tag](task.spec, state, dict(task.measure.params), task.seed)
        value, err, method = float(rep.value), float(rep.error_estimate), rep.method
    except Exception as exc:  # captured in the row, never dropped
        value, err, method = math.nan, math.nan, f"error: {type(exc).__name__}: {exc}"
    row = ReportRow(task.state_id, task.param_name, _param_value(task.spec, task.param_name, task.param_value),
                    task.measure.tag, value, err, method, time.perf_counter() - start)
    return task.order, row


def run(manifest: RunManifest, jobs: int = 1) -> list[ReportRow]:
    """Rows for every (state, sweep point, measure), ordered as in the manifest."""
    tasks = _tasks(manifest)
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_execute, tasks))
    else:
        results = [_execute(t) for t in tasks]
    return [row for _, row in sorted(results, key=lambda r: r[0])]


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, list):
        return f"{x[0]:.9g}{x[1]:+.9g}j"
    return f"{x:.9g}"


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.state_id, r.param_name, _fmt(r.param_value), r.measure, _fmt(r.value),
                    _fmt(r.error_estimate), r.method, f"{r.seconds:.6f}"])
    return buf.getvalue()


def from_csv(text: str) -> list[dict]:
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        rec["value"] = float(rec["value"])
        rec["error_estimate"] = float(rec["error_estimate"])
        rec["seconds"] = float(rec["seconds"])
        out.append(rec)
    return out


def to_json(rows) -> str:
    return json.dumps([asdict(r) for r in rows], indent=1)


def from_json(text: str) -> list[ReportRow]:
    return [ReportRow(**rec) for rec in json.loads(text)]


def serialize(rows, fmt: str) -> str:
    return to_csv(rows) if fmt == "csv" else to_json(rows)
