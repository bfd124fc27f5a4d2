"""Run manifests: YAML files naming states, measures, an optional sweep and the output."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import yaml

from macroq.states import REGISTRY, StateSpec, coerce_param

FORMATS = ("csv", "json")


class ManifestError(ValueError):
    """A manifest that does not validate; the message carries line and column."""

    def __init__(self, message: str, mark=None):
        where = f"line {mark.line + 1}, column {mark.column + 1}: " if mark is not None else ""
        super().__init__(where + message)
        self.mark = mark


@dataclass(frozen=True)
class StateEntry:
    id: str
    spec: StateSpec


@dataclass(frozen=True)
class MeasureEntry:
    tag: str
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Sweep:
    param: str
    values: tuple
    states: tuple[str, ...]


@dataclass(frozen=True)
class RunManifest:
    states: tuple[StateEntry, ...]
    measures: tuple[MeasureEntry, ...]
    sweep: Sweep | None = None
    format: str = "csv"
    path: str | None = None
    seed: int = 0


class _Reader:
    """Walks a composed YAML node tree so every complaint can point at its source."""

    def __init__(self, text: str):
        self.loader = yaml.SafeLoader(text)
        try:
            self.root = self.loader.get_single_node()
        except yaml.MarkedYAMLError as exc:
            raise ManifestError(f"YAML syntax: {exc.problem}", exc.problem_mark) from None

    def value(self, node):
        return self.loader.construct_object(node, deep=True)

    def mapping(self, node, what: str) -> dict[str, tuple[Any, Any]]:
        if not isinstance(node, yaml.MappingNode):
            raise ManifestError(f"{what} must be a mapping", node.start_mark)
        out = {}
        for k, v in node.value:
            key = self.value(k)
            if key in out:
                raise ManifestError(f"duplicate key {key!r} in {what}", k.start_mark)
            out[key] = (k, v)
        return out

    def sequence(self, node, what: str) -> list:
        if not isinstance(node, yaml.SequenceNode):
            raise ManifestError(f"{what} must be a list", node.start_mark)
        return list(node.value)


def _check_keys(found: dict, allowed: set[str], what: str) -> None:
    for key, (knode, _) in found.items():
        if key not in allowed:
            raise ManifestError(f"unknown key {key!r} in {what}", knode.start_mark)


def parse_manifest(text: str, measure_tags) -> RunManifest:
    """Validate manifest text; ``measure_tags`` is the set of implemented measure names."""
    r = _Reader(text)
    if r.root is None:
        raise ManifestError("manifest is empty")
    top = r.mapping(r.root, "manifest")
    _check_keys(top, {"seed", "states", "measures", "sweep", "output"}, "manifest")

    seed = 0
    if "seed" in top:
        seed = r.value(top["seed"][1])
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ManifestError("seed must be a non-negative integer", top["seed"][1].start_mark)

    if "states" not in top:
        raise ManifestError("manifest needs a 'states' list", r.root.start_mark)
    states = []
    for node in r.sequence(top["states"][1], "states"):
        m = r.mapping(node, "state entry")
        _check_keys(m, {"id", "kind", "params", "truncation"}, "state entry")
        for need in ("id", "kind"):
            if need not in m:
                raise ManifestError(f"state entry needs {need!r}", node.start_mark)
        sid = str(r.value(m["id"][1]))
        kind = r.value(m["kind"][1])
        if kind not in REGISTRY:
            raise ManifestError(f"unknown state kind {kind!r}", m["kind"][1].start_mark)
        params = {}
        if "params" in m:
            for key, (knode, vnode) in r.mapping(m["params"][1], "params").items():
                try:
                    coerce_param(kind, key, r.value(vnode))
                except (KeyError, ValueError, TypeError) as exc:
                    raise ManifestError(str(exc).strip('"'), knode.start_mark) from None
                params[key] = r.value(vnode)
        trunc = None
        if "truncation" in m:
            trunc = r.value(m["truncation"][1])
            if not isinstance(trunc, int) or trunc < 1:
                raise ManifestError("truncation must be a positive integer", m["truncation"][1].start_mark)
        if any(s.id == sid for s in states):
            raise ManifestError(f"duplicate state id {sid!r}", m["id"][1].start_mark)
        states.append(StateEntry(sid, StateSpec(kind, params, trunc)))

    measures = []
    if "measures" in top:
        for node in r.sequence(top["measures"][1], "measures"):
            if isinstance(node, yaml.ScalarNode):
                tag, params, tag_node = r.value(node), {}, node
            else:
                m = r.mapping(node, "measure entry")
                _check_keys(m, {"tag", "params"}, "measure entry")
                if "tag" not in m:
                    raise ManifestError("measure entry needs 'tag'", node.start_mark)
                tag_node = m["tag"][1]
                tag = r.value(tag_node)
                params = r.value(m["params"][1]) if "params" in m else {}
                if not isinstance(params, dict):
                    raise ManifestError("measure params must be a mapping", m["params"][1].start_mark)
            if tag not in measure_tags:
                raise ManifestError(f"unknown measure tag {tag!r}", tag_node.start_mark)
            measures.append(MeasureEntry(tag, params))

    sweep = None
    if "sweep" in top:
        snode = top["sweep"][1]
        m = r.mapping(snode, "sweep")
        _check_keys(m, {"param", "values", "states"}, "sweep")
        if "param" not in m or "values" not in m:
            raise ManifestError("sweep needs 'param' and 'values'", snode.start_mark)
        name = str(r.value(m["param"][1]))
        values = r.value(m["values"][1])
        if not isinstance(values, list) or not values:
            raise ManifestError("sweep values must be a non-empty list", m["values"][1].start_mark)
        targets = [str(s) for s in r.value(m["states"][1])] if "states" in m else [s.id for s in states]
        by_id = {s.id: s for s in states}
        for sid in targets:
            if sid not in by_id:
                raise ManifestError(f"sweep names unknown state {sid!r}", m["states"][1].start_mark)
            kind = by_id[sid].spec.kind
            if name not in REGISTRY[kind][1]:
                raise ManifestError(f"sweep parameter {name!r} does not exist for state {sid!r} ({kind})",
                                    m["param"][1].start_mark)
            for v in values:
                try:
                    coerce_param(kind, name, v)
                except (ValueError, TypeError) as exc:
                    raise ManifestError(str(exc), m["values"][1].start_mark) from None
        sweep = Sweep(name, tuple(values), tuple(targets))

    fmt, path = "csv", None
    if "output" in top:
        m = r.mapping(top["output"][1], "output")
        _check_keys(m, {"format", "path"}, "output")
        if "format" in m:
            fmt = r.value(m["format"][1])
            if fmt not in FORMATS:
                raise ManifestError(f"output format must be one of {FORMATS}", m["format"][1].start_mark)
        if "path" in m:
            path = str(r.value(m["path"][1]))
    return RunManifest(tuple(states), tuple(measures), sweep, fmt, path, seed)


def load_manifest(path: str, measure_tags) -> RunManifest:
    with open(path, encoding="utf-8") as fh:
        return parse_manifest(fh.read(), measure_tags)
