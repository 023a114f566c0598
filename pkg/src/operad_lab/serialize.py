"""JSON encoding of every value the package produces.

Scalars: exact rationals are strings ``"p/q"`` (reduced, ``q > 0``), floats
are JSON numbers, infinity is the string ``"inf"``. Vectors are arrays.
Maps indexed by labels are objects keyed by ``str(label)``; the value's
``"labels"`` array carries the labels themselves (ints or strings), so keys
map back to the original labels. A subset of labels used as a key (table
entries, tree edges) is its sorted label list written as compact JSON, for
example ``"[1,2]"``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping

from . import geometry as g
from .disc_operads import ConfigClass, DiscConfig
from .errors import OperadLabError, ParseError, ValidationError
from .geometry import INF, Basepoint

__all__ = [
    "encode_scalar", "decode_scalar", "to_json", "from_json", "dumps", "loads",
    "parse_json", "config_from_json", "tree_from_json", "fm_from_json",
    "sphere_from_json", "bar_from_json", "trace_from_json", "subset_key",
]


# -- scalars and keys ------------------------------------------------------

def encode_scalar(v):
    if g.is_inf(v):
        return "inf"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool):
        raise ParseError("booleans are not scalars")
    if isinstance(v, int):
        return f"{v}/1"
    return float(v)


def decode_scalar(v, path="", allow_inf=False):
    if isinstance(v, bool):
        raise ParseError("booleans are not scalars", path=path)
    if isinstance(v, str):
        s = v.strip()
        if s.lower() in ("inf", "infinity", "∞"):
            if allow_inf:
                return INF
            raise ParseError("infinity is not allowed here", path=path)
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"malformed rational {v!r}", path=path) from None
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    raise ParseError(f"expected a scalar, got {type(v).__name__}", path=path)


def _vec(v):
    return [encode_scalar(c) for c in v]


def _decode_vec(v, path):
    if not isinstance(v, list):
        raise ParseError("expected an array of scalars", path=path)
    return tuple(decode_scalar(c, f"{path}[{n}]") for n, c in enumerate(v))


def subset_key(J) -> str:
    return json.dumps(g.sorted_labels(J), separators=(",", ":"))


def _label_list(labels):
    return g.sorted_labels(labels)


def _check_label(k, path):
    if isinstance(k, bool) or not isinstance(k, (int, str)):
        raise ParseError("labels must be integers or strings", path=path)
    return k


def _labels(obj, path):
    raw = _field(obj, "labels", path)
    if not isinstance(raw, list):
        raise ParseError("expected an array of labels", path=f"{path}.labels")
    labels = [_check_label(k, f"{path}.labels[{n}]") for n, k in enumerate(raw)]
    if len(set(labels)) != len(labels):
        raise ParseError("repeated label", path=f"{path}.labels")
    by_key = {}
    for k in labels:
        if str(k) in by_key:
            raise ParseError(f"labels {by_key[str(k)]!r} and {k!r} share a key", path=f"{path}.labels")
        by_key[str(k)] = k
    return labels, by_key


def _field(obj, name, path):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", path=path or "$")
    if name not in obj:
        raise ParseError(f"missing field {name!r}", path=path or "$")
    return obj[name]


def _keyed(obj, by_key, path):
    if not isinstance(obj, dict):
        raise ParseError("expected an object keyed by label", path=path)
    if set(obj) != set(by_key):
        raise ParseError("keys must be exactly the labels", path=path)
    return {by_key[k]: v for k, v in obj.items()}


def _subset(key, by_key, path):
    try:
        raw = json.loads(key) if key.startswith("[") else key.split(",")
    except json.JSONDecodeError:
        raise ParseError(f"malformed subset key {key!r}", path=path) from None
    out = set()
    for k in raw:
        sk = str(k).strip()
        if sk not in by_key:
            raise ParseError(f"unknown label {k!r} in subset key", path=path)
        out.add(by_key[sk])
    return frozenset(out)


# -- encoding --------------------------------------------------------------

def _config(c: DiscConfig) -> dict:
    ls = c.ordered_labels()
    return {"labels": ls,
            "x": {str(k): _vec(c.x[k]) for k in ls},
            "t": {str(k): encode_scalar(c.t[k]) for k in ls}}


def _tree(T) -> dict:
    return {"labels": _label_list(T.labels),
            "edges": [g.sorted_labels(e) for e in sorted(T.edges, key=_edge_order)]}


def _edge_order(e):
    return (len(e), [g.label_key(k) for k in g.sorted_labels(e)])


def _weights(r: Mapping) -> dict:
    return {subset_key(e): encode_scalar(v) for e, v in sorted(r.items(), key=lambda kv: _edge_order(kv[0]))}


def _fm(p) -> dict:
    out = {"labels": _label_list(p.labels), "dim": p.dim,
           "table": {subset_key(J): {str(k): _vec(p.table[J][k]) for k in g.sorted_labels(J)}
                     for J in sorted(p.table, key=_edge_order)}}
    if p.reference_weights is not None:
        out["weights"] = {str(k): encode_scalar(p.reference_weights[k]) for k in g.sorted_labels(p.labels)}
    return out


def _partition(pi) -> list:
    return pi.as_lists()


def to_json(value) -> Any:
    """A JSON-ready structure for any package value."""
    from . import bar_duality as B
    from . import flow as F
    from . import fulton_macpherson as FM
    from .trees import LabelledTree

    if isinstance(value, DiscConfig):
        return _config(value)
    if isinstance(value, Basepoint):
        return {"kind": "basepoint", "labels": _label_list(value.labels)}
    if isinstance(value, LabelledTree):
        return _tree(value)
    if isinstance(value, FM.FMPoint):
        return _fm(value)
    if isinstance(value, B.BarPoint):
        return {"kind": "finite", "tree": _tree(value.tree), "r": _weights(value.r),
                "config": _config(value.z)}
    if isinstance(value, B.BFPoint):
        return {"kind": "finite", "tree": _tree(value.tree), "r": _weights(value.r),
                "fm": _fm(value.y)}
    if isinstance(value, F.FlowTrace):
        return {"initial": _config(value.initial),
                "initial_partition": _partition(value.initial_partition),
                "norm": _norm_name(value.norm),
                "events": [{"time": ev.time, "kind": ev.kind, "r": ev.r_value,
                            "partition": _partition(ev.partition), "config": _config(ev.config)}
                           for ev in value.events],
                "terminal": _config(value.terminal) if value.terminal is not None else None}
    if isinstance(value, F.ComponentPartition):
        return _partition(value)
    if isinstance(value, FM.SinhaCoords):
        return {"directions": {subset_key(k): _vec(v) for k, v in value.directions.items()},
                "ratios": {json.dumps(list(k), separators=(",", ":")): encode_scalar(v)
                           for k, v in value.ratios.items()}}
    if isinstance(value, ConfigClass):
        return value.as_dict()
    if isinstance(value, (Fraction, float)) or g.is_inf(value):
        return encode_scalar(value)
    if isinstance(value, (set, frozenset)):
        return [to_json(v) for v in g.sorted_labels(value)]
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    if isinstance(value, dict):
        return {subset_key(k) if isinstance(k, frozenset) else str(k): to_json(v)
                for k, v in value.items()}
    if value is None or isinstance(value, (bool, int, str)):
        return value
    raise TypeError(f"no JSON encoding for {type(value).__name__}")


def _norm_name(norm):
    return norm.value if isinstance(norm, g.Norm) else repr(norm)


def dumps(value, indent=None) -> str:
    return json.dumps(to_json(value), indent=indent, sort_keys=False)


# -- decoding --------------------------------------------------------------

def parse_json(text: str):
    """``json.loads`` with syntax errors reported as :class:`ParseError`."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from None


def _wrap(fn, obj, path):
    try:
        return fn(obj, path)
    except (ParseError, ValidationError):
        raise
    except OperadLabError as exc:
        raise ParseError(str(exc), path=path or "$") from None


def config_from_json(obj, path="") -> DiscConfig:
    def build(obj, path):
        labels, by_key = _labels(obj, path)
        x = _keyed(_field(obj, "x", path), by_key, f"{path}.x")
        t = _keyed(_field(obj, "t", path), by_key, f"{path}.t")
        xs = {k: _decode_vec(v, f"{path}.x.{k}") for k, v in x.items()}
        ts = {k: decode_scalar(v, f"{path}.t.{k}") for k, v in t.items()}
        return DiscConfig(xs, ts)
    return _wrap(build, obj, path)


def tree_from_json(obj, path=""):
    from .trees import validate

    def build(obj, path):
        labels, by_key = _labels(obj, path)
        raw = _field(obj, "edges", path)
        if not isinstance(raw, list):
            raise ParseError("expected an array of edges", path=f"{path}.edges")
        edges = []
        for n, e in enumerate(raw):
            if not isinstance(e, list):
                raise ParseError("an edge is an array of labels", path=f"{path}.edges[{n}]")
            edges.append(frozenset(by_key.get(str(k), k) for k in e))
        return validate(edges, labels)
    return _wrap(build, obj, path)


def _edge_weights(obj, by_key, path):
    if not isinstance(obj, dict):
        raise ParseError("expected an object of edge weights", path=path)
    return {_subset(k, by_key, f"{path}.{k}"): decode_scalar(v, f"{path}.{k}", allow_inf=True)
            for k, v in obj.items()}


def fm_from_json(obj, path="", norm=g.Norm.LINF):
    from . import fulton_macpherson as FM

    def build(obj, path):
        labels, by_key = _labels(obj, path)
        dim = _field(obj, "dim", path)
        if isinstance(dim, bool) or not isinstance(dim, int):
            raise ParseError("dim must be an integer", path=f"{path}.dim")
        raw = _field(obj, "table", path)
        if not isinstance(raw, dict):
            raise ParseError("expected an object", path=f"{path}.table")
        table = {}
        for key, y in raw.items():
            J = _subset(key, by_key, f"{path}.table")
            ys = {}
            if not isinstance(y, dict):
                raise ParseError("expected an object keyed by label", path=f"{path}.table.{key}")
            for k, v in y.items():
                if k not in by_key:
                    raise ParseError(f"unknown label {k!r}", path=f"{path}.table.{key}")
                ys[by_key[k]] = _decode_vec(v, f"{path}.table.{key}.{k}")
            table[J] = ys
        w = None
        if "weights" in obj:
            w = {k: decode_scalar(v, f"{path}.weights.{k}")
                 for k, v in _keyed(obj["weights"], by_key, f"{path}.weights").items()}
        return FM.fm_validate(table, labels, dim, reference_weights=w, norm=norm)
    return _wrap(build, obj, path)


def sphere_from_json(obj, path=""):
    """A finite configuration or a basepoint."""
    kind = _field(obj, "kind", path)
    if kind == "basepoint":
        labels, _ = _labels(obj, path)
        return Basepoint(labels)
    if kind == "finite":
        return config_from_json(_field(obj, "config", path), f"{path}.config")
    raise ParseError(f"unknown kind {kind!r}", path=f"{path}.kind")


def bar_from_json(obj, path="", validate=True, norm=g.Norm.LINF):
    """A bar point ``(T, r, z)`` or a basepoint. With ``validate`` the
    configuration must lie in the tree-indexed subspace."""
    from . import bar_duality as B

    def build(obj, path):
        kind = _field(obj, "kind", path)
        if kind == "basepoint":
            labels, _ = _labels(obj, path)
            return Basepoint(labels)
        if kind != "finite":
            raise ParseError(f"unknown kind {kind!r}", path=f"{path}.kind")
        T = tree_from_json(_field(obj, "tree", path), f"{path}.tree")
        by_key = {str(k): k for k in T.labels}
        r = _edge_weights(_field(obj, "r", path), by_key, f"{path}.r")
        if "fm" in obj:
            y = fm_from_json(obj["fm"], f"{path}.fm", norm)
            return B.BFPoint(T, B.edge_weights_of(T, r, y.backend), y)
        z = config_from_json(_field(obj, "config", path), f"{path}.config")
        if validate:
            return B.make_bar_point(T, r, z, norm)
        return B.BarPoint(T, B.edge_weights_of(T, r, z.backend), z)
    return _wrap(build, obj, path)


def trace_from_json(obj, path=""):
    from . import flow as F

    def part(raw, p):
        if not isinstance(raw, list):
            raise ParseError("a partition is an array of blocks", path=p)
        return F.ComponentPartition.of(raw)

    def build(obj, path):
        norm = g.parse_norm(obj.get("norm", "linf"))
        initial = config_from_json(_field(obj, "initial", path), f"{path}.initial")
        tr = F.FlowTrace(initial, part(_field(obj, "initial_partition", path), f"{path}.initial_partition"),
                         norm=norm)
        by_key = {str(k): k for k in initial.labels}
        for n, ev in enumerate(_field(obj, "events", path)):
            p = f"{path}.events[{n}]"
            blocks = [[by_key.get(str(k), k) for k in b] for b in _field(ev, "partition", p)]
            tr.events.append(F.FlowEvent(float(_field(ev, "time", p)),
                                         config_from_json(_field(ev, "config", p), f"{p}.config"),
                                         part(blocks, f"{p}.partition"),
                                         float(_field(ev, "r", p)), _field(ev, "kind", p)))
        term = _field(obj, "terminal", path)
        tr.terminal = None if term is None else config_from_json(term, f"{path}.terminal")
        return tr
    return _wrap(build, obj, path)


def from_json(obj, path=""):
    """Decode by shape: the fields present select the type."""
    if not isinstance(obj, dict):
        raise ParseError("expected an object", path=path or "$")
    if "kind" in obj:
        if "tree" in obj:
            return bar_from_json(obj, path)
        return sphere_from_json(obj, path)
    if "events" in obj:
        return trace_from_json(obj, path)
    if "table" in obj:
        return fm_from_json(obj, path)
    if "edges" in obj:
        return tree_from_json(obj, path)
    if "x" in obj:
        return config_from_json(obj, path)
    raise ParseError("unrecognised value", path=path or "$")


def loads(text: str):
    return from_json(parse_json(text))
