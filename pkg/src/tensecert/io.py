"""Reading and writing instance files, plus random instance templates.

An instance is one JSON object::

    {"version": 1,
     "name": "c3-prism",
     "group": {"name": "C3"},                  # or {"elements": [...], "table": [[...]]}
     "irreps": [...],                          # optional for catalogue groups
     "dimension": 3,
     "point_group": {"e": [[...]], "r": ...},  # optional; default is the trivial action
     "vertices": ["b", "t"],
     "edges": [{"u": "b", "v": "t", "gain": "r", "sign": -1}, ...],
     "configuration": {"representatives": {"b": [...], "t": [...]}}}

A configuration may instead list every lifted point under ``"points"``
with keys ``"(g,v)"`` (or bare vertex names when the group is trivial).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .gain_graph import GraphError, SignedGainGraph
from .groups import FiniteGroup, GroupError, catalogue_group, from_table
from .irreps import IrrepError, IrrepSet, RealIrrep, catalogue_irreps, make_irrep
from .tensegrity import PointGroup, SymmetricTensegrity, TensegrityError

SCHEMA_VERSION = 1

_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_VECTOR = {"type": "array", "items": {"type": "number"}}
_POINTS = {"type": "object", "additionalProperties": _VECTOR}

SCHEMA = {
    "type": "object",
    "required": ["version", "dimension", "vertices", "edges", "configuration"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "integer"},
        "name": {"type": "string"},
        "description": {"type": "string"},
        "group": {
            "oneOf": [
                {"type": "object", "required": ["name"], "additionalProperties": False,
                 "properties": {"name": {"type": "string"},
                                "labels": {"type": "array", "items": {"type": "string"}}}},
                {"type": "object", "required": ["elements", "table"], "additionalProperties": False,
                 "properties": {"name": {"type": "string"},
                                "elements": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                                "table": {"type": "array", "items": {"type": "array",
                                          "items": {"type": ["integer", "string"]}}}}},
            ]
        },
        "irreps": {
            "type": "array",
            "items": {"type": "object", "required": ["degree", "matrices"], "additionalProperties": False,
                      "properties": {"name": {"type": "string"},
                                     "degree": {"type": "integer", "minimum": 1},
                                     "matrices": {"type": "object", "additionalProperties": _MATRIX},
                                     "type": {"enum": ["auto", "real", "complex", "quaternionic"]}}},
        },
        "dimension": {"type": "integer", "minimum": 1},
        "point_group": {"type": "object", "additionalProperties": _MATRIX},
        "vertices": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "edges": {
            "type": "array",
            "items": {"type": "object", "required": ["u", "v"], "additionalProperties": False,
                      "properties": {"u": {"type": "string"}, "v": {"type": "string"},
                                     "gain": {"type": "string"},
                                     "sign": {"oneOf": [{"enum": [-1, 0, 1]},
                                                        {"enum": ["cable", "bar", "strut"]}]}}},
        },
        "configuration": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
            "properties": {"points": _POINTS, "representatives": _POINTS},
        },
    },
}

_SIGN_WORDS = {"cable": 1, "bar": 0, "strut": -1}


class InstanceError(ValueError):
    def __init__(self, pointer: str, message: str):
        self.pointer = pointer or "/"
        super().__init__(f"{self.pointer}: {message}")


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    tensegrity: SymmetricTensegrity
    irreps: IrrepSet | None
    group_descriptor: dict
    irreps_descriptor: list | None
    description: str = ""

    @property
    def group(self) -> FiniteGroup:
        return self.tensegrity.group

    def irrep_set(self) -> IrrepSet:
        if self.irreps is not None:
            return self.irreps
        return catalogue_irreps(self.group)


def _parse_group(desc: dict | None) -> tuple[FiniteGroup, dict]:
    if desc is None:
        desc = {"name": "C1"}
    try:
        if "table" in desc:
            G = from_table(desc["elements"], desc["table"], desc.get("name", "custom"))
            canon = {"name": G.name, "elements": list(G.elements), "table": G.table.tolist()}
        else:
            G = catalogue_group(desc["name"])
            canon = {"name": desc["name"]}
            if "labels" in desc:
                G = G.relabel(desc["labels"])
                canon["labels"] = list(desc["labels"])
    except GroupError as exc:
        raise InstanceError("/group", str(exc)) from None
    return G, canon


def _parse_irreps(G: FiniteGroup, items: list | None) -> IrrepSet | None:
    if items is None:
        return None
    out = []
    for k, item in enumerate(items):
        mats = item["matrices"]
        missing = [e for e in G.elements if e not in mats]
        if missing:
            raise InstanceError(f"/irreps/{k}/matrices", f"no matrix for element {missing[0]!r}")
        extra = [e for e in mats if e not in G.elements]
        if extra:
            raise InstanceError(f"/irreps/{k}/matrices", f"unknown element {extra[0]!r}")
        d = item["degree"]
        arr = np.array([mats[e] for e in G.elements], dtype=float)
        if arr.shape != (G.order, d, d):
            raise InstanceError(f"/irreps/{k}/matrices", f"matrices must be {d}x{d}")
        try:
            out.append(make_irrep(G, arr, item.get("name", f"rho{k}"), item.get("type", "auto")))
        except IrrepError as exc:
            raise InstanceError(f"/irreps/{k}", str(exc)) from None
    try:
        return IrrepSet(G, out)
    except IrrepError as exc:
        raise InstanceError("/irreps", str(exc)) from None


def parse_instance_data(data: Any) -> Instance:
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        raise InstanceError(_pointer(err.absolute_path), err.message)
    if data["version"] != SCHEMA_VERSION:
        raise InstanceError("/version", f"unsupported schema version {data['version']} (supported: {SCHEMA_VERSION})")
    G, gdesc = _parse_group(data.get("group"))
    irreps = _parse_irreps(G, data.get("irreps"))
    d = data["dimension"]

    if "point_group" in data:
        pg = data["point_group"]
        for e in G.elements:
            if e not in pg:
                raise InstanceError("/point_group", f"no matrix for element {e!r}")
        for e in pg:
            if e not in G.elements:
                raise InstanceError(f"/point_group/{e}", f"unknown element {e!r}")
        arr = np.array([pg[e] for e in G.elements], dtype=float)
        if arr.shape != (G.order, d, d):
            raise InstanceError("/point_group", f"matrices must be {d}x{d}")
        try:
            action = PointGroup(G, arr)
        except TensegrityError as exc:
            raise InstanceError("/point_group", str(exc)) from None
    else:
        action = PointGroup.trivial(G, d)

    vertices = data["vertices"]
    vidx = {v: i for i, v in enumerate(vertices)}
    if len(vidx) != len(vertices):
        raise InstanceError("/vertices", "vertex names must be distinct")
    edges = []
    for k, e in enumerate(data["edges"]):
        for end in ("u", "v"):
            if e[end] not in vidx:
                raise InstanceError(f"/edges/{k}/{end}", f"unknown vertex {e[end]!r}")
        gain = G.identity
        if "gain" in e:
            try:
                gain = G.index(e["gain"])
            except GroupError as exc:
                raise InstanceError(f"/edges/{k}/gain", str(exc)) from None
        sign = e.get("sign", 0)
        sign = _SIGN_WORDS.get(sign, sign)
        edges.append((vidx[e["u"]], vidx[e["v"]], gain, int(sign)))
    try:
        graph = SignedGainGraph.build(G, vertices, edges)
    except GraphError as exc:
        raise InstanceError("/edges", str(exc)) from None

    conf = data["configuration"]
    try:
        if "representatives" in conf:
            reps = conf["representatives"]
            for v in vertices:
                if v not in reps:
                    raise InstanceError(f"/configuration/representatives", f"missing vertex {v!r}")
            for v, p in reps.items():
                if v not in vidx:
                    raise InstanceError(f"/configuration/representatives/{v}", "unknown vertex")
                if len(p) != d:
                    raise InstanceError(f"/configuration/representatives/{v}", f"expected {d} coordinates")
            T = SymmetricTensegrity.from_representatives(graph, action, np.array([reps[v] for v in vertices], float))
        else:
            pts = conf["points"]
            rows = np.full((graph.n, d), np.nan)
            for key, p in pts.items():
                i = _point_index(graph, key)
                if i is None:
                    raise InstanceError(f"/configuration/points/{key}", "unknown lifted vertex")
                if len(p) != d:
                    raise InstanceError(f"/configuration/points/{key}", f"expected {d} coordinates")
                rows[i] = p
            if np.isnan(rows).any():
                i = int(np.argwhere(np.isnan(rows).any(axis=1))[0, 0])
                raise InstanceError("/configuration/points", f"missing point {graph.vertex_label(i)!r}")
            T = SymmetricTensegrity.from_points(graph, action, rows)
    except TensegrityError as exc:
        raise InstanceError("/configuration", str(exc)) from None
    return Instance(data.get("name", ""), T, irreps, gdesc, data.get("irreps"), data.get("description", ""))


def _point_index(graph: SignedGainGraph, key: str) -> int | None:
    key = key.strip()
    if key.startswith("(") and key.endswith(")") and "," in key:
        g, v = (s.strip() for s in key[1:-1].split(",", 1))
        if g in graph.group.elements and v in graph.vertices:
            return graph.vertex_index(graph.group.index(g), graph.vertices.index(v))
        return None
    if graph.group.order == 1 and key in graph.vertices:
        return graph.vertices.index(key)
    return None


def resolve_path(path: str | Path) -> Path:
    """A path on disk, or the name of a bundled fixture."""
    p = Path(path)
    if p.exists():
        return p
    bundled = resources.files("tensecert") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise FileNotFoundError(f"no such instance file: {path}")


def parse_instance(path: str | Path) -> Instance:
    p = resolve_path(path)
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError("/", f"invalid JSON: {exc}") from None
    return parse_instance_data(data)


def bundled_fixtures() -> list[str]:
    root = resources.files("tensecert") / "data"
    return sorted(f.name for f in root.iterdir() if f.name.endswith(".json"))


def _num(x: float) -> float | int:
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2 ** 53 else x


def _mat(M) -> list:
    return [[_num(x) for x in row] for row in np.asarray(M)]


def emit_instance(inst: Instance) -> dict:
    """Canonical JSON form: representatives, canonical edges, explicit point group."""
    T = inst.tensegrity
    G = T.group
    g = T.graph
    out = {
        "version": SCHEMA_VERSION,
        "name": inst.name,
        "group": inst.group_descriptor,
        "dimension": T.d,
        "point_group": {e: _mat(T.point_group.matrices[i]) for i, e in enumerate(G.elements)},
        "vertices": list(g.vertices),
        "edges": [
            {"u": g.vertices[e.u], "v": g.vertices[e.v], "gain": G.elements[e.gain], "sign": e.sign}
            for e in g.edges
        ],
        "configuration": {"representatives": {
            v: [_num(x) for x in T.representatives[i]] for i, v in enumerate(g.vertices)
        }},
    }
    if inst.description:
        out["description"] = inst.description
    if inst.irreps is not None:
        out["irreps"] = [
            {"name": r.name, "degree": r.degree, "type": r.field.value,
             "matrices": {e: _mat(r.matrices[i]) for i, e in enumerate(G.elements)}}
            for r in inst.irreps
        ]
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ----------------------------------------------------------- templates


def _rot(t):
    c, s = np.cos(t), np.sin(t)
    return [[c, -s], [s, c]]


def _c3_axis_action():
    mats = {}
    for a, e in enumerate(("e", "r", "r2")):
        R = np.eye(3)
        R[:2, :2] = _rot(2 * np.pi * a / 3)
        mats[e] = R.tolist()
    return mats


TEMPLATES = {
    "c3-prism": {
        "group": {"name": "C3"}, "dimension": 3, "vertices": ["b", "t"],
        "point_group": _c3_axis_action,
        "edges": [{"u": "b", "v": "b", "gain": "r", "sign": 1}, {"u": "t", "v": "t", "gain": "r", "sign": 1},
                  {"u": "b", "v": "t", "gain": "e", "sign": 1}, {"u": "b", "v": "t", "gain": "r", "sign": -1}],
    },
    "z2-halfturn": {
        "group": {"name": "Z2", "labels": ["+1", "-1"]}, "dimension": 2, "vertices": ["v1", "v2", "v3"],
        "point_group": lambda: {"+1": np.eye(2).tolist(), "-1": (-np.eye(2)).tolist()},
        "edges": [{"u": "v1", "v": "v2", "gain": "+1"}, {"u": "v1", "v": "v3", "gain": "+1"},
                  {"u": "v2", "v": "v3", "gain": "+1"}, {"u": "v1", "v": "v1", "gain": "-1"},
                  {"u": "v2", "v": "v3", "gain": "-1"}, {"u": "v3", "v": "v3", "gain": "-1"}],
    },
    "c4-square": {
        "group": {"name": "C4"}, "dimension": 2, "vertices": ["v"],
        "point_group": lambda: {e: _rot(np.pi * a / 2) for a, e in enumerate(("e", "r", "r2", "r3"))},
        "edges": [{"u": "v", "v": "v", "gain": "r", "sign": 1}, {"u": "v", "v": "v", "gain": "r2", "sign": -1}],
    },
    "q8-cross": {
        "group": {"name": "Q8"}, "dimension": 4, "vertices": ["v"],
        "point_group": None,
        "edges": [{"u": "v", "v": "v", "gain": "-1", "sign": -1}, {"u": "v", "v": "v", "gain": "i", "sign": 1},
                  {"u": "v", "v": "v", "gain": "j", "sign": 1}, {"u": "v", "v": "v", "gain": "k", "sign": 1}],
    },
}


def generate_instance(template: str, seed: int) -> dict:
    """Random instance from a template: representatives uniform in [-1, 1]^d."""
    if template not in TEMPLATES:
        raise KeyError(f"unknown template {template!r}; known: {', '.join(sorted(TEMPLATES))}")
    t = TEMPLATES[template]
    rng = np.random.default_rng(seed)
    if t["point_group"] is None:
        G = catalogue_group(t["group"]["name"])
        H = catalogue_irreps(G)[-1]
        pg = {e: H.matrices[i].tolist() for i, e in enumerate(G.elements)}
    else:
        pg = t["point_group"]()
    d = t["dimension"]
    reps = {v: [float(x) for x in rng.uniform(-1.0, 1.0, d)] for v in t["vertices"]}
    data = {
        "version": SCHEMA_VERSION,
        "name": f"{template}-seed{seed}",
        "group": dict(t["group"]),
        "dimension": d,
        "point_group": {e: [[float(x) for x in row] for row in M] for e, M in pg.items()},
        "vertices": list(t["vertices"]),
        "edges": [dict(e) for e in t["edges"]],
        "configuration": {"representatives": reps},
    }
    parse_instance_data(data)
    return data
