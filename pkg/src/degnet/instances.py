"""JSON instance files: graphs with requirements and groups, tree decompositions, labeling instances."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import jsonschema

from .graph import Graph, Requirements, id_key
from .gst import GSTProblem, TreeDecomposition
from .treelabel import LabelTreeInstance

_number = {"oneOf": [{"type": "number"}, {"type": "string", "pattern": r"^-?\d+(/\d+|\.\d+)?$"}]}
_vertex = {"type": ["integer", "string"]}

GRAPH_SCHEMA = {
    "type": "object",
    "required": ["vertices", "edges"],
    "properties": {
        "vertices": {"type": "array", "items": _vertex},
        "edges": {"type": "array", "items": {
            "type": "object", "required": ["id", "u", "v"],
            "properties": {"id": _vertex, "u": _vertex, "v": _vertex, "cost": _number}}},
        "requirements": {"type": "array", "items": {
            "type": "object", "required": ["u", "v", "r"],
            "properties": {"u": _vertex, "v": _vertex, "r": {"type": "integer", "minimum": 0}}}},
        "degree_bounds": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
        "groups": {"type": "array", "items": {"type": "array", "items": _vertex}},
        "root": _vertex,
        "p": {"type": "integer", "minimum": 1},
        "A": _number,
        "Ap": _number,
        "mode": {"enum": ["snd", "mst"]},
    },
}

DECOMPOSITION_SCHEMA = {
    "type": "object",
    "required": ["bags", "root_bag"],
    "properties": {
        "bags": {"type": "array", "items": {
            "type": "object", "required": ["id", "vertices"],
            "properties": {"id": _vertex, "vertices": {"type": "array", "items": _vertex},
                           "parent": {"type": ["integer", "string", "null"]}}}},
        "root_bag": _vertex,
    },
}

LABELING_SCHEMA = {
    "type": "object",
    "required": ["root", "labels"],
    "properties": {
        "root": {"type": "string"},
        "children": {"type": "object", "additionalProperties": {"type": "array", "items": {"type": "string"}}},
        "labels": {"type": "object", "additionalProperties": {"type": "array", "items": {"type": "string"}}},
        "gamma": {"type": "object", "additionalProperties": {
            "type": "array", "items": {"type": "array", "items": {"type": "string"}}}},
        "groups": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
        "costs": {"type": "array", "items": {"type": "object", "additionalProperties": _number}},
    },
}


class InstanceError(ValueError):
    """Malformed instance file; the message names the offending field."""


def to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value))


def fraction_text(value) -> str:
    if value == math.inf:
        return "inf"
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def _validate(data, schema, what: str) -> None:
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as err:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise InstanceError(f"{what}: field {where}: {err.message}") from None


def _read(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InstanceError(f"no such file: {path}") from None
    except json.JSONDecodeError as err:
        raise InstanceError(f"{path}: invalid JSON ({err})") from None


@dataclass
class Instance:
    graph: Graph
    requirements: Requirements
    degree_bounds: dict = field(default_factory=dict)
    groups: list = field(default_factory=list)
    root: object = None
    p: int = 1
    A: object = None
    budget: Fraction | None = None
    mode: str = "snd"

    def power_budget(self) -> Fraction:
        from .relaxation import power_budget
        if self.budget is not None:
            return self.budget
        if self.A is None:
            raise InstanceError("instance needs A (or Ap) for the degree budget")
        return power_budget(self.A, self.p)

    def gst_problem(self) -> GSTProblem:
        if self.root is None:
            raise InstanceError("instance needs a root for group Steiner tree")
        return GSTProblem(self.graph, self.root, self.groups, dict(self.degree_bounds))


def instance_from_dict(data: dict) -> Instance:
    _validate(data, GRAPH_SCHEMA, "instance")
    vertices = data["vertices"]
    by_text = {str(v): v for v in vertices}
    try:
        g = Graph(vertices, [(e["id"], e["u"], e["v"]) for e in data["edges"]],
                  {e["id"]: to_fraction(e.get("cost", 1)) for e in data["edges"]})
        r = Requirements()
        for item in data.get("requirements", []):
            r.set(item["u"], item["v"], item["r"])
    except (ValueError, KeyError) as err:
        raise InstanceError(f"instance: {err}") from None
    bounds = {}
    for key, value in data.get("degree_bounds", {}).items():
        if key not in by_text:
            raise InstanceError(f"instance: field degree_bounds/{key}: unknown vertex")
        bounds[by_text[key]] = value
    for i, grp in enumerate(data.get("groups", [])):
        for v in grp:
            if v not in g.incident:
                raise InstanceError(f"instance: field groups/{i}: unknown vertex {v!r}")
    root = data.get("root")
    if root is not None and root not in g.incident:
        raise InstanceError("instance: field root: unknown vertex")
    A = data.get("A")
    budget = to_fraction(data["Ap"]) if "Ap" in data else None
    if isinstance(A, str):
        A = to_fraction(A)
    return Instance(g, r, bounds, [list(s) for s in data.get("groups", [])], root,
                    data.get("p", 1), A, budget, data.get("mode", "snd"))


def instance_to_dict(inst: Instance) -> dict:
    g = inst.graph
    out = {
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "u": e.u, "v": e.v, "cost": fraction_text(g.costs[e.id])} for e in g.edges],
        "requirements": [{"u": u, "v": v, "r": r} for u, v, r in inst.requirements.pairs()],
        "p": inst.p,
        "mode": inst.mode,
    }
    if inst.degree_bounds:
        out["degree_bounds"] = {str(v): int(b) for v, b in sorted(inst.degree_bounds.items(), key=lambda kv: id_key(kv[0]))
                                if b != math.inf}
    if inst.groups:
        out["groups"] = [list(s) for s in inst.groups]
    if inst.root is not None:
        out["root"] = inst.root
    if inst.A is not None:
        out["A"] = inst.A if isinstance(inst.A, (int, float)) else fraction_text(inst.A)
    if inst.budget is not None:
        out["Ap"] = fraction_text(inst.budget)
    return out


def load_instance(path) -> Instance:
    return instance_from_dict(_read(path))


def decomposition_from_dict(data: dict) -> TreeDecomposition:
    _validate(data, DECOMPOSITION_SCHEMA, "decomposition")
    bags = {b["id"]: b["vertices"] for b in data["bags"]}
    parent = {b["id"]: b.get("parent") for b in data["bags"]}
    if data["root_bag"] not in bags:
        raise InstanceError("decomposition: field root_bag: unknown bag")
    if parent[data["root_bag"]] is not None:
        raise InstanceError("decomposition: field root_bag: the root bag cannot have a parent")
    try:
        return TreeDecomposition(bags, parent, data["root_bag"])
    except ValueError as err:
        raise InstanceError(f"decomposition: {err}") from None


def decomposition_to_dict(td: TreeDecomposition) -> dict:
    return {"bags": [{"id": b, "vertices": sorted(td.bags[b], key=id_key), "parent": td.parent[b]}
                     for b in td.preorder()],
            "root_bag": td.root}


def load_decomposition(path) -> TreeDecomposition:
    return decomposition_from_dict(_read(path))


def labeling_from_dict(data: dict) -> LabelTreeInstance:
    _validate(data, LABELING_SCHEMA, "labeling instance")
    try:
        return LabelTreeInstance(
            data["root"], data.get("children", {}), data["labels"], data.get("gamma", {}),
            data.get("groups", []), [{l: to_fraction(c) for l, c in t.items()} for t in data.get("costs", [])])
    except ValueError as err:
        raise InstanceError(f"labeling instance: {err}") from None


def labeling_to_dict(inst: LabelTreeInstance) -> dict:
    return {
        "root": inst.root,
        "children": {u: list(k) for u, k in inst.children.items() if k},
        "labels": {u: list(ls) for u, ls in inst.labels.items()},
        "gamma": {u: sorted(list(t) for t in ts) for u, ts in inst.gamma.items()},
        "groups": [sorted(s) for s in inst.groups],
        "costs": [{l: fraction_text(c) for l, c in sorted(t.items())} for t in inst.costs],
    }


def load_labeling(path) -> LabelTreeInstance:
    return labeling_from_dict(_read(path))


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
