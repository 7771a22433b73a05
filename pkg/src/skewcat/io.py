"""JSON documents for every exchanged object, validated with JSON Schema.

Every loader raises :class:`InputError` whose message starts with a
``$``-rooted path to the offending value.
"""
from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .algebra import FiniteSkewLattice, SkewHom
from .bundles import Bundle, Section, SheafMorphism, is_section_of
from .constructions import GeneratorConfig
from .errors import SkewcatError, TableError
from .order import FinitePoset

_INT = {"type": "integer", "minimum": 0}
_TABLE = {"type": "array", "items": {"type": "array", "items": _INT}}
_BOOL_MATRIX = {"type": "array", "items": {"type": "array", "items": {"type": "boolean"}}}

ALGEBRA_SCHEMA = {
    "type": "object",
    "required": ["size", "zero", "meet", "join"],
    "properties": {"size": {"type": "integer", "minimum": 1}, "zero": _INT, "meet": _TABLE, "join": _TABLE},
}
HOM_SCHEMA = {
    "type": "object",
    "required": ["map"],
    "properties": {"map": {"type": "array", "items": _INT}},
}
POSET_SCHEMA = {
    "type": "object",
    "required": ["points", "leq"],
    "properties": {"points": _INT, "leq": _BOOL_MATRIX},
}
BUNDLE_SCHEMA = {
    "type": "object",
    "required": ["poset", "stalks"],
    "properties": {
        "poset": POSET_SCHEMA,
        "stalks": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "hom_labels": {"type": "array", "items": {"type": "array", "items": {"enum": [0, 1]}}},
        "class_reps": {"type": "array", "items": {"type": "array", "items": _INT}},
    },
}
SECTION_SCHEMA = {
    "type": "object",
    "required": ["domain", "values"],
    "properties": {
        "domain": {"type": "array", "items": _INT},
        "values": {"type": "object", "patternProperties": {"^[0-9]+$": _INT}, "additionalProperties": False},
    },
}
MORPHISM_SCHEMA = {
    "type": "object",
    "required": ["base_map", "fiber_maps"],
    "properties": {"base_map": {"type": "array", "items": _INT}, "fiber_maps": _TABLE},
}
CONFIG_SCHEMA = {
    "type": "object",
    "required": ["seed"],
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "caps": {
            "type": "object",
            "properties": {
                k: {"type": "integer", "minimum": 1}
                for k in ("max_base_points", "max_stalk", "max_generators", "max_closure_size")
            },
            "additionalProperties": False,
        },
    },
}


class InputError(SkewcatError):
    """Malformed input document; ``path`` locates the problem."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def check_schema(obj, schema: dict, root: str = "$") -> None:
    err = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(schema).iter_errors(obj))
    if err is not None:
        raise InputError(root + _path(err.absolute_path)[1:], err.message)


def _square(obj, key: str, n: int) -> None:
    rows = obj[key]
    if len(rows) != n:
        raise InputError(f"$.{key}", f"expected {n} rows, got {len(rows)}")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise InputError(f"$.{key}[{i}]", f"expected {n} entries, got {len(row)}")
        for j, v in enumerate(row):
            if v >= n:
                raise InputError(f"$.{key}[{i}][{j}]", f"{v} is out of range 0..{n - 1}")


# -- per-type loaders -------------------------------------------------------

def algebra_from_json(obj) -> FiniteSkewLattice:
    """Tables only; the axioms are checked by the caller (a law failure is not an input error)."""
    check_schema(obj, ALGEBRA_SCHEMA)
    n = obj["size"]
    _square(obj, "meet", n)
    _square(obj, "join", n)
    if obj["zero"] >= n:
        raise InputError("$.zero", f"{obj['zero']} is out of range 0..{n - 1}")
    return FiniteSkewLattice(obj["meet"], obj["join"], obj["zero"])


def hom_from_json(obj, source: FiniteSkewLattice, target: FiniteSkewLattice) -> SkewHom:
    check_schema(obj, HOM_SCHEMA)
    try:
        return SkewHom(source, target, tuple(obj["map"]))
    except TableError as exc:
        raise InputError("$.map", str(exc)) from None


def poset_from_json(obj, root: str = "$") -> FinitePoset:
    """Raises :class:`NotAPoset` (a law failure) if the relation is not an order."""
    check_schema(obj, POSET_SCHEMA, root)
    n = obj["points"]
    if len(obj["leq"]) != n:
        raise InputError(f"{root}.leq", f"expected {n} rows, got {len(obj['leq'])}")
    for i, row in enumerate(obj["leq"]):
        if len(row) != n:
            raise InputError(f"{root}.leq[{i}]", f"expected {n} entries, got {len(row)}")
    return FinitePoset(tuple(tuple(r) for r in obj["leq"]))


def bundle_from_json(obj) -> Bundle:
    check_schema(obj, BUNDLE_SCHEMA)
    X = poset_from_json(obj["poset"], "$.poset")
    if len(obj["stalks"]) != X.n:
        raise InputError("$.stalks", f"expected {X.n} stalk sizes, got {len(obj['stalks'])}")
    return Bundle(X, tuple(obj["stalks"]))


def section_from_json(obj, B: Bundle) -> Section:
    check_schema(obj, SECTION_SCHEMA)
    vals = [-1] * B.m
    for x in obj["domain"]:
        if x >= B.m:
            raise InputError("$.domain", f"point {x} is not in the base")
        if str(x) not in obj["values"]:
            raise InputError("$.values", f"no value at point {x}")
        vals[x] = obj["values"][str(x)]
    if set(obj["values"]) != {str(x) for x in obj["domain"]}:
        raise InputError("$.values", "keys differ from the domain")
    s = Section(tuple(vals))
    if not is_section_of(B, s):
        raise InputError("$", "not a section over a downset")
    return s


def morphism_from_json(obj, E: Bundle, F: Bundle) -> SheafMorphism:
    check_schema(obj, MORPHISM_SCHEMA)
    try:
        return SheafMorphism(E, F, tuple(obj["base_map"]), tuple(tuple(r) for r in obj["fiber_maps"]))
    except TableError as exc:
        raise InputError("$", str(exc)) from None


def config_from_json(obj) -> GeneratorConfig:
    check_schema(obj, CONFIG_SCHEMA)
    return GeneratorConfig.from_json(obj)


# -- documents --------------------------------------------------------------

def kind_of(obj) -> str:
    """'algebra', 'bundle' or 'poset', from the top-level keys."""
    if not isinstance(obj, dict):
        raise InputError("$", "expected a JSON object")
    if "meet" in obj or "join" in obj:
        return "algebra"
    if "stalks" in obj:
        return "bundle"
    if "leq" in obj:
        return "poset"
    raise InputError("$", "cannot tell the document type (expected meet/join, stalks or leq)")


def load_any(obj):
    kind = kind_of(obj)
    return kind, {"algebra": algebra_from_json, "bundle": bundle_from_json, "poset": poset_from_json}[kind](obj)


def read_json(path: str | Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError("$", f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("$", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def dumps(obj) -> str:
    return json.dumps(obj, indent=None, separators=(",", ":"))
