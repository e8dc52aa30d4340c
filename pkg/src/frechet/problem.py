"""JSON problem files: schemas, loading, and validation."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import jsonschema

VERSION = 1

KINDS = (
    "generates-query",
    "apply-query",
    "solve-query",
    "montel-system",
    "counterexample-query",
    "trace-query",
)

_RATIONAL = {"type": "string", "pattern": r"^\s*[-+]?\d+(\s*/\s*[-+]?\d+)?\s*$"}
_INT_VECTOR = {"type": "array", "items": {"type": "integer"}}

DEFINITIONS = {
    "rational": _RATIONAL,
    "scalar": {
        "type": "object",
        "properties": {"re": {"$ref": "#/definitions/rational"}, "im": {"$ref": "#/definitions/rational"}},
        "required": ["re", "im"],
        "additionalProperties": False,
    },
    "polynomial": {
        "type": "array",
        "items": {
            "type": "object",
            "properties": {
                "exps": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "coeff": {"$ref": "#/definitions/scalar"},
            },
            "required": ["exps", "coeff"],
            "additionalProperties": False,
        },
    },
    "exppoly": {
        "type": "array",
        "items": {
            "type": "object",
            "properties": {
                "freq": {"type": "array", "items": {"$ref": "#/definitions/scalar"}},
                "poly": {"$ref": "#/definitions/polynomial"},
            },
            "required": ["freq", "poly"],
            "additionalProperties": False,
        },
    },
    "group": {
        "type": "object",
        "properties": {
            "free_rank": {"type": "integer", "minimum": 0},
            "torsion": {"type": "array", "items": {"type": "integer", "minimum": 2}},
        },
        "required": ["free_rank"],
        "additionalProperties": False,
    },
    "element": {
        "oneOf": [
            _INT_VECTOR,
            {
                "type": "object",
                "properties": {"free": _INT_VECTOR, "torsion": _INT_VECTOR},
                "additionalProperties": False,
            },
        ]
    },
    "window": {
        "type": "object",
        "properties": {"lower": _INT_VECTOR, "upper": _INT_VECTOR},
        "required": ["lower", "upper"],
        "additionalProperties": False,
    },
    "grid": {
        "type": "object",
        "properties": {
            "window": {"$ref": "#/definitions/window"},
            "values": {"type": "array", "items": {"$ref": "#/definitions/scalar"}},
        },
        "required": ["window", "values"],
        "additionalProperties": False,
    },
    "chain": {"type": "array", "items": _INT_VECTOR},
    "system": {
        "type": "object",
        "properties": {
            "group": {"$ref": "#/definitions/group"},
            "n": {"type": "integer", "minimum": 1},
            "s": {"type": "integer", "minimum": 1},
            "steps": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/definitions/element"}}},
            "rhs": {"oneOf": [{"type": "null"}, {"type": "array", "items": {"$ref": "#/definitions/exppoly"}}]},
        },
        "required": ["group", "n", "s", "steps"],
        "additionalProperties": False,
    },
}

_HEADER = {
    "version": {"const": VERSION},
    "kind": {"enum": list(KINDS)},
}


def _schema(kind: str, properties: dict, required: list[str]) -> dict:
    return {
        "type": "object",
        "definitions": DEFINITIONS,
        "properties": {**_HEADER, "kind": {"const": kind}, **properties},
        "required": ["version", "kind", *required],
        "additionalProperties": False,
    }


SCHEMAS = {
    "generates-query": _schema(
        "generates-query",
        {"group": {"$ref": "#/definitions/group"},
         "steps": {"type": "array", "items": {"$ref": "#/definitions/element"}}},
        ["group", "steps"],
    ),
    "apply-query": _schema(
        "apply-query",
        {"chain": {"$ref": "#/definitions/chain"},
         "num_vars": {"type": "integer", "minimum": 1},
         "function": {"$ref": "#/definitions/exppoly"},
         "grid": {"$ref": "#/definitions/grid"},
         "at": {"type": "array", "items": _INT_VECTOR}},
        ["chain"],
    ),
    "solve-query": _schema(
        "solve-query",
        {"mode": {"enum": ["window", "ansatz"]},
         "num_vars": {"type": "integer", "minimum": 1},
         "equations": {"type": "array", "minItems": 1, "items": {
             "type": "object",
             "properties": {"chain": {"$ref": "#/definitions/chain"},
                            "rhs": {"oneOf": [{"type": "null"}, {"$ref": "#/definitions/exppoly"}]}},
             "required": ["chain"],
             "additionalProperties": False}},
         "window": {"$ref": "#/definitions/window"},
         "max_degree": {"type": "integer", "minimum": 0}},
        ["mode", "num_vars", "equations"],
    ),
    "montel-system": _schema(
        "montel-system",
        {**DEFINITIONS["system"]["properties"],
         "window": {"$ref": "#/definitions/window"},
         "frequencies": {"type": "array", "items": {"type": "array", "items": {"$ref": "#/definitions/scalar"}}}},
        ["group", "n", "s", "steps"],
    ),
    "counterexample-query": _schema(
        "counterexample-query",
        {"group": {"$ref": "#/definitions/group"},
         "steps": {"type": "array", "items": {"$ref": "#/definitions/element"}},
         "window": {"$ref": "#/definitions/window"},
         "max_order": {"type": "integer", "minimum": 1}},
        ["group", "steps"],
    ),
    "trace-query": _schema(
        "trace-query",
        {"system": {"$ref": "#/definitions/system"},
         "f": {"$ref": "#/definitions/exppoly"},
         "tuple": _INT_VECTOR,
         "full": {"type": "boolean"}},
        ["system", "f"],
    ),
}


class ProblemError(ValueError):
    """A problem file is unreadable or fails schema validation."""


def validate(doc, kind: str | None = None) -> dict:
    if not isinstance(doc, dict):
        raise ProblemError("problem file must contain a JSON object")
    found = doc.get("kind")
    if found not in SCHEMAS:
        raise ProblemError(f"unknown or missing kind {found!r}; expected one of {', '.join(KINDS)}")
    if kind is not None and found != kind:
        raise ProblemError(f"this command expects a {kind} file, got {found}")
    try:
        jsonschema.validate(doc, SCHEMAS[found])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ProblemError(f"schema error at {where}: {exc.message}") from None
    return doc


def load(path: str, kind: str | None = None) -> dict:
    try:
        text = Path(path).read_text() if path != "-" else sys.stdin.read()
    except OSError as exc:
        raise ProblemError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"malformed JSON in {path}: {exc}") from None
    return validate(doc, kind)


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
