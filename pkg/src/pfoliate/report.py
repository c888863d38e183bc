"""JSON encoding of command results.

Polynomials and derivations are rendered as text, rationals as an integer
or ``{"num", "den"}``.  Floats never appear.
"""
from __future__ import annotations

import dataclasses
import enum
import json
from fractions import Fraction
from importlib import resources
from typing import Any

from .derivation import Derivation
from .gfpoly import Poly


def encode(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports")
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else {"num": obj.numerator, "den": obj.denominator}
    if isinstance(obj, enum.Enum):
        return encode(obj.value)
    if isinstance(obj, (Poly, Derivation)):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=str) if isinstance(obj, (set, frozenset)) else obj
        return [encode(v) for v in items]
    if hasattr(obj, "describe"):
        return encode(obj.describe())
    if dataclasses.is_dataclass(obj):
        return {f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def envelope(command: str, p: int | None, ok: bool, result: Any, verdict: str | None = None,
             error: dict | None = None) -> dict:
    out = {"command": command, "p": p, "ok": ok, "result": encode(result)}
    if verdict is not None:
        out["verdict"] = verdict
    if error is not None:
        out["error"] = error
    return out


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True)


def schema() -> dict:
    return json.loads(resources.files("pfoliate").joinpath("report_schema.json").read_text())
