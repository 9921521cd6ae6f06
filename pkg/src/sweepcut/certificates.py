"""Machine-checkable inequality records and byte-stable JSON output."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .graph import InducedCut, VertexSet
from .spectral import VertexFunction

SCHEMA_VERSION = 1
TOLERANCE = 1e-9


@dataclass(frozen=True)
class Certificate:
    """One instance of an inequality ``lhs <= rhs``.

    ``applicable`` is False when a hypothesis of the inequality fails for
    this input; such a certificate holds vacuously. ``degenerate`` marks
    instances where the inequality is trivially true (for example an
    infinite right-hand side). ``witnesses`` maps names to the functions,
    sets, or arrays the values were computed from.
    """

    name: str
    lhs: float
    rhs: float
    constants: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict, repr=False)
    degenerate: bool = False
    applicable: bool = True

    @property
    def holds(self) -> bool:
        if not self.applicable:
            return True
        if math.isnan(self.lhs) or math.isnan(self.rhs):
            return False
        return self.lhs <= self.rhs + TOLERANCE

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "applicable": self.applicable,
            "degenerate": self.degenerate,
            "constants": dict(self.constants),
            "witness_digests": {k: digest(v) for k, v in self.witnesses.items()},
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _as_array(obj) -> np.ndarray:
    if isinstance(obj, VertexFunction):
        return obj.values
    if isinstance(obj, VertexSet):
        return obj.mask.astype(np.float64)
    if isinstance(obj, InducedCut):
        return obj.right.mask.astype(np.float64) - obj.left.mask.astype(np.float64)
    return np.asarray(obj, dtype=np.float64)


def digest(obj) -> str:
    """sha256 of the little-endian float64 bytes of a witness."""
    arr = np.ascontiguousarray(_as_array(obj), dtype="<f8")
    return hashlib.sha256(arr.tobytes()).hexdigest()


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % x


def _encode(obj: Any, indent: int | None, level: int) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, Certificate):
        obj = obj.to_dict()
    if indent is None:
        sep, pad, end = ", ", "", ""
    else:
        sep = ",\n" + " " * (indent * (level + 1))
        pad = "\n" + " " * (indent * (level + 1))
        end = "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items())
        return "{" + pad + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + pad + sep.join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int | None = None) -> str:
    """JSON text with floats at 17 significant digits and non-finite floats as strings."""
    return _encode(obj, indent, 0)
