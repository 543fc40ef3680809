"""Parsing of JSON state-specification documents.

A state document is an object ``{"kind": ..., parameters...}`` where complex
parameters are encoded as two-element arrays ``[re, im]`` (plain numbers are
accepted as purely real).  The per-mode cutoff is supplied per request, not in
the document.  Supported kinds::

    {"kind": "vacuum"}
    {"kind": "fock", "n": 1}
    {"kind": "coherent", "alpha": [0.5, 0.0]}
    {"kind": "squeezed", "s": [0.4, 0.0]}
    {"kind": "thermal", "mean_n": 1.0}
    {"kind": "displaced_squeezed_thermal",
     "alpha": [1.0, 0.0], "s": [0.3, 0.0], "mean_n": 0.2}
    {"kind": "mixture",
     "components": [{"weight": 0.5, "state": {"kind": "fock", "n": 0}},
                    {"weight": 0.5, "state": {"kind": "fock", "n": 1}}]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Mapping

__all__ = ["StateSpec", "StateSpecError", "parse_complex", "complex_to_json"]

KINDS = (
    "vacuum",
    "fock",
    "coherent",
    "squeezed",
    "thermal",
    "mixture",
    "displaced_squeezed_thermal",
)


class StateSpecError(ValueError):
    """Malformed state-specification document."""


def parse_complex(value: Any, field: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if (
        isinstance(value, (list, tuple))
        and len(value) == 2
        and all(isinstance(v, (int, float)) for v in value)
    ):
        return complex(value[0], value[1])
    raise StateSpecError(f"field {field!r}: expected a number or [re, im], got {value!r}")


def complex_to_json(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _require(data: Mapping[str, Any], field: str) -> Any:
    if field not in data:
        raise StateSpecError(f"missing required field {field!r}")
    return data[field]


@dataclass(frozen=True)
class StateSpec:
    """Validated state description: a kind plus its parameters."""

    kind: str
    params: tuple[tuple[str, Any], ...] = ()

    @property
    def param_dict(self) -> dict[str, Any]:
        return dict(self.params)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "StateSpec":
        if not isinstance(data, Mapping):
            raise StateSpecError(f"state document must be an object, got {type(data).__name__}")
        kind = _require(data, "kind")
        if kind not in KINDS:
            raise StateSpecError(f"unknown state kind {kind!r}; expected one of {KINDS}")
        params: list[tuple[str, Any]] = []
        if kind == "fock":
            n = _require(data, "n")
            if not isinstance(n, int) or n < 0:
                raise StateSpecError(f"field 'n': expected a nonnegative integer, got {n!r}")
            params.append(("n", n))
        elif kind == "coherent":
            params.append(("alpha", parse_complex(_require(data, "alpha"), "alpha")))
        elif kind == "squeezed":
            params.append(("s", parse_complex(_require(data, "s"), "s")))
        elif kind == "thermal":
            mean_n = _require(data, "mean_n")
            if not isinstance(mean_n, (int, float)) or mean_n < 0:
                raise StateSpecError(f"field 'mean_n': expected a number >= 0, got {mean_n!r}")
            params.append(("mean_n", float(mean_n)))
        elif kind == "displaced_squeezed_thermal":
            params.append(("alpha", parse_complex(data.get("alpha", 0.0), "alpha")))
            params.append(("s", parse_complex(data.get("s", 0.0), "s")))
            mean_n = data.get("mean_n", 0.0)
            if not isinstance(mean_n, (int, float)) or mean_n < 0:
                raise StateSpecError(f"field 'mean_n': expected a number >= 0, got {mean_n!r}")
            params.append(("mean_n", float(mean_n)))
        elif kind == "mixture":
            raw = _require(data, "components")
            if not isinstance(raw, (list, tuple)) or not raw:
                raise StateSpecError("field 'components': expected a nonempty array")
            comps = []
            total = 0.0
            for i, item in enumerate(raw):
                if not isinstance(item, Mapping):
                    raise StateSpecError(f"components[{i}]: expected an object")
                weight = _require(item, "weight")
                if not isinstance(weight, (int, float)) or weight < 0:
                    raise StateSpecError(
                        f"components[{i}].weight: expected a number >= 0, got {weight!r}"
                    )
                total += float(weight)
                comps.append((float(weight), cls.from_dict(_require(item, "state"))))
            if abs(total - 1.0) > 1e-9:
                raise StateSpecError(f"mixture weights sum to {total}, expected 1")
            params.append(("components", tuple(comps)))
        return cls(kind, tuple(params))

    @classmethod
    def from_json(cls, text: str) -> "StateSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StateSpecError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind}
        for key, value in self.params:
            if isinstance(value, complex):
                out[key] = complex_to_json(value)
            elif key == "components":
                out[key] = [
                    {"weight": w, "state": sub.to_dict()} for w, sub in value
                ]
            else:
                out[key] = value
        return out
