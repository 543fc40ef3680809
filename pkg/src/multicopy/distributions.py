"""Outcome distributions over half-integer measurement values.

Outcomes are stored as ``twice_m`` integers so that half-integer values are
represented exactly; reports render them as exact halves (``"-3/2"``, ``"0"``,
``"1/2"``), and ``0 * ln 0`` is taken as 0 in all entropies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

__all__ = [
    "OutcomeDistribution",
    "ObservableSummary",
    "shannon_entropy",
    "format_half",
    "parse_half",
]


def shannon_entropy(probs: Iterable[float]) -> float:
    """Shannon entropy in nats with the continuous extension at zero."""
    total = 0.0
    for p in probs:
        if p > 0.0:
            total -= p * math.log(p)
    return total


def format_half(twice_m: int) -> str:
    """Render ``twice_m / 2`` as an exact half: ``-3/2``, ``0``, ``2``."""
    if twice_m % 2 == 0:
        return str(twice_m // 2)
    return f"{twice_m}/2"


def parse_half(label: str) -> int:
    """Inverse of :func:`format_half`; also accepts plain numerics like ``1.5``."""
    text = str(label).strip()
    if "/" in text:
        num, den = text.split("/", 1)
        if int(den) != 2:
            raise ValueError(f"half-integer label {label!r} must have denominator 2")
        return int(num)
    value = float(text)
    twice = round(2 * value)
    if abs(2 * value - twice) > 1e-9:
        raise ValueError(f"label {label!r} is not a half-integer")
    return int(twice)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of half-integer outcomes, keyed by ``twice_m``."""

    probs: Mapping[int, float] = field(default_factory=dict)
    tail_mass: float = 0.0

    def __post_init__(self) -> None:
        cleaned = {}
        for key in sorted(self.probs):
            p = float(self.probs[key])
            if p < -1e-12:
                raise ValueError(f"negative probability {p} at outcome {key}")
            cleaned[int(key)] = max(p, 0.0)
        object.__setattr__(self, "probs", cleaned)

    def probability(self, twice_m: int) -> float:
        return self.probs.get(twice_m, 0.0)

    def support(self) -> list[int]:
        return sorted(k for k, p in self.probs.items() if p > 0.0)

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def entropy(self) -> float:
        """Shannon entropy in nats."""
        return shannon_entropy(self.probs.values())

    def entropy_bits(self) -> float:
        return self.entropy() / math.log(2.0)

    def mean(self) -> float:
        return float(sum((k / 2.0) * p for k, p in self.probs.items()))

    def variance(self) -> float:
        """Second moment around zero, ``sum m^2 p_m`` with ``m = twice_m / 2``."""
        return float(sum((k / 2.0) ** 2 * p for k, p in self.probs.items()))

    def tv_distance(self, other: "OutcomeDistribution") -> float:
        keys = set(self.probs) | set(other.probs)
        return 0.5 * sum(abs(self.probability(k) - other.probability(k)) for k in keys)

    def trimmed(self, eps: float = 0.0) -> "OutcomeDistribution":
        return OutcomeDistribution(
            {k: p for k, p in self.probs.items() if p > eps}, self.tail_mass
        )

    def as_half_labels(self) -> dict[str, float]:
        """JSON-friendly map from exact-half labels to probabilities."""
        return {format_half(k): p for k, p in sorted(self.probs.items())}

    @classmethod
    def from_half_labels(
        cls, data: Mapping[str, float], tail_mass: float = 0.0
    ) -> "OutcomeDistribution":
        return cls({parse_half(k): float(p) for k, p in data.items()}, tail_mass)


@dataclass(frozen=True)
class ObservableSummary:
    """Entropy (nats) and variance of a measured observable, with its distribution."""

    entropy_nats: float
    variance: float
    distribution: OutcomeDistribution
