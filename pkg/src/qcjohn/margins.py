"""Per-sample margin reports shared by the verification checks."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class MarginSample:
    """One verified sample: slack on each side of a two-sided inequality.

    One-sided checks put ``math.inf`` in the unused slot.
    """

    z: complex
    lower: float
    upper: float
    passed: bool


@dataclass(frozen=True)
class MarginReport:
    label: str
    tol: float
    samples: tuple

    @property
    def all_pass(self) -> bool:
        return all(s.passed for s in self.samples)

    @property
    def failures(self) -> tuple:
        return tuple(s for s in self.samples if not s.passed)

    @property
    def worst_lower(self) -> float:
        return min((s.lower for s in self.samples), default=math.inf)

    @property
    def worst_upper(self) -> float:
        return min((s.upper for s in self.samples), default=math.inf)

    def to_jsonable(self) -> list:
        out = []
        for s in self.samples:
            out.append({
                "z": [s.z.real, s.z.imag],
                "lower": _num(s.lower),
                "upper": _num(s.upper),
                "pass": s.passed,
            })
        return out

    def summary(self) -> dict:
        return {
            "label": self.label,
            "samples": len(self.samples),
            "pass": self.all_pass,
            "worst_lower": _num(self.worst_lower),
            "worst_upper": _num(self.worst_upper),
        }


def _num(x: float):
    """JSON-safe number: infinities become strings, finite floats pass through."""
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return float(x)
