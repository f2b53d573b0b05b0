"""Tri-state property reports returned by the checking routines."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional


class Verdict(str, Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"


@dataclass
class PropertyReport:
    name: str
    verdict: Verdict
    witness: Optional[dict] = None
    residual: float = 0.0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.verdict = Verdict(self.verdict)
        if self.verdict is Verdict.FAILS and self.witness is None:
            raise ValueError(f"report {self.name!r} fails without a witness")

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict is Verdict.FAILS

    def to_dict(self) -> dict:
        return {
            "property": self.name,
            "verdict": self.verdict.value,
            "witness": _jsonable(self.witness),
            "residual": float(self.residual),
            "details": _jsonable(self.details),
        }


def combine(name: str, reports, details=None) -> PropertyReport:
    """Conjunction of several reports; the first failing one supplies the witness."""
    reports = list(reports)
    residual = max((r.residual for r in reports), default=0.0)
    sub = {r.name: r.verdict.value for r in reports}
    for r in reports:
        if r.fails:
            witness = {"failed": r.name, **(r.witness or {})}
            return PropertyReport(name, Verdict.FAILS, witness, residual, {"parts": sub, **(details or {})})
    verdict = Verdict.HOLDS if all(r.holds for r in reports) else Verdict.UNKNOWN
    return PropertyReport(name, verdict, None, residual, {"parts": sub, **(details or {})})


def _jsonable(obj: Any):
    import numpy as np

    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, Enum):
        return obj.value
    return str(obj)
