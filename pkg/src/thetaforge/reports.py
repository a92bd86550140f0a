"""Residual records shared by every verification routine."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np

DEFAULT_TOL = 1e-8


def cpair(x) -> list[float]:
    return [float(np.real(x)), float(np.imag(x))]


def jsonable(obj: Any) -> Any:
    """Recursively convert numpy / complex / Fraction values for JSON output.

    Complex numbers become [re, im] pairs; rationals become "p/q" strings.
    """
    from fractions import Fraction

    from .characteristics import RationalVector

    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, RationalVector):
        return [str(x) for x in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return cpair(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def term_scale(*terms) -> float:
    """max(1, largest modulus among the compared terms)."""
    m = 1.0
    for t in terms:
        a = np.abs(np.asarray(t, dtype=complex))
        if a.size:
            m = max(m, float(a.max()))
    return m


def max_abs(x) -> float:
    a = np.abs(np.asarray(x, dtype=complex))
    return float(a.max()) if a.size else 0.0


@dataclass
class IdentityReport:
    identity: str
    genus: int
    level: int | None
    residual: float
    scale: float
    tolerance: float = DEFAULT_TOL
    seed: int | None = None
    inputs: dict = field(default_factory=dict)
    degraded: bool = False
    wall_time: float = 0.0
    passed: bool = field(init=False)

    def __post_init__(self):
        if not (self.residual >= 0) and not math.isnan(self.residual):
            raise ValueError("residual must be nonnegative")
        self.passed = bool(self.residual < self.tolerance)

    def escalate_degraded(self) -> None:
        """Fail a report computed with a capped truncation radius."""
        if self.degraded:
            self.passed = False

    def to_dict(self, *, with_time: bool = False) -> dict:
        d = {
            "identity": self.identity,
            "genus": self.genus,
            "level": self.level,
            "seed": self.seed,
            "inputs": jsonable(self.inputs),
            "residual": float(self.residual),
            "scale": float(self.scale),
            "tolerance": float(self.tolerance),
            "degraded": self.degraded,
            "pass": self.passed,
        }
        if with_time:
            d["wall_time"] = self.wall_time
        return d

    @classmethod
    def from_dict(cls, d: dict) -> IdentityReport:
        r = cls(
            identity=d["identity"],
            genus=d["genus"],
            level=d["level"],
            residual=d["residual"],
            scale=d["scale"],
            tolerance=d["tolerance"],
            seed=d.get("seed"),
            inputs=d.get("inputs", {}),
            degraded=d.get("degraded", False),
            wall_time=d.get("wall_time", 0.0),
        )
        r.passed = d["pass"]
        return r


def compare(
    identity: str,
    lhs,
    rhs,
    *,
    genus: int,
    level: int | None = None,
    terms: Iterable = (),
    tolerance: float = DEFAULT_TOL,
    inputs: dict | None = None,
    seed: int | None = None,
    degraded: bool = False,
) -> IdentityReport:
    """Relative max-norm residual |lhs - rhs| / max(1, max |term|)."""
    diff = max_abs(np.asarray(lhs, dtype=complex) - np.asarray(rhs, dtype=complex))
    scale = term_scale(lhs, rhs, *terms)
    return IdentityReport(
        identity,
        genus,
        level,
        diff / scale,
        scale,
        tolerance,
        seed,
        dict(inputs or {}),
        degraded,
    )
