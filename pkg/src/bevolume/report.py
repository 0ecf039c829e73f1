"""Check reports and the pass/fail tolerance policy."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence, Union

import numpy as np

WorstPoint = Union[float, tuple[float, float], None]


@dataclass(frozen=True)
class Tolerance:
    """``lhs <= rhs + abs + rel * |rhs|`` counts as satisfied."""

    abs: float = 1e-9
    rel: float = 1e-7

    def slack(self, lhs, rhs):
        rhs = np.asarray(rhs, dtype=float)
        return rhs + self.abs + self.rel * np.abs(rhs) - np.asarray(lhs, dtype=float)


DEFAULT_TOLERANCE = Tolerance()
# where a finite difference supplies the left-hand side
DERIVATIVE_TOLERANCE = Tolerance(abs=1e-9, rel=1e-4)


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    parameters: Mapping[str, Any]
    lhs: float
    rhs: float
    margin: float
    worst_point: WorstPoint
    passed: bool
    resolution: Mapping[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()
    outcome: str = ""

    def __post_init__(self):
        if not self.outcome:
            object.__setattr__(self, "outcome", "pass" if self.passed else "fail")

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check_name,
            "parameters": dict(self.parameters),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "worst_point": self.worst_point,
            "pass": self.passed,
            "outcome": self.outcome,
            "resolution": dict(self.resolution),
            "notes": list(self.notes),
        }


def scalar_report(
    name: str,
    parameters: Mapping[str, Any],
    lhs: float,
    rhs: float,
    tolerance: Tolerance = DEFAULT_TOLERANCE,
    worst_point: WorstPoint = None,
    resolution: Optional[Mapping[str, Any]] = None,
    extra_conditions: Sequence[tuple[str, bool]] = (),
    notes: Sequence[str] = (),
) -> CheckReport:
    """Report for a single inequality, optionally AND-ed with side conditions.

    A failed side condition is named in ``notes``.
    """
    ok = bool(tolerance.slack(lhs, rhs) >= 0)
    notes = list(notes)
    for label, cond in extra_conditions:
        if not cond:
            ok = False
            notes.append(f"side condition failed: {label}")
    res = {"tol_abs": tolerance.abs, "tol_rel": tolerance.rel}
    res.update(resolution or {})
    return CheckReport(
        check_name=name,
        parameters=dict(parameters),
        lhs=float(lhs),
        rhs=float(rhs),
        margin=float(rhs - lhs),
        worst_point=worst_point,
        passed=ok,
        resolution=res,
        notes=tuple(notes),
    )


def pointwise_report(
    name: str,
    parameters: Mapping[str, Any],
    grid: Sequence[float],
    lhs: Sequence[float],
    rhs: Sequence[float],
    tolerance: Tolerance = DEFAULT_TOLERANCE,
    resolution: Optional[Mapping[str, Any]] = None,
    notes: Sequence[str] = (),
) -> CheckReport:
    """Report on ``lhs[i] <= rhs[i]`` over a grid; the worst point has least slack.

    An empty grid is a vacuous pass with zero sides.
    """
    grid = np.asarray(grid, dtype=float)
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    res = {"tol_abs": tolerance.abs, "tol_rel": tolerance.rel, "points": int(grid.size)}
    res.update(resolution or {})
    if grid.size == 0:
        return CheckReport(name, dict(parameters), 0.0, 0.0, 0.0, None, True, res,
                           tuple(notes) + ("vacuous: no active grid points",))
    slack = tolerance.slack(lhs, rhs)
    i = int(np.argmin(slack))
    return CheckReport(
        check_name=name,
        parameters=dict(parameters),
        lhs=float(lhs[i]),
        rhs=float(rhs[i]),
        margin=float(rhs[i] - lhs[i]),
        worst_point=float(grid[i]),
        passed=bool(np.all(slack >= 0)),
        resolution=res,
        notes=tuple(notes),
    )
