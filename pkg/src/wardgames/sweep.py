"""Parameter sweeps and critical-threshold solving.

A dotted path like "interventions[0].penalty" addresses one numeric field of
a scenario; sweeps re-evaluate the equilibrium analysis across a grid of
values and the threshold solver bisects for the exact intervention strength
at which a named equilibrium predicate flips.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, is_dataclass, replace
from typing import Any, Callable

from .errors import BracketError, ScenarioError
from .equilibrium import enumerate_nash, is_nash
from .interventions import is_symmetric, payoff_tables
from .model import ActionProfile, Scenario

OBSERVABLES = ("nash_set", "classification", "welfare_gap", "flip_margins")

_PATH_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\[(\d+)\])?$")


@dataclass(frozen=True)
class SweepSpec:
    """What to sweep and what to record at each grid point.

    Provide either an explicit value list or a uniform grid (lo, hi, steps).
    """

    parameter_path: str
    lo: float | None = None
    hi: float | None = None
    steps: int | None = None
    values: tuple[float, ...] | None = None
    observables: tuple[str, ...] = OBSERVABLES

    def __post_init__(self) -> None:
        if self.values is not None:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))
            if not self.values:
                raise ScenarioError("explicit sweep values must be non-empty")
        else:
            if self.lo is None or self.hi is None or self.steps is None:
                raise ScenarioError("a sweep needs either values or lo/hi/steps")
            if not self.lo < self.hi:
                raise ScenarioError(f"need lo < hi, got lo={self.lo}, hi={self.hi}")
            if self.steps < 2:
                raise ScenarioError(f"steps must be >= 2, got {self.steps}")
        bad = [o for o in self.observables if o not in OBSERVABLES]
        if bad:
            raise ScenarioError(f"unknown observables {bad}; valid: {OBSERVABLES}")

    def grid(self) -> list[float]:
        if self.values is not None:
            return sorted(self.values)
        assert self.lo is not None and self.hi is not None and self.steps is not None
        span = self.hi - self.lo
        return [self.lo + span * i / (self.steps - 1) for i in range(self.steps)]


def _tokens(path: str) -> list[tuple[str, int | None]]:
    out = []
    for part in path.split("."):
        m = _PATH_TOKEN.match(part)
        if not m:
            raise ScenarioError(f"cannot parse parameter path segment {part!r} in {path!r}")
        out.append((m.group(1), int(m.group(2)) if m.group(2) else None))
    return out


def get_by_path(scenario: Scenario, path: str) -> float:
    """Resolve a dotted path to the numeric field it names."""
    obj: Any = scenario
    for name, idx in _tokens(path):
        if not hasattr(obj, name):
            raise ScenarioError(f"parameter path {path!r}: no field {name!r} on {type(obj).__name__}")
        obj = getattr(obj, name)
        if idx is not None:
            if not isinstance(obj, (tuple, list)):
                raise ScenarioError(f"parameter path {path!r}: {name!r} is not indexable")
            if idx >= len(obj):
                raise ScenarioError(f"parameter path {path!r}: index {idx} out of range")
            obj = obj[idx]
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ScenarioError(f"parameter path {path!r} does not name a numeric field")
    return obj


def set_by_path(scenario: Scenario, path: str, value: float) -> Scenario:
    """Return a new scenario with the addressed field replaced.

    Integer fields (e.g. a threshold tau) only accept whole values.
    """

    def build(obj: Any, toks: list[tuple[str, int | None]]) -> Any:
        if not toks:
            if isinstance(obj, bool) or not isinstance(obj, (int, float)):
                raise ScenarioError(
                    f"parameter path {path!r} does not name a numeric field"
                )
            if isinstance(obj, int):
                if float(value) != int(value):
                    raise ScenarioError(
                        f"parameter path {path!r} names an integer field; "
                        f"got {value}"
                    )
                return int(value)
            return float(value)
        name, idx = toks[0]
        if not is_dataclass(obj) or not hasattr(obj, name):
            raise ScenarioError(
                f"parameter path {path!r}: no field {name!r} on {type(obj).__name__}"
            )
        child = getattr(obj, name)
        if idx is not None:
            if not isinstance(child, (tuple, list)):
                raise ScenarioError(f"parameter path {path!r}: {name!r} is not indexable")
            if idx >= len(child):
                raise ScenarioError(f"parameter path {path!r}: index {idx} out of range")
            new_elem = build(child[idx], toks[1:])
            new_child: Any = tuple(
                new_elem if j == idx else e for j, e in enumerate(child)
            )
        else:
            new_child = build(child, toks[1:])
        return replace(obj, **{name: new_child})

    get_by_path(scenario, path)  # fail fast with a clear message
    return build(scenario, _tokens(path))


def _pole_margins(scenario: Scenario) -> list[float]:
    """Per-ward expose-minus-buffer gain against everyone else buffering,
    under the fully effective game (the canonical flip quantity)."""
    tables = payoff_tables(scenario)
    return [tables.gain_to_expose(i, 0) for i in range(scenario.n)]


def sweep_parameter(
    scenario: Scenario,
    spec: SweepSpec,
    epsilon: float = 0.0,
    workers: int | None = None,
) -> list[dict[str, Any]]:
    """Evaluate the requested observables at every grid value.

    Rows are ordered by value and fully recomputed per point.
    """
    rows = []
    for value in spec.grid():
        s = set_by_path(scenario, spec.parameter_path, value)
        row: dict[str, Any] = {"value": value}
        if {"nash_set", "classification", "welfare_gap"} & set(spec.observables):
            report = enumerate_nash(s, epsilon=epsilon, workers=workers)
            if "nash_set" in spec.observables:
                row["nash_set"] = [str(p) for p, _ in report.nash_profiles]
            if "classification" in spec.observables:
                row["classification"] = report.classification.value
            if "welfare_gap" in spec.observables:
                row["welfare_gap"] = report.welfare_gap
        if "flip_margins" in spec.observables:
            row["flip_margins"] = _pole_margins(s)
        rows.append(row)
    return rows


@dataclass(frozen=True)
class ThresholdResult:
    """Bisection output for a named predicate along one parameter.

    true_at_high records the orientation: the predicate held at the high end
    of the original bracket. analytic_value is attached when the flip margin
    is verifiably affine in the parameter (symmetric scenarios, epsilon 0).
    """

    critical_value: float
    predicate: str
    bracket: tuple[float, float]
    iterations: int
    analytic_value: float | None
    true_at_high: bool


def _pred_all_buffer_nash(s: Scenario, eps: float) -> bool:
    return is_nash(s, ActionProfile.all_buffer(s.n), eps).is_nash


def _pred_all_expose_nash(s: Scenario, eps: float) -> bool:
    return is_nash(s, ActionProfile.all_expose(s.n), eps).is_nash


PREDICATES: dict[str, Callable[[Scenario, float], bool]] = {
    "all_buffer_nash": _pred_all_buffer_nash,
    "all_buffer_not_nash": lambda s, e: not _pred_all_buffer_nash(s, e),
    "all_expose_nash": _pred_all_expose_nash,
    "all_expose_not_nash": lambda s, e: not _pred_all_expose_nash(s, e),
}


def normalize_predicate(name: str) -> str:
    key = re.sub(r"[\s\-]+", "_", name.strip().lower())
    key = re.sub(r"_is_", "_", key)
    if key not in PREDICATES:
        raise ScenarioError(
            f"unknown predicate {name!r}; valid: {sorted(PREDICATES)}"
        )
    return key


def _analytic_threshold(
    scenario: Scenario, path: str, predicate: str, lo: float, hi: float
) -> float | None:
    """Root of the relevant flip margin when it is affine in the parameter.

    The margin is the per-ward expose-minus-buffer gain at the pole profile
    the predicate tests: against all-buffer others for the all-buffer
    predicates (for a symmetric linear game this yields the closed forms
    F* = (c(E) - c(B) - B(1) + B(0)) / p for an observability penalty and
    delta_E* = c(E) - c(B) - B(1) + B(0) + delta_B for an effort delta), and
    against all-expose others for the all-expose predicates (cap* =
    c(B) + B(N) - B(N-1) for a mechanism cap). Verified by evaluation; None
    when the margin is not affine or the root lies outside the bracket.
    """
    if not is_symmetric(scenario):
        return None
    k_others = 0 if predicate.startswith("all_buffer") else scenario.n - 1

    def margin(v: float) -> float:
        tables = payoff_tables(set_by_path(scenario, path, v))
        return tables.gain_to_expose(0, k_others)

    m_lo, m_hi = margin(lo), margin(hi)
    if m_lo == m_hi:
        return None
    root = lo - m_lo * (hi - lo) / (m_hi - m_lo)
    if not lo <= root <= hi:
        return None
    scale = max(1.0, abs(m_lo), abs(m_hi))
    mid = 0.5 * (lo + hi)
    linear = abs(margin(mid) - 0.5 * (m_lo + m_hi)) <= 1e-9 * scale
    if not linear or abs(margin(root)) > 1e-9 * scale:
        return None
    return root


def critical_threshold(
    scenario: Scenario,
    parameter_path: str,
    lo: float,
    hi: float,
    predicate: str,
    epsilon: float = 0.0,
    tol: float = 1e-9,
) -> ThresholdResult:
    """Bisect for the parameter value where the predicate flips.

    The predicate must differ at the two ends of the bracket. Bisection
    narrows the bracket to `tol` and reports its midpoint; the boundary
    itself is evaluated with weak-Nash semantics.
    """
    if not lo < hi:
        raise ScenarioError(f"need lo < hi, got lo={lo}, hi={hi}")
    key = normalize_predicate(predicate)
    pred = PREDICATES[key]

    def at(v: float) -> bool:
        return pred(set_by_path(scenario, parameter_path, v), epsilon)

    p_lo, p_hi = at(lo), at(hi)
    if p_lo == p_hi:
        raise BracketError(
            f"predicate {key!r} is {p_lo} at both ends of [{lo}, {hi}]"
        )
    a, b = lo, hi
    iterations = 0
    while b - a > tol:
        mid = 0.5 * (a + b)
        iterations += 1
        if at(mid) == p_lo:
            a = mid
        else:
            b = mid
    analytic = None
    if epsilon == 0.0:
        analytic = _analytic_threshold(scenario, parameter_path, key, lo, hi)
    return ThresholdResult(
        critical_value=0.5 * (a + b),
        predicate=key,
        bracket=(a, b),
        iterations=iterations,
        analytic_value=analytic,
        true_at_high=p_hi,
    )
