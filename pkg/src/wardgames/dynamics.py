"""Adaptive processes over the game.

Sequential best-response dynamics on profiles, and two-strategy replicator
dynamics dx/dt = x(1-x)(u_E(x) - u_B(x)) on the share x of exposing
strategists, with opponents drawn binomially from the population.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum

from .errors import NumericalError, ScenarioError
from .interventions import is_symmetric, payoff_tables
from .model import Action, ActionProfile, Scenario

SCHEDULES = ("round_robin", "random")
TIE_BREAKS = ("stay", "expose", "buffer")

_FIXED_POINT_GRID = 1024
_BISECT_TOL = 1e-12


class TraceTerminal(Enum):
    CONVERGED_TO_NASH = "ConvergedToNash"
    CYCLE_DETECTED = "CycleDetected"
    MAX_ITERS_REACHED = "MaxItersReached"


@dataclass(frozen=True)
class TraceStep:
    """One recorded state; mover is None only for the initial entry."""

    profile: ActionProfile
    mover: int | None
    payoff_delta: float


@dataclass(frozen=True)
class DynamicsTrace:
    steps: tuple[TraceStep, ...]
    terminal: TraceTerminal
    iterations: int


class Stability(Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    BOUNDARY = "Boundary"


@dataclass(frozen=True)
class FixedPoint:
    x: float
    stability: Stability


@dataclass(frozen=True)
class Basin:
    """Interval of initial shares flowing to `attractor` (a stable point)."""

    lo: float
    hi: float
    attractor: float


@dataclass(frozen=True)
class ReplicatorResult:
    trajectory: tuple[tuple[float, float], ...]
    fixed_points: tuple[FixedPoint, ...]
    basins: tuple[Basin, ...]


def best_response_dynamics(
    scenario: Scenario,
    initial: ActionProfile,
    schedule: str = "round_robin",
    max_iters: int = 10_000,
    tie_break: str = "stay",
    seed: int | None = None,
    epsilon: float = 0.0,
) -> DynamicsTrace:
    """Let scheduled wards switch to strict best responses until stable.

    A scheduled ward moves when the other action strictly improves its
    payoff; under tie_break "expose"/"buffer" a ward indifferent between
    actions also moves once to its preferred action (recorded with the actual
    near-zero delta). Stops at Nash, on a repeated state under the
    round-robin schedule, or after max_iters moves.
    """
    if schedule not in SCHEDULES:
        raise ScenarioError(f"schedule must be one of {SCHEDULES}, got {schedule!r}")
    if tie_break not in TIE_BREAKS:
        raise ScenarioError(f"tie_break must be one of {TIE_BREAKS}, got {tie_break!r}")
    if max_iters < 1:
        raise ScenarioError(f"max_iters must be >= 1, got {max_iters}")
    n = scenario.n
    if len(initial) != n:
        raise ScenarioError(
            f"initial profile length {len(initial)} does not match {n} wards"
        )
    if schedule == "random" and seed is None:
        raise ScenarioError("the random schedule requires an explicit seed")
    tables = payoff_tables(scenario)
    rng = random.Random(seed) if schedule == "random" else None
    preferred = {
        "stay": None,
        "expose": Action.EXPOSE,
        "buffer": Action.BUFFER,
    }[tie_break]

    def decide(profile: ActionProfile, ward: int) -> float | None:
        """Payoff change if the ward switches now, else None."""
        cur = profile.actions[ward]
        k_others = profile.exposer_count - (1 if cur is Action.EXPOSE else 0)
        gain = tables.gain_to_expose(ward, k_others)
        if cur is Action.EXPOSE:
            gain = -gain
        if gain > epsilon:
            return gain
        if abs(gain) <= epsilon and preferred is not None and cur is not preferred:
            return gain
        return None

    profile = initial
    steps = [TraceStep(profile, None, 0.0)]
    moves = 0
    pointer = 0
    seen = {(profile.mask, pointer)}
    terminal = TraceTerminal.MAX_ITERS_REACHED
    while True:
        if all(decide(profile, i) is None for i in range(n)):
            terminal = TraceTerminal.CONVERGED_TO_NASH
            break
        if moves >= max_iters:
            terminal = TraceTerminal.MAX_ITERS_REACHED
            break
        if rng is not None:
            ward = rng.randrange(n)
        else:
            ward = pointer
            pointer = (pointer + 1) % n
        gain = decide(profile, ward)
        if gain is None:
            continue
        profile = profile.with_action(ward, profile.actions[ward].flipped())
        steps.append(TraceStep(profile, ward, gain))
        moves += 1
        if rng is None:
            state = (profile.mask, pointer)
            if state in seen:
                terminal = TraceTerminal.CYCLE_DETECTED
                break
            seen.add(state)
    return DynamicsTrace(steps=tuple(steps), terminal=terminal, iterations=moves)


def exact_potential(scenario: Scenario, profile: ActionProfile) -> float:
    """Scalar whose change equals every unilateral deviator's payoff change.

    Phi(profile) = sum_{j<k} (B(j+1) - B(j) + pen(j)) - sum_{i exposing}
    (c_i(E) - c_i(B)) over effective costs, where pen(j) is the expected
    buffering penalty against j exposers. Valid for every scenario here
    because payoffs are count-based with ward-separable costs; sequential
    best-response moves therefore cannot cycle.
    """
    from .interventions import buffering_penalty, effective_costs

    n = scenario.n
    if len(profile) != n:
        raise ScenarioError(
            f"profile length {len(profile)} does not match {n} wards"
        )
    k = profile.exposer_count
    phi = math.fsum(
        scenario.benefit_at(j + 1)
        - scenario.benefit_at(j)
        + buffering_penalty(scenario, j, n)
        for j in range(k)
    )
    costs = effective_costs(scenario)
    phi -= math.fsum(
        costs[i][0] - costs[i][1]
        for i, a in enumerate(profile.actions)
        if a is Action.EXPOSE
    )
    return phi


def expected_payoffs_by_strategy(scenario: Scenario, x: float) -> tuple[float, float]:
    """Population-level (u_E, u_B) when each opponent exposes w.p. x.

    Opponent exposer counts are Binomial(N-1, x); payoffs are the effective
    (post-intervention) ones. Requires identical wards.
    """
    if not is_symmetric(scenario):
        raise ScenarioError(
            "expected payoffs need identical wards; use best_response_dynamics "
            "for asymmetric scenarios"
        )
    if not 0.0 <= x <= 1.0:
        raise ScenarioError(f"population share x must lie in [0, 1], got {x}")
    tables = payoff_tables(scenario)
    m = scenario.n - 1
    u_e = 0.0
    u_b = 0.0
    for j in range(m + 1):
        p = math.comb(m, j) * x**j * (1.0 - x) ** (m - j)
        if p == 0.0:
            continue
        u_e += p * tables.expose[0][j]
        u_b += p * tables.buffer[0][j]
    return u_e, u_b


def _strategy_gain(scenario: Scenario, x: float) -> float:
    u_e, u_b = expected_payoffs_by_strategy(scenario, x)
    return u_e - u_b


def _interior_fixed_points(scenario: Scenario) -> list[float]:
    """Grid-scan u_E - u_B for sign changes, then bisect each bracket."""
    g = _strategy_gain
    xs = [i / _FIXED_POINT_GRID for i in range(_FIXED_POINT_GRID + 1)]
    vals = [g(scenario, x) for x in xs]
    roots: list[float] = []
    for i in range(_FIXED_POINT_GRID):
        a, b = xs[i], xs[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0 and 0.0 < a < 1.0:
            roots.append(a)
            continue
        if fa * fb < 0.0:
            while b - a > _BISECT_TOL:
                mid = 0.5 * (a + b)
                fm = g(scenario, mid)
                if fm == 0.0:
                    a = b = mid
                    break
                if (fa < 0.0) == (fm < 0.0):
                    a, fa = mid, fm
                else:
                    b = mid
            roots.append(0.5 * (a + b))
    deduped: list[float] = []
    for r in roots:
        if not 0.0 < r < 1.0:
            continue
        if not deduped or r - deduped[-1] > 1e-9:
            deduped.append(r)
    return deduped


def _classify(scenario: Scenario, points: list[float]) -> list[FixedPoint]:
    """Stability from the flow sign on each side of every fixed point.

    Sign-preserving degeneracies (flat flow, tangency roots) are Boundary.
    """
    segs = []
    for lo, hi in zip(points[:-1], points[1:]):
        val = _strategy_gain(scenario, 0.5 * (lo + hi))
        segs.append(0.0 if val == 0.0 else math.copysign(1.0, val))
    out = []
    for idx, x in enumerate(points):
        left = segs[idx - 1] if idx > 0 else None
        right = segs[idx] if idx < len(segs) else None
        if left is None:  # x = 0, only the right side exists
            stab = (
                Stability.STABLE
                if right < 0.0
                else Stability.UNSTABLE
                if right > 0.0
                else Stability.BOUNDARY
            )
        elif right is None:  # x = 1
            stab = (
                Stability.STABLE
                if left > 0.0
                else Stability.UNSTABLE
                if left < 0.0
                else Stability.BOUNDARY
            )
        elif left > 0.0 and right < 0.0:
            stab = Stability.STABLE
        elif left < 0.0 and right > 0.0:
            stab = Stability.UNSTABLE
        else:
            stab = Stability.BOUNDARY
        out.append(FixedPoint(x=x, stability=stab))
    return out


def _basins(scenario: Scenario, fixed: list[FixedPoint]) -> list[Basin]:
    points = [fp.x for fp in fixed]
    basins: list[Basin] = []
    for lo, hi in zip(points[:-1], points[1:]):
        val = _strategy_gain(scenario, 0.5 * (lo + hi))
        if val == 0.0:
            continue
        attractor = hi if val > 0.0 else lo
        if basins and basins[-1].attractor == attractor and basins[-1].hi == lo:
            basins[-1] = Basin(basins[-1].lo, hi, attractor)
        else:
            basins.append(Basin(lo, hi, attractor))
    return basins


def integrate_replicator(
    scenario: Scenario,
    x0: float,
    t_end: float = 50.0,
    dt: float = 0.01,
) -> ReplicatorResult:
    """Fixed-step RK4 trajectory of the replicator equation plus its phase
    portrait (fixed points, stability, basins of attraction).

    x = 0 and x = 1 are always fixed points. A trajectory drifting outside
    [0, 1] by more than 1e-9 raises NumericalError (dt too large); smaller
    excursions are clamped.
    """
    if not 0.0 <= x0 <= 1.0:
        raise ScenarioError(f"x0 must lie in [0, 1], got {x0}")
    if dt <= 0.0 or t_end < 0.0:
        raise ScenarioError(f"need dt > 0 and t_end >= 0, got dt={dt}, t_end={t_end}")
    if not is_symmetric(scenario):
        raise ScenarioError("replicator dynamics require identical wards")

    def f(x: float) -> float:
        return x * (1.0 - x) * _strategy_gain(scenario, min(1.0, max(0.0, x)))

    traj = [(0.0, x0)]
    x = x0
    t = 0.0
    while t < t_end - 1e-12:
        h = min(dt, t_end - t)
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        if x < -1e-9 or x > 1.0 + 1e-9:
            raise NumericalError(
                f"trajectory left [0, 1] at t={t + h} (x={x}); reduce dt"
            )
        x = min(1.0, max(0.0, x))
        t = t + h
        traj.append((t, x))
    interior = _interior_fixed_points(scenario)
    points = [0.0] + interior + [1.0]
    fixed = _classify(scenario, points)
    basins = _basins(scenario, fixed)
    return ReplicatorResult(
        trajectory=tuple(traj),
        fixed_points=tuple(fixed),
        basins=tuple(basins),
    )
