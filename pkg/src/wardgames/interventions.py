"""The three AI-intervention archetypes as composable payoff transforms.

Effort reduction subtracts a per-action amount from local costs, observability
charges buffering an expected penalty p(k_others) * F, and a mechanism
replaces the structural exposure cost with a capped one. Cost-side transforms
(effort, mechanism) commute; mechanism caps are last-writer-wins; penalties
and effort deltas stack additively across repeated interventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

from .errors import ScenarioError
from .model import (
    Action,
    ActionProfile,
    Scenario,
    Ward,
    _check_profile,
    benefit_at_count,
)


@dataclass(frozen=True)
class EffortReduction:
    """Lower the cost of acting: c(a) -> c(a) - delta(a), deltas >= 0."""

    delta_expose: float = 0.0
    delta_buffer: float = 0.0

    def __post_init__(self) -> None:
        for name in ("delta_expose", "delta_buffer"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ScenarioError(f"{name} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class Observability:
    """Charge detected buffering an expected consequence.

    The detection probability is affine in the fraction of other wards
    exposing, p(k_others) = clamp(p0 + p_slope * k_others / (N - 1), 0, 1);
    p_slope = 0 gives the constant model. penalty is the expected consequence
    F >= 0 and applies to Buffer actions only.
    """

    p0: float
    p_slope: float = 0.0
    penalty: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.p0) or not 0 <= self.p0 <= 1:
            raise ScenarioError(f"p0 must lie in [0, 1], got {self.p0}")
        if not math.isfinite(self.p_slope):
            raise ScenarioError(f"p_slope must be finite, got {self.p_slope}")
        if not math.isfinite(self.penalty) or self.penalty < 0:
            raise ScenarioError(f"penalty must be finite and >= 0, got {self.penalty}")


class MechanismMode(Enum):
    """What happens to the risk the mechanism takes off the ward.

    ABSORB: the mechanism genuinely eliminates it; welfare sees only capped
    costs. REDISTRIBUTE: the difference cost_expose - cap is system-borne and
    charged back in welfare accounting.
    """

    ABSORB = "absorb"
    REDISTRIBUTE = "redistribute"


@dataclass(frozen=True)
class Mechanism:
    """Bound or redistribute the local cost of exposing: c_i(E) -> cap_i.

    capped_cost_expose is either a single value broadcast to every ward or a
    per-ward sequence of length N. Buffer costs are never touched.
    """

    capped_cost_expose: float | tuple[float, ...]
    mode: MechanismMode = MechanismMode.ABSORB

    def __post_init__(self) -> None:
        caps = self.capped_cost_expose
        if isinstance(caps, (list, tuple)):
            caps = tuple(float(c) for c in caps)
            object.__setattr__(self, "capped_cost_expose", caps)
            values = caps
        else:
            values = (float(caps),)
        for v in values:
            if not math.isfinite(v) or v < 0:
                raise ScenarioError(
                    f"capped_cost_expose entries must be finite and >= 0, got {v}"
                )
        if not isinstance(self.mode, MechanismMode):
            raise ScenarioError(f"mode must be a MechanismMode, got {self.mode!r}")


Intervention = Union[EffortReduction, Observability, Mechanism]


def apply_effort_reduction(
    base_payoff: float, action: Action, params: EffortReduction
) -> float:
    """Payoff after the cost reduction: u + delta(a)."""
    delta = params.delta_expose if action is Action.EXPOSE else params.delta_buffer
    return base_payoff + delta


def detection_probability(params: Observability, k_others: int, n: int) -> float:
    """p(k_others) = clamp(p0 + p_slope * k_others / (n - 1), 0, 1)."""
    if n < 2:
        raise ScenarioError(f"detection probability needs n >= 2, got {n}")
    if not 0 <= k_others <= n - 1:
        raise ScenarioError(f"k_others {k_others} out of range [0, {n - 1}]")
    p = params.p0 + params.p_slope * k_others / (n - 1)
    return max(0.0, min(1.0, p))


def apply_observability(
    base_payoff: float,
    action: Action,
    k_others: int,
    params: Observability,
    n: int,
) -> float:
    """Subtract the expected consequence from buffering; exposing is untouched."""
    if action is Action.EXPOSE:
        return base_payoff
    pen = detection_probability(params, k_others, n) * params.penalty
    if pen == 0.0:
        return base_payoff
    return base_payoff - pen


def apply_mechanism(ward: Ward, action: Action, params: Mechanism) -> float:
    """Effective local cost of the given action under the mechanism."""
    if action is Action.BUFFER:
        return ward.cost_buffer
    caps = params.capped_cost_expose
    if isinstance(caps, tuple):
        if ward.id >= len(caps):
            raise ScenarioError(
                f"capped_cost_expose has {len(caps)} entries; no entry for "
                f"ward {ward.id}"
            )
        return caps[ward.id]
    return float(caps)


def resolved_mechanism(
    scenario: Scenario,
) -> tuple[tuple[float, ...] | None, MechanismMode | None]:
    """Per-ward caps and mode of the governing (last) mechanism, if any."""
    mech: Mechanism | None = None
    for iv in scenario.interventions:
        if isinstance(iv, Mechanism):
            mech = iv
    if mech is None:
        return None, None
    caps = mech.capped_cost_expose
    if isinstance(caps, tuple):
        if len(caps) != scenario.n:
            raise ScenarioError(
                f"capped_cost_expose has {len(caps)} entries but the scenario "
                f"has {scenario.n} wards"
            )
        return caps, mech.mode
    return (float(caps),) * scenario.n, mech.mode


def effective_costs(scenario: Scenario) -> list[tuple[float, float]]:
    """Post-intervention (cost_expose, cost_buffer) per ward.

    The last mechanism replaces the structural exposure cost; effort deltas
    then subtract. Only cost-side transforms appear here; observability
    penalties live on the payoff, not the cost.
    """
    caps, _ = resolved_mechanism(scenario)
    d_e = 0.0
    d_b = 0.0
    for iv in scenario.interventions:
        if isinstance(iv, EffortReduction):
            d_e += iv.delta_expose
            d_b += iv.delta_buffer
    out = []
    for w in scenario.wards:
        ce = caps[w.id] if caps is not None else w.cost_expose
        out.append((ce - d_e, w.cost_buffer - d_b))
    return out


def buffering_penalty(scenario: Scenario, k_others: int, n: int) -> float:
    """Total expected consequence charged to a buffering ward."""
    pen = 0.0
    for iv in scenario.interventions:
        if isinstance(iv, Observability) and iv.penalty != 0.0:
            pen += detection_probability(iv, k_others, n) * iv.penalty
    return pen


def effective_payoff(scenario: Scenario, profile: ActionProfile, ward: int) -> float:
    """The post-intervention payoff u_i used by every downstream module."""
    _check_profile(scenario, profile)
    n = scenario.n
    if not 0 <= ward < n:
        raise ScenarioError(f"ward index {ward} out of range [0, {n - 1}]")
    action = profile.actions[ward]
    k = profile.exposer_count
    ce, cb = effective_costs(scenario)[ward]
    u = benefit_at_count(scenario.benefit, k, n) - (
        ce if action is Action.EXPOSE else cb
    )
    if action is Action.BUFFER:
        # a buffering ward is not an exposer, so k_others == k here
        pen = buffering_penalty(scenario, k, n)
        if pen != 0.0:
            u -= pen
    return u


def system_borne_cost(scenario: Scenario, profile: ActionProfile) -> float:
    """Cost the system absorbs under a redistributing mechanism, else 0."""
    caps, mode = resolved_mechanism(scenario)
    if caps is None or mode is not MechanismMode.REDISTRIBUTE:
        return 0.0
    return math.fsum(
        w.cost_expose - caps[w.id]
        for w, a in zip(scenario.wards, profile.actions)
        if a is Action.EXPOSE
    )


def is_symmetric(scenario: Scenario) -> bool:
    """True when every ward faces identical effective incentives."""
    w0 = scenario.wards[0]
    if any(
        w.cost_expose != w0.cost_expose or w.cost_buffer != w0.cost_buffer
        for w in scenario.wards
    ):
        return False
    caps, _ = resolved_mechanism(scenario)
    if caps is not None and any(c != caps[0] for c in caps):
        return False
    return True


@dataclass(frozen=True)
class PayoffTables:
    """Effective payoffs indexed by [ward][count of exposing others].

    expose[i][j] is ward i's payoff for exposing when j others expose;
    buffer[i][j] likewise for buffering. Valid because the benefit depends on
    others only through their exposer count.
    """

    n: int
    expose: tuple[tuple[float, ...], ...]
    buffer: tuple[tuple[float, ...], ...]

    def gain_to_expose(self, ward: int, k_others: int) -> float:
        return self.expose[ward][k_others] - self.buffer[ward][k_others]


def payoff_tables(scenario: Scenario) -> PayoffTables:
    """Precompute all effective payoffs; bit-identical to effective_payoff."""
    n = scenario.n
    benefits = [benefit_at_count(scenario.benefit, k, n) for k in range(n + 1)]
    pens = [buffering_penalty(scenario, j, n) for j in range(n)]
    costs = effective_costs(scenario)
    expose = []
    buffer = []
    for i in range(n):
        ce, cb = costs[i]
        expose.append(tuple(benefits[j + 1] - ce for j in range(n)))
        buffer.append(
            tuple(
                (benefits[j] - cb) - pens[j] if pens[j] != 0.0 else benefits[j] - cb
                for j in range(n)
            )
        )
    return PayoffTables(n=n, expose=tuple(expose), buffer=tuple(buffer))
