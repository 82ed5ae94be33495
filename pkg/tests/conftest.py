"""Shared fixtures: the canonical scenarios and a randomized generator."""

from __future__ import annotations

import random

import pytest

from wardgames import (
    ConcaveBenefit,
    EffortReduction,
    LinearBenefit,
    Mechanism,
    MechanismMode,
    Observability,
    Scenario,
    TableBenefit,
    ThresholdBenefit,
    Ward,
    symmetric_scenario,
)


@pytest.fixture
def s0() -> Scenario:
    """N=4 symmetric wards, c(E)=2, c(B)=1, linear benefit 0.3 per exposer."""
    return symmetric_scenario(4, 2.0, 1.0, LinearBenefit(0.3))


@pytest.fixture
def v0() -> Scenario:
    """The veto game: benefit 3.0 only when all four wards expose."""
    return symmetric_scenario(4, 2.0, 1.0, ThresholdBenefit(tau=4, beta=3.0))


def random_benefit(rng: random.Random, n: int):
    kind = rng.randrange(4)
    if kind == 0:
        return LinearBenefit(rng.uniform(0.0, 1.0))
    if kind == 1:
        return ThresholdBenefit(tau=rng.randint(1, n), beta=rng.uniform(0.0, 3.0))
    if kind == 2:
        return ConcaveBenefit(beta=rng.uniform(0.2, 2.0), gamma=rng.uniform(0.3, 1.0))
    values = [0.0]
    for _ in range(n):
        values.append(values[-1] + rng.uniform(0.0, 0.6))
    return TableBenefit(tuple(values))


def random_interventions(rng: random.Random, n: int, max_expose_cost: float):
    ivs = []
    if rng.random() < 0.4:
        ivs.append(
            EffortReduction(rng.uniform(0.0, 0.8), rng.uniform(0.0, 0.8))
        )
    if rng.random() < 0.4:
        ivs.append(
            Observability(
                p0=rng.uniform(0.0, 1.0),
                p_slope=rng.uniform(-1.0, 1.0),
                penalty=rng.uniform(0.0, 2.0),
            )
        )
    if rng.random() < 0.4:
        mode = rng.choice(list(MechanismMode))
        ivs.append(Mechanism(rng.uniform(0.0, max_expose_cost), mode))
    rng.shuffle(ivs)
    return tuple(ivs)


def random_scenario(
    rng: random.Random,
    n: int | None = None,
    max_n: int = 8,
    symmetric: bool | None = None,
    with_interventions: bool = False,
) -> Scenario:
    """Continuous random costs so knife-edge payoff ties have measure zero."""
    if n is None:
        n = rng.randint(2, max_n)
    if symmetric is None:
        symmetric = rng.random() < 0.5
    if symmetric:
        cb = rng.uniform(0.2, 2.0)
        ce = cb + rng.uniform(0.05, 2.0)
        wards = tuple(Ward(i, ce, cb) for i in range(n))
    else:
        wards = tuple(
            Ward(i, rng.uniform(0.3, 4.0), rng.uniform(0.1, 2.0)) for i in range(n)
        )
    benefit = random_benefit(rng, n)
    ivs = ()
    if with_interventions:
        max_ce = max(w.cost_expose for w in wards)
        ivs = random_interventions(rng, n, max_ce)
    return Scenario(wards=wards, benefit=benefit, interventions=ivs)
