"""Game-theoretic engine for the inpatient capacity-signalling coordination
game and its three AI-intervention archetypes."""

from .dynamics import (
    Basin,
    DynamicsTrace,
    FixedPoint,
    ReplicatorResult,
    Stability,
    TraceStep,
    TraceTerminal,
    best_response_dynamics,
    exact_potential,
    expected_payoffs_by_strategy,
    integrate_replicator,
)
from .equilibrium import (
    Classification,
    EquilibriumReport,
    FlipReport,
    NashCheck,
    WardFlip,
    best_response,
    enumerate_nash,
    flip_conditions,
    is_nash,
)
from .errors import BracketError, NumericalError, ResourceLimitError, ScenarioError
from .interventions import (
    EffortReduction,
    Intervention,
    Mechanism,
    MechanismMode,
    Observability,
    PayoffTables,
    apply_effort_reduction,
    apply_mechanism,
    apply_observability,
    detection_probability,
    effective_payoff,
    is_symmetric,
    payoff_tables,
)
from .model import (
    Action,
    ActionProfile,
    BenefitSpec,
    ConcaveBenefit,
    LinearBenefit,
    Scenario,
    TableBenefit,
    ThresholdBenefit,
    Ward,
    benefit_at_count,
    payoff,
    symmetric_scenario,
    validate_scenario,
    welfare,
)
from .sweep import (
    SweepSpec,
    ThresholdResult,
    critical_threshold,
    get_by_path,
    set_by_path,
    sweep_parameter,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActionProfile",
    "Basin",
    "BenefitSpec",
    "BracketError",
    "Classification",
    "ConcaveBenefit",
    "DynamicsTrace",
    "EffortReduction",
    "EquilibriumReport",
    "FixedPoint",
    "FlipReport",
    "Intervention",
    "LinearBenefit",
    "Mechanism",
    "MechanismMode",
    "NashCheck",
    "NumericalError",
    "Observability",
    "PayoffTables",
    "ReplicatorResult",
    "ResourceLimitError",
    "Scenario",
    "ScenarioError",
    "Stability",
    "SweepSpec",
    "TableBenefit",
    "ThresholdBenefit",
    "ThresholdResult",
    "TraceStep",
    "TraceTerminal",
    "Ward",
    "WardFlip",
    "apply_effort_reduction",
    "apply_mechanism",
    "apply_observability",
    "benefit_at_count",
    "best_response",
    "best_response_dynamics",
    "critical_threshold",
    "detection_probability",
    "effective_payoff",
    "enumerate_nash",
    "exact_potential",
    "expected_payoffs_by_strategy",
    "flip_conditions",
    "get_by_path",
    "integrate_replicator",
    "is_nash",
    "is_symmetric",
    "payoff",
    "payoff_tables",
    "set_by_path",
    "sweep_parameter",
    "symmetric_scenario",
    "validate_scenario",
    "welfare",
]
