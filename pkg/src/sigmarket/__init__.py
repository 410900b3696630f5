"""Solver and verifier library for the school signaling-design game.

Schools commit to attendance fees and effort-monitoring policies; privately
informed students pick a school and an effort; a competitive labor market
pays posterior expected productivity.  The package constructs refined
equilibria of every signaling subgame, solves the monopoly and competition
design games in closed form, audits deviations, accounts welfare, and checks
everything against a brute-force oracle on small discretized instances.
"""

from .errors import (
    InputError,
    InvariantViolation,
    NumericError,
    RangeError,
    ResourceError,
    SigMarketError,
)
from .market import (
    HIGH,
    LOW,
    CostFamily,
    DecreasingDifferencesReport,
    MarketParams,
    check_decreasing_differences,
    cost,
    cost_inverse_effort,
    expected_type,
    max_welfare,
    riley_effort,
)
from .monitoring import (
    Policy,
    PolicyProfile,
    Signal,
    StepMonitoringPolicy,
    message_of,
    min_cost,
    min_effort,
    reduce_minimal,
)
from .outer import (
    AuditReport,
    BoundCertificate,
    CreditFamily,
    EquilibriumOutcome,
    FamilyResult,
    FeeInterval,
    FeeSet,
    FierceVerdict,
    WelfareReport,
    credit_monopoly_rpbe,
    deviation_audit,
    is_fierce,
    mild_fee_set,
    monopoly_rpbe,
    outcome_csv_row,
    riley_rpbe,
    select_iis,
    semipooling_family,
    welfare,
)
from .refinement import (
    D1WageSets,
    DeviationGrid,
    VerificationReport,
    WageInterval,
    brute_force_equilibria,
    check_minimality,
    d1_wage_sets,
    outcome_equivalent,
    strictly_included,
    verify_extended_d1,
    verify_pbe,
)
from .subgame import (
    BeliefSystem,
    FrontierReport,
    PopulationStrategy,
    StrategyAtom,
    SubgameEquilibrium,
    WageSchedule,
    construct_epbe,
    mimic_frontier,
    reservation,
)

__version__ = "0.1.0"

__all__ = [
    "BeliefSystem",
    "BoundCertificate",
    "CostFamily",
    "CreditFamily",
    "D1WageSets",
    "DecreasingDifferencesReport",
    "DeviationGrid",
    "EquilibriumOutcome",
    "FamilyResult",
    "FeeInterval",
    "FeeSet",
    "FierceVerdict",
    "FrontierReport",
    "HIGH",
    "InputError",
    "InvariantViolation",
    "LOW",
    "MarketParams",
    "NumericError",
    "Policy",
    "PolicyProfile",
    "PopulationStrategy",
    "RangeError",
    "ResourceError",
    "SigMarketError",
    "Signal",
    "StepMonitoringPolicy",
    "StrategyAtom",
    "SubgameEquilibrium",
    "VerificationReport",
    "WageInterval",
    "WageSchedule",
    "WelfareReport",
    "AuditReport",
    "brute_force_equilibria",
    "check_decreasing_differences",
    "check_minimality",
    "construct_epbe",
    "cost",
    "cost_inverse_effort",
    "credit_monopoly_rpbe",
    "d1_wage_sets",
    "deviation_audit",
    "expected_type",
    "is_fierce",
    "max_welfare",
    "message_of",
    "mild_fee_set",
    "mimic_frontier",
    "min_cost",
    "min_effort",
    "monopoly_rpbe",
    "outcome_csv_row",
    "outcome_equivalent",
    "reduce_minimal",
    "reservation",
    "riley_effort",
    "riley_rpbe",
    "select_iis",
    "semipooling_family",
    "strictly_included",
    "verify_extended_d1",
    "verify_pbe",
    "welfare",
]
