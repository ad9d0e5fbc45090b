"""Energy-efficiency resource allocation for UAV-powered D2D networks.

Jointly optimizes the wireless-power-transfer harvesting time and per-pair
transmit powers by successive convex approximation, plus two baseline
algorithms and a Monte Carlo benchmark harness.
"""

from .algorithms import (
    ALGORITHM_NAMES,
    ScaSettings,
    SolveReport,
    jhtpa,
    oht,
    opa,
    run_algorithm,
)
from .bench import ExperimentSpec, ResultRow, derive_child_seed, run_experiment
from .core import (
    Allocation,
    BoundCoeffs,
    FeasibilityReport,
    check_feasible,
    energy_efficiency,
    log_bound_coeffs,
    qos_threshold,
    surrogate_psi,
)
from .engine import (
    ConvexProgram,
    Functional,
    InfeasibleStartError,
    NoFeasiblePointFoundError,
    SolveOutcome,
    SolverSettings,
    SolveStatus,
    check_gradients,
    find_feasible,
    solve,
)
from .scenario import (
    ChannelRealization,
    Placement,
    ScenarioConfig,
    generate_placement,
    make_scenario,
    realize_channels,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHM_NAMES",
    "Allocation",
    "BoundCoeffs",
    "ChannelRealization",
    "ConvexProgram",
    "ExperimentSpec",
    "FeasibilityReport",
    "Functional",
    "InfeasibleStartError",
    "NoFeasiblePointFoundError",
    "Placement",
    "ResultRow",
    "ScaSettings",
    "ScenarioConfig",
    "SolveOutcome",
    "SolveReport",
    "SolveStatus",
    "SolverSettings",
    "check_feasible",
    "check_gradients",
    "derive_child_seed",
    "energy_efficiency",
    "find_feasible",
    "generate_placement",
    "jhtpa",
    "log_bound_coeffs",
    "make_scenario",
    "oht",
    "opa",
    "qos_threshold",
    "realize_channels",
    "run_algorithm",
    "run_experiment",
    "solve",
    "surrogate_psi",
]
