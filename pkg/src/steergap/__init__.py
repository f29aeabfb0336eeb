"""Steering-gap toolkit for two-qubit states against local-hidden-state ensembles.

The gap function is the minimum, over normalized composite directions and
measurements, of the ensemble-capacity support minus the steered measurement
support; a negative value certifies steerability with respect to the
ensemble. The package provides the real Pauli-coordinate algebra, the
steering map, spherical quadrature, the closed-form capacity support, rank-1
measurement parameterization, the replicated simulated-annealing optimizer,
and a CLI.
"""

__version__ = "0.1.0"

from .annealing import (
    AnnealConfig,
    GapResult,
    R_MIX,
    ZParam,
    anneal_once,
    check_direction,
    gap,
    gap_pvm_analytic,
    objective,
    werner_parameter,
)
from .capacity import (
    DiscreteEnsemble,
    LhsEnsemble,
    UniformEnsemble,
    capacity_support,
    ensemble_barycenter,
    greedy_response_value,
    load_discrete,
    minimal_requirement_residual,
    response_oracle,
    uniform_capacity_pair,
)
from .errors import FormatError, InfeasibleConfigError, ValidationError
from .measurements import (
    Pvm,
    RankOnePovm,
    measurement_support,
    pvm_support_closed_form,
    solve_alphas,
)
from .pauli import (
    BlochPoint,
    Direction,
    HermOp,
    eig_max,
    eig_min,
    hs_inner,
    is_psd,
    normalize_direction,
    projector,
)
from .quadrature import Quadrature, integrate, load_lebedev, product_rule, rule_from_id
from .states import (
    SteeringMap,
    TwoQubitState,
    dual_map,
    load_state,
    state_from_density,
    steering_map,
    werner,
)

__all__ = [
    "AnnealConfig",
    "BlochPoint",
    "Direction",
    "DiscreteEnsemble",
    "FormatError",
    "GapResult",
    "HermOp",
    "InfeasibleConfigError",
    "LhsEnsemble",
    "Pvm",
    "Quadrature",
    "R_MIX",
    "RankOnePovm",
    "SteeringMap",
    "TwoQubitState",
    "UniformEnsemble",
    "ValidationError",
    "ZParam",
    "anneal_once",
    "capacity_support",
    "check_direction",
    "dual_map",
    "eig_max",
    "eig_min",
    "ensemble_barycenter",
    "gap",
    "gap_pvm_analytic",
    "greedy_response_value",
    "hs_inner",
    "integrate",
    "is_psd",
    "load_discrete",
    "load_lebedev",
    "load_state",
    "measurement_support",
    "minimal_requirement_residual",
    "normalize_direction",
    "objective",
    "product_rule",
    "projector",
    "pvm_support_closed_form",
    "response_oracle",
    "rule_from_id",
    "solve_alphas",
    "state_from_density",
    "steering_map",
    "uniform_capacity_pair",
    "werner",
    "werner_parameter",
]
